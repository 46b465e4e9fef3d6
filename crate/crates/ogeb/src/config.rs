use std::path::PathBuf;

use ogeb_core::entanglement::{ONE_UNIFORM_TOL, RANK_TOL};
use ogeb_core::nonlocality::{CertifyMode, SolveOptions};
use ogeb_core::tritsets::{PermutationMode, DEFAULT_PERMUTATION_SEED};

use crate::formats::FormatError;

/// Largest party count the driver accepts.
pub const MAX_CLI_PARTIES: usize = 12;

/// Largest party count for which dense vectors are exported.
pub const MAX_DENSE_PARTIES: usize = 6;

/// Default bound on ledger block norms in the oracle cross-check.
pub const CROSS_CHECK_TOL: f64 = 1e-9;

/// Largest party count for the oracle cross-check of a proof run.
pub const MAX_CROSS_CHECK_PARTIES: usize = 4;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Command {
    Generate,
    Verify,
    Certify,
    Prove,
    GhzControl,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Generate => "generate",
            Command::Verify => "verify",
            Command::Certify => "certify",
            Command::Prove => "prove",
            Command::GhzControl => "ghz-control",
        }
    }
}

/// Which construction to build.
#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum SetVariant {
    /// Basis over the standard family.
    Standard,
    /// Basis over the modified family.
    Modified,
    /// The set over the modified family without its third set.
    Oges,
}

impl SetVariant {
    pub fn name(self) -> &'static str {
        match self {
            SetVariant::Standard => "standard",
            SetVariant::Modified => "modified",
            SetVariant::Oges => "oges",
        }
    }

    pub fn min_parties(self) -> usize {
        match self {
            SetVariant::Standard => 1,
            SetVariant::Modified | SetVariant::Oges => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JsonTarget {
    Stdout,
    File(PathBuf),
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub command: Command,
    pub n_parties: Option<usize>,
    pub variant: SetVariant,
    /// State-set file to analyse instead of a built construction.
    pub input: Option<PathBuf>,
    pub mode: CertifyMode,
    pub permutations: PermutationMode,
    pub solve: SolveOptions,
    pub rank_tol: f64,
    pub uniform_tol: f64,
    pub drop_set: Option<usize>,
    pub cross_check: bool,
    pub cross_check_tol: f64,
    pub dense: bool,
    pub timings: bool,
    /// Where the JSON report goes; `None` writes `<command>-<set>.json`
    /// into `out_dir`.
    pub json: Option<JsonTarget>,
    pub out_dir: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum RunError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Format(#[from] FormatError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Core(#[from] ogeb_core::Error),
}

impl RunError {
    /// A set that fails orthogonality is a failed verdict, anything else is
    /// bad input.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Core(ogeb_core::Error::NotOrthogonal { .. }) => 1,
            _ => 2,
        }
    }
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            n_parties: None,
            variant: SetVariant::Oges,
            input: None,
            mode: CertifyMode::LeaveOneOut,
            permutations: PermutationMode::Exhaustive,
            solve: SolveOptions::default(),
            rank_tol: RANK_TOL,
            uniform_tol: ONE_UNIFORM_TOL,
            drop_set: None,
            cross_check: false,
            cross_check_tol: CROSS_CHECK_TOL,
            dense: false,
            timings: false,
            json: None,
            out_dir: PathBuf::from("."),
        }
    }

    pub fn with_parties(mut self, n: usize) -> Self {
        self.n_parties = Some(n);
        self.permutations = PermutationMode::default_for(n);
        self
    }

    pub fn with_variant(mut self, v: SetVariant) -> Self {
        self.variant = v;
        self
    }

    /// Seed used by sampled permutation checks.
    pub fn seed(&self) -> u64 {
        match self.permutations {
            PermutationMode::Sampled { seed, .. } => seed,
            PermutationMode::Exhaustive => DEFAULT_PERMUTATION_SEED,
        }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        let usage = |m: String| Err(RunError::Usage(m));
        let needs_target = !matches!(self.command, Command::GhzControl);
        let takes_input = matches!(self.command, Command::Verify | Command::Certify);
        if self.input.is_some() && !takes_input {
            return usage(format!("`{}` does not read state-set files", self.command.name()));
        }
        if needs_target && self.input.is_none() {
            let Some(n) = self.n_parties else {
                return usage("--n is required".into());
            };
            let min = match self.command {
                Command::Prove => 3,
                _ => self.variant.min_parties(),
            };
            if n < min {
                return usage(format!("--n {n} is too small for this command and variant (minimum {min})"));
            }
            if n > MAX_CLI_PARTIES {
                return usage(format!("--n {n} exceeds the supported maximum {MAX_CLI_PARTIES}"));
            }
            if self.dense && n > MAX_DENSE_PARTIES {
                return usage(format!("dense export is limited to --n {MAX_DENSE_PARTIES} or fewer"));
            }
            if self.cross_check && n > MAX_CROSS_CHECK_PARTIES {
                return usage(format!("--cross-check is limited to --n {MAX_CROSS_CHECK_PARTIES} or fewer"));
            }
        }
        if let Some(k) = self.drop_set {
            let allowed: &[usize] = match (self.command, self.variant) {
                (Command::Prove, _) | (Command::Certify, SetVariant::Oges) => &[0, 1, 3],
                (Command::Certify, SetVariant::Modified) => &[0, 1, 2, 3],
                (Command::Certify, SetVariant::Standard) => &[0, 1, 2],
                _ => return usage("--drop-set applies to `certify` and `prove`".into()),
            };
            if self.input.is_some() {
                return usage("--drop-set cannot be combined with --input".into());
            }
            if !allowed.contains(&k) {
                return usage(format!("set {k} is not part of this construction"));
            }
        }
        for (name, t) in [
            ("--rank-tol", self.rank_tol),
            ("--uniform-tol", self.uniform_tol),
            ("--cross-check-tol", self.cross_check_tol),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return usage(format!("{name} must be positive and finite"));
            }
        }
        if let PermutationMode::Sampled { count: 0, .. } = self.permutations {
            return usage("--samples must be at least 1".into());
        }
        self.solve.validate().map_err(|e| RunError::Usage(e.to_string()))
    }
}
