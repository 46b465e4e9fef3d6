use std::io::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use ogeb_core::entanglement::{ONE_UNIFORM_TOL, RANK_TOL};
use ogeb_core::nonlocality::{CertifyMode, SolveOptions, DEFAULT_MAX_ORACLE_DIM};
use ogeb_core::tritsets::{PermutationMode, DEFAULT_PERMUTATION_SEED};

use crate::config::{Command, JsonTarget, RunConfig, RunError, SetVariant, CROSS_CHECK_TOL};
use crate::report::{build, Built};

#[derive(Parser, Debug)]
#[command(name = "ogeb", version, about = "Build and certify orthogonal genuinely entangled qutrit bases")]
pub struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Write a family and its state set to the output directory
    Generate {
        #[command(flatten)]
        target: Target,
        /// Also write dense state vectors (at most 6 parties)
        #[arg(long)]
        dense: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Check partition, permutation invariance, sizes, orthogonality and entanglement
    Verify {
        #[command(flatten)]
        target: Target,
        /// Permutation check; `auto` is exhaustive up to 6 parties
        #[arg(long, value_enum, default_value_t = PermArg::Auto)]
        perm: PermArg,
        /// Number of sampled permutations
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_PERMUTATION_SEED)]
        seed: u64,
        /// Relative singular-value threshold for Schmidt ranks
        #[arg(long, default_value_t = RANK_TOL)]
        rank_tol: f64,
        /// Entry-wise tolerance against I/3 for reduced states
        #[arg(long, default_value_t = ONE_UNIFORM_TOL)]
        uniform_tol: f64,
        #[command(flatten)]
        out: Output,
    },
    /// Solve for orthogonality-preserving measurements with the numeric oracle
    Certify {
        #[command(flatten)]
        target: Target,
        #[arg(long, value_enum, default_value_t = ModeArg::Lemma3)]
        mode: ModeArg,
        /// Leave out the states built on one set
        #[arg(long)]
        drop_set: Option<usize>,
        #[command(flatten)]
        oracle: Oracle,
        /// Record per-cut wall-clock time in the report
        #[arg(long)]
        timings: bool,
        #[command(flatten)]
        out: Output,
    },
    /// Replay the block-zeros / block-trivial proof on every cut
    Prove {
        #[arg(long)]
        n: usize,
        /// Leave out the states built on one set
        #[arg(long)]
        drop_set: Option<usize>,
        /// Check every derived block against the numeric oracle (at most 4 parties)
        #[arg(long)]
        cross_check: bool,
        #[arg(long, default_value_t = CROSS_CHECK_TOL)]
        cross_check_tol: f64,
        #[command(flatten)]
        oracle: Oracle,
        #[command(flatten)]
        out: Output,
    },
    /// Run the oracle on the GHZ and two-qubit product bases
    GhzControl {
        #[command(flatten)]
        oracle: Oracle,
        #[command(flatten)]
        out: Output,
    },
}

#[derive(Args, Debug)]
struct Target {
    /// Number of parties
    #[arg(long, required_unless_present = "input")]
    n: Option<usize>,
    #[arg(long, value_enum, default_value_t = SetVariant::Oges)]
    variant: SetVariant,
    /// Read a state-set JSON file instead of building one
    #[arg(long, conflicts_with = "n")]
    input: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct Oracle {
    #[arg(long, default_value_t = 1e-9)]
    null_tol: f64,
    #[arg(long, default_value_t = 1e-9)]
    trivial_tol: f64,
    #[arg(long, default_value_t = 1e-12)]
    identity_tol: f64,
    /// Largest measuring-side dimension the oracle accepts
    #[arg(long, default_value_t = DEFAULT_MAX_ORACLE_DIM)]
    max_oracle_dim: usize,
    /// Remove the dimension limit
    #[arg(long)]
    allow_large_oracle: bool,
}

impl Oracle {
    fn options(&self) -> SolveOptions {
        SolveOptions {
            null_tol: self.null_tol,
            trivial_tol: self.trivial_tol,
            identity_tol: self.identity_tol,
            max_dim: if self.allow_large_oracle { usize::MAX } else { self.max_oracle_dim },
        }
    }
}

#[derive(Args, Debug)]
struct Output {
    /// Report path, or `-` for standard output
    #[arg(long, value_name = "PATH|-")]
    json: Option<String>,
    /// Directory for reports and generated files
    #[arg(long, env = "OGEB_OUT_DIR", default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum PermArg {
    Auto,
    Exhaustive,
    Sampled,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    /// The N sides that leave one party out
    Lemma3,
    FullSweep,
}

fn apply_output(cfg: &mut RunConfig, out: Output) {
    cfg.json = out.json.map(|j| if j == "-" { JsonTarget::Stdout } else { JsonTarget::File(j.into()) });
    cfg.out_dir = out.out_dir;
}

fn apply_target(cfg: &mut RunConfig, t: Target) {
    if let Some(n) = t.n {
        *cfg = cfg.clone().with_parties(n);
    }
    cfg.variant = t.variant;
    cfg.input = t.input;
}

impl Cli {
    pub fn into_config(self) -> RunConfig {
        match self.command {
            Cmd::Generate { target, dense, out } => {
                let mut cfg = RunConfig::new(Command::Generate);
                apply_target(&mut cfg, target);
                cfg.dense = dense;
                apply_output(&mut cfg, out);
                cfg
            }
            Cmd::Verify { target, perm, samples, seed, rank_tol, uniform_tol, out } => {
                let mut cfg = RunConfig::new(Command::Verify);
                apply_target(&mut cfg, target);
                cfg.permutations = match perm {
                    PermArg::Exhaustive => PermutationMode::Exhaustive,
                    PermArg::Sampled => PermutationMode::Sampled { count: samples, seed },
                    PermArg::Auto if cfg.n_parties.is_some_and(|n| n <= 6) => PermutationMode::Exhaustive,
                    PermArg::Auto => PermutationMode::Sampled { count: samples, seed },
                };
                cfg.rank_tol = rank_tol;
                cfg.uniform_tol = uniform_tol;
                apply_output(&mut cfg, out);
                cfg
            }
            Cmd::Certify { target, mode, drop_set, oracle, timings, out } => {
                let mut cfg = RunConfig::new(Command::Certify);
                apply_target(&mut cfg, target);
                cfg.mode = match mode {
                    ModeArg::Lemma3 => CertifyMode::LeaveOneOut,
                    ModeArg::FullSweep => CertifyMode::FullSweep,
                };
                cfg.drop_set = drop_set;
                cfg.solve = oracle.options();
                cfg.timings = timings;
                apply_output(&mut cfg, out);
                cfg
            }
            Cmd::Prove { n, drop_set, cross_check, cross_check_tol, oracle, out } => {
                let mut cfg = RunConfig::new(Command::Prove).with_parties(n);
                cfg.drop_set = drop_set;
                cfg.cross_check = cross_check;
                cfg.cross_check_tol = cross_check_tol;
                cfg.solve = oracle.options();
                apply_output(&mut cfg, out);
                cfg
            }
            Cmd::GhzControl { oracle, out } => {
                let mut cfg = RunConfig::new(Command::GhzControl);
                cfg.solve = oracle.options();
                apply_output(&mut cfg, out);
                cfg
            }
        }
    }
}

fn write_file(path: &Path, contents: &str) -> Result<(), RunError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|source| RunError::Io { path: dir.to_path_buf(), source })?;
    }
    std::fs::write(path, contents).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Writes artifacts and the report; returns the human summary.
fn emit(cfg: &RunConfig, built: &Built) -> Result<String, RunError> {
    let mut summary = built.report.summary();
    for a in &built.artifacts {
        write_file(&cfg.out_dir.join(&a.name), &a.contents)?;
    }
    let json = built.report.to_json();
    match &cfg.json {
        Some(JsonTarget::Stdout) => {
            let mut out = std::io::stdout().lock();
            out.write_all(json.as_bytes())
                .map_err(|source| RunError::Io { path: PathBuf::from("<stdout>"), source })?;
        }
        Some(JsonTarget::File(p)) => {
            write_file(p, &json)?;
            summary.push_str(&format!("report: {}\n", p.display()));
        }
        None => {
            let p = cfg.out_dir.join(built.report.file_name());
            write_file(&p, &json)?;
            summary.push_str(&format!("report: {}\n", p.display()));
        }
    }
    Ok(summary)
}

/// Runs a configuration and returns the process exit code: 0 when every
/// verdict passes, 1 when one fails, 2 for usage and input errors.
pub fn run(cfg: &RunConfig) -> i32 {
    let result = build(cfg).and_then(|built| emit(cfg, &built).map(|s| (s, built.report.passed())));
    match result {
        Ok((summary, passed)) => {
            if cfg.json == Some(JsonTarget::Stdout) {
                eprint!("{summary}");
            } else {
                print!("{summary}");
            }
            if passed {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("ogeb {}: {e}", cfg.command.name());
            e.exit_code()
        }
    }
}

pub fn main() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => run(&cli.into_config()),
        Err(e) => {
            let _ = e.print();
            if e.use_stderr() {
                2
            } else {
                0
            }
        }
    }
}
