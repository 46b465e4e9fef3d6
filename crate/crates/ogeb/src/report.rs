//! Report records for each command and the builders that fill them.
//!
//! Builders are pure: they return the report together with any files the
//! command produces, and leave writing to the caller.

use std::fmt::Write as _;
use std::path::Path;
use std::time::Instant;

use ogeb_core::entanglement::{enumerate_bipartitions, is_one_uniform, schmidt_rank_with};
use ogeb_core::nonlocality::{
    block_norm, ledger_respected_by, measuring_sides, negative_controls, require_orthogonal,
    run_script_on, script_for, solve_cut, CertifyMode, ControlCut, SolveOptions,
};
use ogeb_core::states::{build_ogeb, build_oges, verify_orthogonal_basis, Provenance, StateSet};
use ogeb_core::tritsets::{
    build_family, build_modified_family, pow3, verify_partition, verify_permutation_invariance,
    PermutationMode, StringFamily,
};
use ogeb_core::Verdict;
use serde::Serialize;

use crate::config::{Command, RunConfig, RunError, SetVariant};
use crate::formats::{dense_to_json, family_to_json, family_to_text, state_set_to_json};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
}

impl Outcome {
    fn of(passed: bool) -> Self {
        if passed {
            Outcome::Pass
        } else {
            Outcome::Fail
        }
    }

    pub fn passed(self) -> bool {
        self == Outcome::Pass
    }

    fn word(self) -> &'static str {
        match self {
            Outcome::Pass => "PASS",
            Outcome::Fail => "FAIL",
        }
    }
}

/// A file produced by a command, named relative to the output directory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Artifact {
    pub name: String,
    pub contents: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct GenerateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub set_id: String,
    pub n_parties: usize,
    pub variant: &'static str,
    pub set_sizes: Vec<usize>,
    pub states: usize,
    pub files: Vec<String>,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyTolerances {
    pub rank: f64,
    pub one_uniform: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct PartitionSection {
    pub passed: bool,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct PermutationSection {
    pub mode: &'static str,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub tested: usize,
    pub passed: bool,
    pub violation: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeSection {
    pub set_sizes: Option<Vec<usize>>,
    pub expected_set_sizes: Option<Vec<usize>>,
    pub states: usize,
    pub expected_states: Option<usize>,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct OrthogonalitySection {
    pub pairs_checked: u64,
    pub disjoint_pairs: u64,
    pub geometric_pairs: u64,
    pub numeric_pairs: u64,
    /// Whether every zero must come from an exact path.
    pub exact_required: bool,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct LabelRecord {
    pub set_index: usize,
    pub k: u32,
}

#[derive(Clone, Debug, Serialize)]
pub struct CutRankRecord {
    pub side_a: String,
    pub rank: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct StateVerdict {
    pub label: LabelRecord,
    pub cuts: Vec<CutRankRecord>,
    pub genuine: bool,
    pub one_uniform: bool,
    pub max_deviation: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub set_id: String,
    pub n_parties: usize,
    pub variant: Option<&'static str>,
    pub tolerances: VerifyTolerances,
    pub partition: Option<PartitionSection>,
    pub permutation: Option<PermutationSection>,
    pub sizes: SizeSection,
    pub orthogonality: OrthogonalitySection,
    /// False for a single party, where no bipartition exists.
    pub entanglement_checked: bool,
    pub one_uniform_asserted: bool,
    pub states: Vec<StateVerdict>,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleTolerances {
    pub null: f64,
    pub trivial: f64,
    pub identity: f64,
    /// `None` when the dimension gate is lifted.
    pub max_oracle_dim: Option<usize>,
}

impl OracleTolerances {
    fn of(o: &SolveOptions) -> Self {
        OracleTolerances {
            null: o.null_tol,
            trivial: o.trivial_tol,
            identity: o.identity_tol,
            max_oracle_dim: (o.max_dim != usize::MAX).then_some(o.max_dim),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyCut {
    pub measuring_side: String,
    pub dim: usize,
    pub dimension: usize,
    pub trivial: bool,
    pub identity_residual: f64,
    pub proportionality_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub runtime_ms: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertifyReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub set_id: String,
    pub n_parties: usize,
    pub mode: &'static str,
    pub states: usize,
    pub tolerances: OracleTolerances,
    pub cuts: Vec<CertifyCut>,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct FailureRecord {
    pub step: usize,
    pub message: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CrossCheckRecord {
    pub dimension: usize,
    pub trivial: bool,
    pub block_zero_facts: usize,
    pub max_block_norm: f64,
    pub passed: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofCut {
    /// 1-based index of the party left out.
    pub spectator: usize,
    pub measuring_side: String,
    pub facts: usize,
    pub concludes_identity: bool,
    pub passed: bool,
    pub failure: Option<FailureRecord>,
    pub cross_check: Option<CrossCheckRecord>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TraceRecord {
    pub cut: String,
    pub step: usize,
    pub lemma: String,
    #[serde(rename = "S")]
    pub s: String,
    #[serde(rename = "T")]
    pub t: Option<String>,
    pub u0: Option<String>,
    pub witnesses: Vec<usize>,
    pub fact: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProveReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub set_id: String,
    pub n_parties: usize,
    /// `N mod 3`, which selects the script.
    pub residue: usize,
    pub dropped_set: Option<usize>,
    pub cross_check_tol: Option<f64>,
    pub cuts: Vec<ProofCut>,
    pub ledger_trace: Vec<TraceRecord>,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlRecord {
    pub measuring_side: String,
    pub dimension: usize,
    pub trivial: bool,
    pub expected: &'static str,
    pub as_expected: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ControlReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub tolerances: OracleTolerances,
    pub ghz: Vec<ControlRecord>,
    pub product: ControlRecord,
    pub verdict: Outcome,
}

#[derive(Clone, Debug, Serialize)]
#[serde(untagged)]
pub enum Report {
    Generate(GenerateReport),
    Verify(VerifyReport),
    Certify(CertifyReport),
    Prove(ProveReport),
    GhzControl(ControlReport),
}

impl Report {
    pub fn passed(&self) -> bool {
        match self {
            Report::Generate(r) => r.verdict.passed(),
            Report::Verify(r) => r.verdict.passed(),
            Report::Certify(r) => r.verdict.passed(),
            Report::Prove(r) => r.verdict.passed(),
            Report::GhzControl(r) => r.verdict.passed(),
        }
    }

    /// Name of the default report file.
    pub fn file_name(&self) -> String {
        match self {
            Report::Generate(r) => format!("generate-{}.json", r.set_id),
            Report::Verify(r) => format!("verify-{}.json", r.set_id),
            Report::Certify(r) => format!("certify-{}.json", r.set_id),
            Report::Prove(r) => format!("prove-{}.json", r.set_id),
            Report::GhzControl(_) => "ghz-control.json".into(),
        }
    }

    pub fn to_json(&self) -> String {
        let mut out = serde_json::to_string_pretty(self).expect("reports serialize");
        out.push('\n');
        out
    }

    pub fn summary(&self) -> String {
        let mut s = String::new();
        match self {
            Report::Generate(r) => {
                let _ = writeln!(s, "generate {}: {} states, set sizes {:?}", r.set_id, r.states, r.set_sizes);
                for f in &r.files {
                    let _ = writeln!(s, "  wrote {f}");
                }
            }
            Report::Verify(r) => {
                let _ = writeln!(s, "verify {}", r.set_id);
                if let Some(p) = &r.partition {
                    let _ = writeln!(s, "  partition        {}", Outcome::of(p.passed).word());
                }
                if let Some(p) = &r.permutation {
                    let _ = writeln!(
                        s,
                        "  permutations     {} ({} {} tested)",
                        Outcome::of(p.passed).word(),
                        p.tested,
                        p.mode
                    );
                }
                let _ = writeln!(s, "  sizes            {} ({} states)", Outcome::of(r.sizes.passed).word(), r.sizes.states);
                let o = &r.orthogonality;
                let _ = writeln!(
                    s,
                    "  orthogonality    {} ({} disjoint, {} geometric, {} numeric)",
                    Outcome::of(o.passed).word(),
                    o.disjoint_pairs,
                    o.geometric_pairs,
                    o.numeric_pairs
                );
                if r.entanglement_checked {
                    let genuine = r.states.iter().filter(|x| x.genuine).count();
                    let uniform = r.states.iter().filter(|x| x.one_uniform).count();
                    let _ = writeln!(s, "  genuine          {genuine}/{}", r.states.len());
                    let _ = writeln!(
                        s,
                        "  one-uniform      {uniform}/{}{}",
                        r.states.len(),
                        if r.one_uniform_asserted { "" } else { " (reported only)" }
                    );
                }
            }
            Report::Certify(r) => {
                let _ = writeln!(s, "certify {} ({}, {} states)", r.set_id, r.mode, r.states);
                for c in &r.cuts {
                    let _ = writeln!(
                        s,
                        "  measuring {:<16} d = {:<4} solution dimension {:<4} {}",
                        c.measuring_side,
                        c.dim,
                        c.dimension,
                        if c.trivial { "trivial" } else { "nontrivial" }
                    );
                }
            }
            Report::Prove(r) => {
                let _ = writeln!(s, "prove {} (N mod 3 = {})", r.set_id, r.residue);
                for c in &r.cuts {
                    let _ = write!(
                        s,
                        "  spectator {} measuring {:<16} {} facts, {}",
                        c.spectator,
                        c.measuring_side,
                        c.facts,
                        if c.passed { "concludes identity" } else { "incomplete" }
                    );
                    if let Some(f) = &c.failure {
                        let _ = write!(s, " (step {}: {})", f.step, f.message);
                    }
                    if let Some(x) = &c.cross_check {
                        let _ = write!(s, "; oracle dimension {}, max block norm {:.1e}", x.dimension, x.max_block_norm);
                    }
                    s.push('\n');
                }
            }
            Report::GhzControl(r) => {
                let _ = writeln!(s, "ghz-control");
                for c in r.ghz.iter().chain([&r.product]) {
                    let _ = writeln!(
                        s,
                        "  measuring {:<8} solution dimension {} (expected {}) {}",
                        c.measuring_side,
                        c.dimension,
                        c.expected,
                        if c.as_expected { "ok" } else { "UNEXPECTED" }
                    );
                }
            }
        }
        let _ = writeln!(s, "verdict: {}", Outcome::of(self.passed()).word());
        s
    }
}

#[derive(Clone, Debug)]
pub struct Built {
    pub report: Report,
    pub artifacts: Vec<Artifact>,
}

/// Runs the configured command and assembles its report.
pub fn build(cfg: &RunConfig) -> Result<Built, RunError> {
    cfg.validate()?;
    let no_files = |report| Built { report, artifacts: Vec::new() };
    match cfg.command {
        Command::Generate => generate(cfg),
        Command::Verify => verify(cfg).map(|r| no_files(Report::Verify(r))),
        Command::Certify => certify(cfg).map(|r| no_files(Report::Certify(r))),
        Command::Prove => prove(cfg).map(|r| no_files(Report::Prove(r))),
        Command::GhzControl => ghz_control(cfg).map(|r| no_files(Report::GhzControl(r))),
    }
}

struct Source {
    set_id: String,
    family: Option<StringFamily>,
    states: StateSet,
}

fn n_of(cfg: &RunConfig) -> usize {
    cfg.n_parties.expect("validated configs carry a party count")
}

fn family_for(variant: SetVariant, n: usize) -> Result<StringFamily, RunError> {
    Ok(match variant {
        SetVariant::Standard => build_family(n)?,
        SetVariant::Modified | SetVariant::Oges => build_modified_family(n)?,
    })
}

fn states_for(variant: SetVariant, f: &StringFamily) -> Result<StateSet, RunError> {
    Ok(match variant {
        SetVariant::Standard | SetVariant::Modified => build_ogeb(f)?,
        SetVariant::Oges => build_oges(f)?,
    })
}

fn without_set(ss: &StateSet, k: usize) -> StateSet {
    let states = ss.states.iter().filter(|s| s.label().set_index != k).cloned().collect();
    StateSet::new(states, Provenance::External)
}

fn load_source(cfg: &RunConfig) -> Result<Source, RunError> {
    if let Some(path) = &cfg.input {
        let text = read(path)?;
        let states = crate::formats::state_set_from_json(&text)?;
        if states.is_empty() {
            return Err(RunError::Usage(format!("{}: state set is empty", path.display())));
        }
        let name = path.file_name().map_or_else(|| path.display().to_string(), |f| f.to_string_lossy().into_owned());
        return Ok(Source { set_id: format!("file:{name}"), family: None, states });
    }
    let n = n_of(cfg);
    let family = family_for(cfg.variant, n)?;
    let mut states = states_for(cfg.variant, &family)?;
    let mut set_id = format!("{}-n{n}", cfg.variant.name());
    if let Some(k) = cfg.drop_set {
        states = without_set(&states, k);
        set_id.push_str(&format!("-without-set{k}"));
    }
    Ok(Source { set_id, family: Some(family), states })
}

pub(crate) fn read(path: &Path) -> Result<String, RunError> {
    std::fs::read_to_string(path).map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

/// Set sizes the construction prescribes, computed from `N` alone.
fn expected_set_sizes(variant: SetVariant, n: usize) -> Vec<usize> {
    let p = pow3(n - 1) as usize;
    match variant {
        SetVariant::Standard => vec![p; 3],
        SetVariant::Modified | SetVariant::Oges => match n % 3 {
            0 => vec![p - 3, p, p, 3],
            _ => vec![p - 1, p - 1, p, 2],
        },
    }
}

fn generate(cfg: &RunConfig) -> Result<Built, RunError> {
    let n = n_of(cfg);
    let family = family_for(cfg.variant, n)?;
    let states = states_for(cfg.variant, &family)?;
    let set_id = format!("{}-n{n}", cfg.variant.name());
    let mut artifacts = vec![
        Artifact { name: format!("{set_id}.family.txt"), contents: family_to_text(&family) },
        Artifact { name: format!("{set_id}.family.json"), contents: family_to_json(&family) },
        Artifact { name: format!("{set_id}.states.json"), contents: state_set_to_json(&states) },
    ];
    if cfg.dense {
        artifacts.push(Artifact { name: format!("{set_id}.dense.json"), contents: dense_to_json(&states) });
    }
    let report = GenerateReport {
        schema_version: SCHEMA_VERSION,
        command: Command::Generate.name(),
        set_id,
        n_parties: n,
        variant: cfg.variant.name(),
        set_sizes: family.sizes(),
        states: states.len(),
        files: artifacts.iter().map(|a| a.name.clone()).collect(),
        verdict: Outcome::Pass,
    };
    Ok(Built { report: Report::Generate(report), artifacts })
}

fn verify(cfg: &RunConfig) -> Result<VerifyReport, RunError> {
    let src = load_source(cfg)?;
    let n = src.states.n_parties();
    let built = cfg.input.is_none();

    let partition = src.family.as_ref().map(|f| {
        let v = verify_partition(f);
        PartitionSection { passed: v.is_pass(), violation: v.failure().map(|x| x.to_string()) }
    });
    let permutation = src.family.as_ref().map(|f| {
        let check = verify_permutation_invariance(f, cfg.permutations);
        let (mode, samples, seed) = match cfg.permutations {
            PermutationMode::Exhaustive => ("exhaustive", None, None),
            PermutationMode::Sampled { count, seed } => ("sampled", Some(count), Some(seed)),
        };
        PermutationSection {
            mode,
            samples,
            seed,
            tested: check.permutations_tested,
            passed: check.verdict.is_pass(),
            violation: check.verdict.failure().map(|v| {
                format!("permutation {:?} maps {} in set {} to {}", v.permutation, v.string, v.set, v.image)
            }),
        }
    });

    let set_sizes = src.family.as_ref().map(StringFamily::sizes);
    let expected_set_sizes = built.then(|| expected_set_sizes(cfg.variant, n));
    let expected_states = src.states.expected_len();
    let sizes = SizeSection {
        passed: set_sizes == expected_set_sizes && expected_states.map_or(true, |e| e == src.states.len()),
        set_sizes,
        expected_set_sizes,
        states: src.states.len(),
        expected_states,
    };

    let ortho = verify_orthogonal_basis(&src.states)?;
    let orthogonality = OrthogonalitySection {
        pairs_checked: ortho.pairs_checked,
        disjoint_pairs: ortho.disjoint_pairs,
        geometric_pairs: ortho.geometric_pairs,
        numeric_pairs: ortho.numeric_pairs,
        exact_required: built,
        passed: ortho.passed() && (!built || ortho.all_exact()),
    };

    let entanglement_checked = n >= 2;
    let one_uniform_asserted = entanglement_checked && built && cfg.variant == SetVariant::Standard;
    let mut states = Vec::new();
    if entanglement_checked {
        let cuts = enumerate_bipartitions(n)?;
        for s in &src.states.states {
            let mut records = Vec::with_capacity(cuts.len());
            for c in &cuts {
                records.push(CutRankRecord { side_a: c.side_a().to_string(), rank: schmidt_rank_with(s, c, cfg.rank_tol)? });
            }
            let uniform = is_one_uniform(s, cfg.uniform_tol)?;
            states.push(StateVerdict {
                label: LabelRecord { set_index: s.label().set_index, k: s.label().k },
                genuine: records.iter().all(|r| r.rank >= 2),
                cuts: records,
                one_uniform: uniform.verdict.is_pass(),
                max_deviation: uniform.max_deviation(),
            });
        }
    }

    let passed = partition.as_ref().map_or(true, |p| p.passed)
        && permutation.as_ref().map_or(true, |p| p.passed)
        && sizes.passed
        && orthogonality.passed
        && states.iter().all(|s| s.genuine && (s.one_uniform || !one_uniform_asserted));
    Ok(VerifyReport {
        schema_version: SCHEMA_VERSION,
        command: Command::Verify.name(),
        set_id: src.set_id,
        n_parties: n,
        variant: built.then(|| cfg.variant.name()),
        tolerances: VerifyTolerances { rank: cfg.rank_tol, one_uniform: cfg.uniform_tol },
        partition,
        permutation,
        sizes,
        orthogonality,
        entanglement_checked,
        one_uniform_asserted,
        states,
        verdict: Outcome::of(passed),
    })
}

fn mode_name(mode: CertifyMode) -> &'static str {
    match mode {
        CertifyMode::LeaveOneOut => "lemma3",
        CertifyMode::FullSweep => "full-sweep",
    }
}

fn certify(cfg: &RunConfig) -> Result<CertifyReport, RunError> {
    let src = load_source(cfg)?;
    require_orthogonal(&src.states)?;
    let n = src.states.n_parties();
    let mut cuts = Vec::new();
    for side in measuring_sides(n, cfg.mode)? {
        let start = Instant::now();
        let sol = solve_cut(&src.states, side, &cfg.solve)?;
        let elapsed = start.elapsed().as_millis() as u64;
        cuts.push(CertifyCut {
            measuring_side: side.to_string(),
            dim: sol.dim,
            dimension: sol.dimension,
            trivial: sol.is_trivial,
            identity_residual: sol.identity_residual,
            proportionality_residual: sol.proportionality_residual,
            runtime_ms: cfg.timings.then_some(elapsed),
        });
    }
    let passed = cuts.iter().all(|c| c.trivial);
    Ok(CertifyReport {
        schema_version: SCHEMA_VERSION,
        command: Command::Certify.name(),
        set_id: src.set_id,
        n_parties: n,
        mode: mode_name(cfg.mode),
        states: src.states.len(),
        tolerances: OracleTolerances::of(&cfg.solve),
        cuts,
        verdict: Outcome::of(passed),
    })
}

fn prove(cfg: &RunConfig) -> Result<ProveReport, RunError> {
    let n = n_of(cfg);
    let family = build_modified_family(n)?;
    let mut states = build_oges(&family)?;
    let mut set_id = format!("oges-n{n}");
    if let Some(k) = cfg.drop_set {
        states = without_set(&states, k);
        set_id.push_str(&format!("-without-set{k}"));
    }
    let script = script_for(family.case_tag()).expect("modified families have a case");
    let proof = run_script_on(&family, &states, script)?;

    let mut cuts = Vec::new();
    let mut ledger_trace = Vec::new();
    for c in &proof.cuts {
        let side = c.measuring.to_string();
        let cross_check = if cfg.cross_check {
            let sol = solve_cut(&states, c.measuring, &cfg.solve)?;
            let mut max_norm = 0.0f64;
            let mut count = 0;
            for e in sol.basis_matrices() {
                count = 0;
                for (_, s, t) in c.ledger.block_zero_facts() {
                    max_norm = max_norm.max(block_norm(&e, s, t));
                    count += 1;
                }
            }
            Some(CrossCheckRecord {
                dimension: sol.dimension,
                trivial: sol.is_trivial,
                block_zero_facts: count,
                max_block_norm: max_norm,
                passed: ledger_respected_by(&c.ledger, &sol, cfg.cross_check_tol).is_pass(),
            })
        } else {
            None
        };
        cuts.push(ProofCut {
            spectator: c.spectator + 1,
            measuring_side: side.clone(),
            facts: c.ledger.len(),
            concludes_identity: c.ledger.concludes_identity(),
            passed: c.verdict.is_pass(),
            failure: match &c.verdict {
                Verdict::Pass => None,
                Verdict::Fail(f) => Some(FailureRecord { step: f.step, message: f.message.clone() }),
            },
            cross_check,
        });
        ledger_trace.extend(c.trace.iter().map(|e| TraceRecord {
            cut: side.clone(),
            step: e.step,
            lemma: e.lemma.to_string(),
            s: e.s.clone(),
            t: e.t.clone(),
            u0: e.u0.clone(),
            witnesses: e.witnesses.clone(),
            fact: e.fact.clone(),
        }));
    }
    let passed = proof.passed() && cuts.iter().all(|c| c.cross_check.as_ref().map_or(true, |x| x.passed));
    Ok(ProveReport {
        schema_version: SCHEMA_VERSION,
        command: Command::Prove.name(),
        set_id,
        n_parties: n,
        residue: n % 3,
        dropped_set: cfg.drop_set,
        cross_check_tol: cfg.cross_check.then_some(cfg.cross_check_tol),
        cuts,
        ledger_trace,
        verdict: Outcome::of(passed),
    })
}

fn control_record(c: &ControlCut, expected: &'static str) -> ControlRecord {
    ControlRecord {
        measuring_side: c.measuring.to_string(),
        dimension: c.dimension,
        trivial: c.trivial,
        expected,
        as_expected: c.as_expected,
    }
}

fn ghz_control(cfg: &RunConfig) -> Result<ControlReport, RunError> {
    let r = negative_controls(&cfg.solve)?;
    Ok(ControlReport {
        schema_version: SCHEMA_VERSION,
        command: Command::GhzControl.name(),
        tolerances: OracleTolerances::of(&cfg.solve),
        ghz: r.ghz.iter().map(|c| control_record(c, "dimension > 1")).collect(),
        product: control_record(&r.product, "dimension = 2"),
        verdict: Outcome::of(r.verdict.is_pass()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prescribed_sizes_match_built_families() {
        for n in 1..=7 {
            assert_eq!(build_family(n).unwrap().sizes(), expected_set_sizes(SetVariant::Standard, n));
        }
        for n in 3..=8 {
            assert_eq!(build_modified_family(n).unwrap().sizes(), expected_set_sizes(SetVariant::Modified, n));
        }
    }

    #[test]
    fn summaries_end_with_the_verdict() {
        let built = build(&RunConfig::new(Command::GhzControl)).unwrap();
        assert!(built.report.summary().ends_with("verdict: PASS\n"));
        assert_eq!(built.report.file_name(), "ghz-control.json");
    }

    #[test]
    fn timings_are_opt_in() {
        let mut cfg = RunConfig::new(Command::Certify).with_parties(3);
        assert!(!build(&cfg).unwrap().report.to_json().contains("runtime_ms"));
        cfg.timings = true;
        assert!(build(&cfg).unwrap().report.to_json().contains("runtime_ms"));
    }

    #[test]
    fn one_party_verify_skips_entanglement() {
        let cfg = RunConfig::new(Command::Verify).with_parties(1).with_variant(SetVariant::Standard);
        let Report::Verify(r) = build(&cfg).unwrap().report else { panic!("wrong report") };
        assert!(!r.entanglement_checked);
        assert!(r.states.is_empty());
        assert!(r.verdict.passed());
    }

    #[test]
    fn dropping_the_constant_family_is_measured_not_asserted() {
        let mut cfg = RunConfig::new(Command::Certify).with_parties(3);
        cfg.drop_set = Some(3);
        let Report::Certify(r) = build(&cfg).unwrap().report else { panic!("wrong report") };
        assert_eq!(r.set_id, "oges-n3-without-set3");
        assert_eq!(r.states, 15);
        assert_eq!(r.cuts.len(), 3);
    }
}
