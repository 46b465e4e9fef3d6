//! Strong nonlocality: a numeric oracle for orthogonality-preserving local
//! measurements, a symbolic engine replaying the block-zeros / block-trivial
//! argument, and qubit negative controls.

pub mod engine;
pub mod fixtures;
pub mod ledger;
pub mod oracle;
pub mod script;

use alloc::vec::Vec;

use crate::entanglement::{enumerate_bipartitions, PartySet};
use crate::error::{Error, Result};
use crate::states::{verify_orthogonal_basis, StateSet};
use crate::Verdict;

pub use engine::{run_proof_script, run_script_on, CutProof, ProofFailure, ProofReport, TraceEntry};
pub use fixtures::{ghz_basis_fixture, product_basis_fixture};
pub use ledger::{Derivation, Fact, FactKind, Lemma, OplmLedger};
pub use oracle::{
    block_norm, build_constraint_system, solve_solution_space, ConstraintSystem, SolutionSpace,
    SolveOptions, DEFAULT_MAX_ORACLE_DIM,
};
pub use script::{script_for, SetExpr, Step};

/// Which measuring sides to solve.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum CertifyMode {
    /// The `N` sides `Ā_i` obtained by leaving out one party.
    #[default]
    LeaveOneOut,
    /// `Ā_i`, then both sides of every canonical bipartition.
    FullSweep,
}

/// Measuring sides for a mode, `Ā_0 … Ā_{N−1}` first, the rest by bitmask.
pub fn measuring_sides(n: usize, mode: CertifyMode) -> Result<Vec<PartySet>> {
    let mut sides: Vec<PartySet> = (0..n).map(|i| PartySet::single(i).complement(n)).collect();
    if mode == CertifyMode::FullSweep {
        let mut rest: Vec<PartySet> = enumerate_bipartitions(n)?
            .into_iter()
            .flat_map(|c| [c.side_a(), c.side_b()])
            .filter(|s| !sides.contains(s))
            .collect();
        rest.sort();
        rest.dedup();
        sides.extend(rest);
    }
    Ok(sides)
}

/// Builds and solves the constraint system for one measuring side.
///
/// The dimension gate is checked before the system is materialized.
pub fn solve_cut(ss: &StateSet, measuring: PartySet, opts: &SolveOptions) -> Result<SolutionSpace> {
    opts.validate()?;
    let dim = (ss.local_dim() as usize).saturating_pow(measuring.len() as u32);
    if dim > opts.max_dim {
        return Err(Error::OracleDimensionExceeded { dim, max: opts.max_dim });
    }
    solve_solution_space(&build_constraint_system(ss, measuring)?, opts)
}

#[derive(Clone, Debug)]
pub struct CertificationReport {
    pub mode: CertifyMode,
    pub cuts: Vec<SolutionSpace>,
    /// First measuring side with a nontrivial solution space.
    pub verdict: Verdict<PartySet>,
}

/// Fails with [`Error::NotOrthogonal`] unless `ss` is pairwise orthogonal.
pub fn require_orthogonal(ss: &StateSet) -> Result<()> {
    match verify_orthogonal_basis(ss)?.verdict {
        Verdict::Pass => Ok(()),
        Verdict::Fail(p) => Err(Error::NotOrthogonal { a: p.a, b: p.b }),
    }
}

/// Solves every measuring side of the mode; passes iff all are trivial.
///
/// No symmetry between the cuts is assumed.
pub fn certify_strong_nonlocality(
    ss: &StateSet,
    mode: CertifyMode,
    opts: &SolveOptions,
) -> Result<CertificationReport> {
    require_orthogonal(ss)?;
    let mut cuts = Vec::new();
    let mut verdict = Verdict::Pass;
    for side in measuring_sides(ss.n_parties(), mode)? {
        let sol = solve_cut(ss, side, opts)?;
        if !sol.is_trivial && verdict.is_pass() {
            verdict = Verdict::Fail(side);
        }
        cuts.push(sol);
    }
    Ok(CertificationReport { mode, cuts, verdict })
}

/// A ledger fact whose block carries weight in a numeric solution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Disagreement {
    pub fact_id: usize,
    pub basis_index: usize,
    pub block_norm: f64,
}

/// Checks every block-zero fact of `ledger` against every basis element of
/// `space`; the two must describe the same measuring side.
pub fn ledger_respected_by(ledger: &OplmLedger, space: &SolutionSpace, tol: f64) -> Verdict<Disagreement> {
    for (basis_index, e) in space.basis_matrices().iter().enumerate() {
        for (fact_id, s, t) in ledger.block_zero_facts() {
            let norm = block_norm(e, s, t);
            if norm.is_nan() || norm >= tol {
                return Verdict::Fail(Disagreement { fact_id, basis_index, block_norm: norm });
            }
        }
    }
    Verdict::Pass
}

#[derive(Clone, Debug)]
pub struct ControlCut {
    pub measuring: PartySet,
    pub dimension: usize,
    pub trivial: bool,
    /// Whether the dimension matches what the control predicts.
    pub as_expected: bool,
}

#[derive(Clone, Debug)]
pub struct ControlReport {
    pub ghz: Vec<ControlCut>,
    pub product: ControlCut,
    /// Passes when every cut behaves as predicted.
    pub verdict: Verdict<PartySet>,
}

/// The GHZ basis must be reducible on every two-party side, and the
/// two-qubit product basis must leave exactly the diagonal of the second
/// party free.
pub fn negative_controls(opts: &SolveOptions) -> Result<ControlReport> {
    let ghz = ghz_basis_fixture();
    require_orthogonal(&ghz)?;
    let mut cuts = Vec::new();
    for side in measuring_sides(3, CertifyMode::LeaveOneOut)? {
        let sol = solve_cut(&ghz, side, opts)?;
        cuts.push(ControlCut {
            measuring: side,
            dimension: sol.dimension,
            trivial: sol.is_trivial,
            as_expected: sol.dimension > 1,
        });
    }
    let side = PartySet::single(1);
    let sol = solve_cut(&product_basis_fixture(), side, opts)?;
    let product =
        ControlCut { measuring: side, dimension: sol.dimension, trivial: sol.is_trivial, as_expected: sol.dimension == 2 };
    let verdict = match cuts.iter().chain([&product]).find(|c| !c.as_expected) {
        Some(c) => Verdict::Fail(c.measuring),
        None => Verdict::Pass,
    };
    Ok(ControlReport { ghz: cuts, product, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_ogeb, build_oges};
    use crate::tritsets::build_modified_family;
    use alloc::string::ToString;

    #[test]
    fn gate_applies_before_the_system_is_built() {
        let f = build_modified_family(8).unwrap();
        let oges = build_oges(&f).unwrap();
        let side = PartySet::single(0).complement(8);
        let err = solve_cut(&oges, side, &SolveOptions::default()).unwrap_err();
        assert_eq!(err, Error::OracleDimensionExceeded { dim: 2187, max: DEFAULT_MAX_ORACLE_DIM });
    }

    #[test]
    fn sides_for_three_parties() {
        let s = measuring_sides(3, CertifyMode::LeaveOneOut).unwrap();
        let names: Vec<_> = s.iter().map(|p| p.to_string()).collect();
        assert_eq!(names, ["{2,3}", "{1,3}", "{1,2}"]);
        let full = measuring_sides(3, CertifyMode::FullSweep).unwrap();
        assert_eq!(full.len(), 6);
        assert_eq!(measuring_sides(4, CertifyMode::FullSweep).unwrap().len(), 14);
    }

    #[test]
    fn three_party_oges_and_basis_are_strongly_nonlocal() {
        let f = build_modified_family(3).unwrap();
        for ss in [build_oges(&f).unwrap(), build_ogeb(&f).unwrap()] {
            let r = certify_strong_nonlocality(&ss, CertifyMode::FullSweep, &SolveOptions::default()).unwrap();
            assert!(r.verdict.is_pass());
            assert!(r.cuts.iter().all(|c| c.dimension == 1));
        }
    }

    #[test]
    fn engine_facts_hold_in_the_oracle() {
        let proof = run_proof_script(3).unwrap();
        let ss = build_oges(&build_modified_family(3).unwrap()).unwrap();
        for cut in &proof.cuts {
            let sol = solve_cut(&ss, cut.measuring, &SolveOptions::default()).unwrap();
            assert!(ledger_respected_by(&cut.ledger, &sol, 1e-9).is_pass());
        }
    }

    #[test]
    fn controls_behave_as_predicted() {
        let r = negative_controls(&SolveOptions::default()).unwrap();
        assert!(r.verdict.is_pass());
        assert_eq!(r.product.dimension, 2);
        assert!(r.ghz.iter().all(|c| !c.trivial));
    }

    #[test]
    fn non_orthogonal_input_rejected() {
        let mut ss = product_basis_fixture();
        ss.states.push(ss.states[0].clone());
        assert!(matches!(
            certify_strong_nonlocality(&ss, CertifyMode::LeaveOneOut, &SolveOptions::default()),
            Err(Error::NotOrthogonal { a: 0, b: 4 })
        ));
    }
}
