//! Bipartitions, Schmidt ranks and single-party reduced densities.
//!
//! Parties are indexed from 0 in the API and printed from 1.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::states::{modulus, PhasedState, C64};
use crate::tritsets::MAX_PARTIES;
use crate::Verdict;

/// A singular value counts as nonzero above this fraction of
/// `max(σ_max, 1)`.
pub const RANK_TOL: f64 = 1e-9;

/// Default entry-wise tolerance for one-uniformity.
pub const ONE_UNIFORM_TOL: f64 = 1e-12;

/// A set of party indices stored as a bitmask; bit `p` is party `p`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct PartySet(u32);

impl PartySet {
    pub const EMPTY: PartySet = PartySet(0);

    pub fn from_mask(mask: u32) -> Self {
        PartySet(mask)
    }

    pub fn from_parties(parties: &[usize]) -> Self {
        PartySet(parties.iter().fold(0, |m, &p| m | (1 << p)))
    }

    /// `{0, …, n−1}`.
    pub fn all(n: usize) -> Self {
        PartySet(((1u64 << n) - 1) as u32)
    }

    pub fn single(party: usize) -> Self {
        PartySet(1 << party)
    }

    pub fn mask(&self) -> u32 {
        self.0
    }

    pub fn contains(&self, party: usize) -> bool {
        party < 32 && self.0 & (1 << party) != 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    /// Members in increasing order.
    pub fn parties(&self) -> Vec<usize> {
        (0..32).filter(|&p| self.contains(p)).collect()
    }

    pub fn complement(&self, n: usize) -> Self {
        PartySet(!self.0 & PartySet::all(n).0)
    }
}

impl fmt::Display for PartySet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("{")?;
        for (i, p) in self.parties().into_iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", p + 1)?;
        }
        f.write_str("}")
    }
}

/// An ordered split of the parties into `side_a` and its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Bipartition {
    n_parties: usize,
    side_a: PartySet,
}

impl Bipartition {
    pub fn new(n_parties: usize, side_a: PartySet) -> Result<Self> {
        if n_parties == 0 {
            return Err(Error::ZeroParties);
        }
        if n_parties > MAX_PARTIES {
            return Err(Error::TooManyParties { requested: n_parties, max: MAX_PARTIES });
        }
        if let Some(&p) = side_a.parties().iter().find(|&&p| p >= n_parties) {
            return Err(Error::PartyOutOfRange { party: p, n_parties });
        }
        if side_a.is_empty() || side_a == PartySet::all(n_parties) {
            return Err(Error::DegenerateBipartition);
        }
        Ok(Bipartition { n_parties, side_a })
    }

    pub fn from_parties(n_parties: usize, side_a: &[usize]) -> Result<Self> {
        if let Some(&p) = side_a.iter().find(|&&p| p >= n_parties) {
            return Err(Error::PartyOutOfRange { party: p, n_parties });
        }
        Bipartition::new(n_parties, PartySet::from_parties(side_a))
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn side_a(&self) -> PartySet {
        self.side_a
    }

    pub fn side_b(&self) -> PartySet {
        self.side_a.complement(self.n_parties)
    }

    /// The same split with the sides swapped.
    pub fn mirror(&self) -> Self {
        Bipartition { n_parties: self.n_parties, side_a: self.side_b() }
    }

    /// Canonical cuts put party 0 on side A.
    pub fn is_canonical(&self) -> bool {
        self.side_a.contains(0)
    }

    pub fn canonical(&self) -> Self {
        if self.is_canonical() {
            *self
        } else {
            self.mirror()
        }
    }
}

impl fmt::Display for Bipartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}|{}", self.side_a, self.side_b())
    }
}

/// All `2^{N−1} − 1` canonical bipartitions, ordered by side-A bitmask.
pub fn enumerate_bipartitions(n: usize) -> Result<Vec<Bipartition>> {
    if n < 2 {
        return Err(Error::TooFewParties { requested: n, min: 2 });
    }
    if n > MAX_PARTIES {
        return Err(Error::TooManyParties { requested: n, max: MAX_PARTIES });
    }
    let full = PartySet::all(n).mask();
    Ok((1..full)
        .step_by(2)
        .map(|mask| Bipartition { n_parties: n, side_a: PartySet(mask) })
        .collect())
}

/// `ψ_{a,b}` with rows indexed by side-A strings and columns by side-B
/// strings, both read in increasing party order in base `local_dim`.
pub fn coefficient_matrix(s: &PhasedState, cut: &Bipartition) -> Result<DMatrix<C64>> {
    if s.n_parties() != cut.n_parties() {
        return Err(Error::LengthMismatch { expected: cut.n_parties(), found: s.n_parties() });
    }
    let d = s.local_dim() as u32;
    let rows_p = cut.side_a().parties();
    let cols_p = cut.side_b().parties();
    let mut m = DMatrix::zeros(d.pow(rows_p.len() as u32) as usize, d.pow(cols_p.len() as u32) as usize);
    for (j, amp) in s.amplitudes() {
        let r = j.project_index(&rows_p, d) as usize;
        let c = j.project_index(&cols_p, d) as usize;
        m[(r, c)] = amp;
    }
    Ok(m)
}

/// Numerical rank of a matrix under [`RANK_TOL`]-style relative tolerance.
pub fn matrix_rank(m: DMatrix<C64>, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    // singular values of the shorter orientation are the same and cheaper
    let m = if m.nrows() > m.ncols() { m.adjoint() } else { m };
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    let thr = rel_tol * smax.max(1.0);
    sv.iter().filter(|&&x| x > thr).count()
}

pub fn schmidt_rank(s: &PhasedState, cut: &Bipartition) -> Result<usize> {
    schmidt_rank_with(s, cut, RANK_TOL)
}

pub fn schmidt_rank_with(s: &PhasedState, cut: &Bipartition, rel_tol: f64) -> Result<usize> {
    if !(rel_tol > 0.0 && rel_tol.is_finite()) {
        return Err(Error::InvalidTolerance);
    }
    Ok(matrix_rank(coefficient_matrix(s, cut)?, rel_tol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CutRank {
    pub cut: Bipartition,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EntanglementReport {
    pub cuts: Vec<CutRank>,
    /// First canonical cut of rank 1.
    pub verdict: Verdict<Bipartition>,
}

/// Schmidt rank on every canonical cut; passes iff all ranks are ≥ 2.
pub fn is_genuinely_entangled(s: &PhasedState) -> Result<EntanglementReport> {
    let mut cuts = Vec::new();
    let mut verdict = Verdict::Pass;
    for cut in enumerate_bipartitions(s.n_parties())? {
        let rank = schmidt_rank(s, &cut)?;
        if rank < 2 && verdict.is_pass() {
            verdict = Verdict::Fail(cut);
        }
        cuts.push(CutRank { cut, rank });
    }
    Ok(EntanglementReport { cuts, verdict })
}

/// `Tr_{others}(|ψ⟩⟨ψ|) / ⟨ψ|ψ⟩` for one party, as a `d×d` matrix.
///
/// Built from the sparse support: amplitudes are grouped by the string on
/// the remaining parties, and only strings within one group interfere.
pub fn reduced_density(s: &PhasedState, party: usize) -> Result<DMatrix<C64>> {
    let n = s.n_parties();
    if party >= n {
        return Err(Error::PartyOutOfRange { party, n_parties: n });
    }
    let d = s.local_dim() as usize;
    let mut rho = DMatrix::zeros(d, d);
    if n == 1 {
        for (j, a) in s.amplitudes() {
            for (k, b) in s.amplitudes() {
                rho[(j.trit(0) as usize, k.trit(0) as usize)] += a * b.conj();
            }
        }
    } else {
        let mut groups: BTreeMap<u32, Vec<(usize, C64)>> = BTreeMap::new();
        for (j, a) in s.amplitudes() {
            groups.entry(j.remove(party).index()).or_default().push((j.trit(party) as usize, a));
        }
        for g in groups.values() {
            for &(t, a) in g {
                for &(u, b) in g {
                    rho[(t, u)] += a * b.conj();
                }
            }
        }
    }
    Ok(rho / C64::new(s.norm_sqr(), 0.0))
}

/// Largest entry-wise deviation of a reduced density from `I/d`.
pub fn deviation_from_maximally_mixed(rho: &DMatrix<C64>) -> f64 {
    let d = rho.nrows();
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in 0..rho.ncols() {
            let target = if r == c { 1.0 / d as f64 } else { 0.0 };
            worst = worst.max(modulus(rho[(r, c)] - C64::new(target, 0.0)));
        }
    }
    worst
}

#[derive(Clone, Debug, PartialEq)]
pub struct UniformityReport {
    /// Per-party maximal entry-wise deviation from `I/d`.
    pub deviations: Vec<f64>,
    /// First party whose deviation exceeds the tolerance.
    pub verdict: Verdict<usize>,
}

impl UniformityReport {
    pub fn max_deviation(&self) -> f64 {
        self.deviations.iter().copied().fold(0.0, f64::max)
    }
}

/// Passes iff every single-party reduced density is within `tol` of `I/d`.
pub fn is_one_uniform(s: &PhasedState, tol: f64) -> Result<UniformityReport> {
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(Error::InvalidTolerance);
    }
    let mut deviations = Vec::with_capacity(s.n_parties());
    let mut verdict = Verdict::Pass;
    for p in 0..s.n_parties() {
        let dev = deviation_from_maximally_mixed(&reduced_density(s, p)?);
        if dev > tol && verdict.is_pass() {
            verdict = Verdict::Fail(p);
        }
        deviations.push(dev);
    }
    Ok(UniformityReport { deviations, verdict })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{build_ogeb, build_state, StateLabel};
    use crate::tritsets::{build_family, build_modified_family, TritString};
    use alloc::string::ToString;
    use alloc::vec;

    fn ts(s: &str) -> TritString {
        s.parse().unwrap()
    }

    fn state(strings: &[&str]) -> PhasedState {
        let v: Vec<_> = strings.iter().map(|s| ts(s)).collect();
        build_state(&v, 0).unwrap()
    }

    #[test]
    fn canonical_cuts_small() {
        let cuts = enumerate_bipartitions(3).unwrap();
        let names: Vec<_> = cuts.iter().map(|c| c.to_string()).collect();
        assert_eq!(names, vec!["{1}|{2,3}", "{1,2}|{3}", "{1,3}|{2}"]);
        assert_eq!(enumerate_bipartitions(4).unwrap().len(), 7);
        assert_eq!(enumerate_bipartitions(2).unwrap().len(), 1);
        assert!(enumerate_bipartitions(1).is_err());
    }

    #[test]
    fn bipartition_validation() {
        assert_eq!(Bipartition::from_parties(3, &[]), Err(Error::DegenerateBipartition));
        assert_eq!(Bipartition::from_parties(3, &[0, 1, 2]), Err(Error::DegenerateBipartition));
        assert_eq!(
            Bipartition::from_parties(3, &[3]),
            Err(Error::PartyOutOfRange { party: 3, n_parties: 3 })
        );
        let c = Bipartition::from_parties(3, &[1, 2]).unwrap();
        assert!(!c.is_canonical());
        assert_eq!(c.canonical().to_string(), "{1}|{2,3}");
    }

    #[test]
    fn coefficient_matrix_of_trivial_phase_state() {
        let f = build_family(3).unwrap();
        let s = build_state(f.set(0), 0).unwrap();
        let cut = Bipartition::from_parties(3, &[0]).unwrap();
        let m = coefficient_matrix(&s, &cut).unwrap();
        assert_eq!(m.shape(), (3, 9));
        let mut seen_cols = [false; 9];
        for r in 0..3 {
            let cols: Vec<_> = (0..9).filter(|&c| modulus(m[(r, c)]) > 0.0).collect();
            assert_eq!(cols.len(), 3);
            for c in cols {
                assert_eq!(m[(r, c)], C64::new(1.0, 0.0));
                assert!(!seen_cols[c]);
                seen_cols[c] = true;
            }
        }
        assert_eq!(schmidt_rank(&s, &cut).unwrap(), 3);
    }

    #[test]
    fn product_and_ghz_ranks() {
        let product = state(&["000"]);
        let ghz = state(&["000", "111", "222"]);
        for cut in enumerate_bipartitions(3).unwrap() {
            assert_eq!(schmidt_rank(&product, &cut).unwrap(), 1);
            assert_eq!(schmidt_rank(&ghz, &cut).unwrap(), 3);
        }
        let m = coefficient_matrix(&ghz, &enumerate_bipartitions(3).unwrap()[0]).unwrap();
        assert_eq!(m.iter().filter(|z| modulus(**z) > 0.0).count(), 3);
    }

    #[test]
    fn partially_entangled_state_fails_first_cut() {
        let s = state(&["000", "011"]);
        let r = is_genuinely_entangled(&s).unwrap();
        assert_eq!(r.verdict, Verdict::Fail(Bipartition::from_parties(3, &[0]).unwrap()));
        assert_eq!(r.cuts.iter().map(|c| c.rank).collect::<Vec<_>>(), vec![1, 2, 2]);
    }

    #[test]
    fn small_bases_are_genuinely_entangled() {
        for f in [build_family(3).unwrap(), build_modified_family(4).unwrap()] {
            for s in &build_ogeb(&f).unwrap().states {
                assert!(is_genuinely_entangled(s).unwrap().verdict.is_pass());
            }
        }
    }

    #[test]
    fn reduced_density_examples() {
        let f = build_family(3).unwrap();
        let s = build_state(f.set(0), 0).unwrap();
        assert!(deviation_from_maximally_mixed(&reduced_density(&s, 0).unwrap()) < 1e-15);

        let rho = reduced_density(&state(&["000"]), 1).unwrap();
        assert_eq!(rho[(0, 0)], C64::new(1.0, 0.0));
        assert!(rho.iter().skip(1).all(|z| *z == C64::new(0.0, 0.0)));

        let ghz = build_state(build_modified_family(3).unwrap().set(3), 0).unwrap();
        assert!(is_one_uniform(&ghz, ONE_UNIFORM_TOL).unwrap().verdict.is_pass());
        assert_eq!(is_one_uniform(&state(&["000"]), ONE_UNIFORM_TOL).unwrap().verdict, Verdict::Fail(0));
        assert_eq!(is_one_uniform(&ghz, 0.0), Err(Error::InvalidTolerance));
    }

    #[test]
    fn reduced_density_keeps_coherences() {
        // (|0⟩ + |1⟩)|0⟩ ⊗ ... has off-diagonal weight on party 0
        let s = PhasedState::new(
            2,
            2,
            1,
            vec![(ts("00"), 0), (ts("10"), 0)],
            StateLabel::default(),
        )
        .unwrap();
        let rho = reduced_density(&s, 0).unwrap();
        assert!(modulus(rho[(0, 1)] - C64::new(0.5, 0.0)) < 1e-15);
        assert!(modulus(rho[(1, 1)] - C64::new(0.5, 0.0)) < 1e-15);
    }
}
