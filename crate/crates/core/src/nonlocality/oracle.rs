//! Linear-algebra oracle for orthogonality-preserving local measurements.
//!
//! For a state set and a measuring side `B`, every element `E` of an
//! orthogonality-preserving measurement on `B` satisfies
//! `⟨Ψ_a|(I ⊗ E)|Ψ_b⟩ = 0` for all `a ≠ b`. Each such condition is a complex
//! linear form on Hermitian `d×d` matrices; stacking the real and imaginary
//! parts and computing the nullspace gives every admissible `E`.
//!
//! Hermitian matrices are parametrized by `d²` reals: the `d` diagonal
//! entries first, then for every `u < v` in row-major order the pair
//! `(p, q)` with `E_uv = (p + iq)/√2`. The scaling makes the map an isometry
//! for the Frobenius norm, so orthonormal parameter vectors are orthonormal
//! matrices.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::FRAC_1_SQRT_2;

use nalgebra::{DMatrix, DVector};

use crate::entanglement::{Bipartition, PartySet};
use crate::error::{Error, Result};
use crate::states::{StateSet, C64};

/// Thresholds used by the nullspace solve.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolveOptions {
    /// A singular value is null at or below this fraction of the largest.
    pub null_tol: f64,
    /// A one-dimensional space is trivial when its basis element is within
    /// this distance of `I/√d`.
    pub trivial_tol: f64,
    /// Largest admissible `|⟨Ψ_a|(I⊗I)|Ψ_b⟩|` over all constraints.
    pub identity_tol: f64,
    /// Largest measuring-side dimension solved without an explicit override.
    pub max_dim: usize,
}

pub const DEFAULT_MAX_ORACLE_DIM: usize = 81;

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            null_tol: 1e-9,
            trivial_tol: 1e-9,
            identity_tol: 1e-12,
            max_dim: DEFAULT_MAX_ORACLE_DIM,
        }
    }
}

impl SolveOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = |t: f64| t > 0.0 && t.is_finite();
        if ok(self.null_tol) && ok(self.trivial_tol) && ok(self.identity_tol) {
            Ok(())
        } else {
            Err(Error::InvalidTolerance)
        }
    }
}

/// Column of the `(p, q)` pair for entry `(u, v)`, `u < v`.
fn offdiag_column(d: usize, u: usize, v: usize) -> usize {
    debug_assert!(u < v && v < d);
    d + 2 * (u * d - u * (u + 1) / 2 + (v - u - 1))
}

/// Parameter vector of a Hermitian matrix. Only the upper triangle is read.
pub fn params_from_hermitian(e: &DMatrix<C64>) -> Vec<f64> {
    let d = e.nrows();
    let mut x = vec![0.0; d * d];
    for u in 0..d {
        x[u] = e[(u, u)].re;
        for v in u + 1..d {
            let col = offdiag_column(d, u, v);
            x[col] = e[(u, v)].re / FRAC_1_SQRT_2;
            x[col + 1] = e[(u, v)].im / FRAC_1_SQRT_2;
        }
    }
    x
}

/// Inverse of [`params_from_hermitian`].
pub fn hermitian_from_params(d: usize, x: &[f64]) -> DMatrix<C64> {
    assert_eq!(x.len(), d * d, "parameter vector has wrong length");
    let mut e = DMatrix::zeros(d, d);
    for u in 0..d {
        e[(u, u)] = C64::new(x[u], 0.0);
        for v in u + 1..d {
            let col = offdiag_column(d, u, v);
            let z = C64::new(x[col], x[col + 1]) * FRAC_1_SQRT_2;
            e[(u, v)] = z;
            e[(v, u)] = z.conj();
        }
    }
    e
}

/// Parameters of `I_d`.
pub fn identity_params(d: usize) -> Vec<f64> {
    let mut x = vec![0.0; d * d];
    x[..d].fill(1.0);
    x
}

/// The stacked real constraint matrix for one measuring side.
///
/// Rows `2p` and `2p + 1` are the real and imaginary parts of the form for
/// the `p`-th unordered pair in [`ConstraintSystem::pairs`].
#[derive(Clone, Debug)]
pub struct ConstraintSystem {
    n_parties: usize,
    local_dim: u8,
    measuring: PartySet,
    dim: usize,
    pairs: Vec<(usize, usize)>,
    matrix: DMatrix<f64>,
}

impl ConstraintSystem {
    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn local_dim(&self) -> u8 {
        self.local_dim
    }

    pub fn measuring(&self) -> PartySet {
        self.measuring
    }

    /// `d`, the dimension of the measuring side.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn param_count(&self) -> usize {
        self.dim * self.dim
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.matrix
    }

    pub fn n_constraints(&self) -> usize {
        self.matrix.nrows()
    }

    /// Largest constraint violation of a parameter vector.
    pub fn residual(&self, x: &[f64]) -> f64 {
        let v = &self.matrix * DVector::from_column_slice(x);
        v.iter().fold(0.0, |m, r| m.max(r.abs()))
    }
}

/// Materializes `E ↦ ⟨Ψ_a|(I ⊗ E)|Ψ_b⟩` for every unordered pair.
pub fn build_constraint_system(ss: &StateSet, measuring: PartySet) -> Result<ConstraintSystem> {
    let n = ss.n_parties();
    let local_dim = ss.local_dim();
    for s in &ss.states {
        if s.n_parties() != n {
            return Err(Error::LengthMismatch { expected: n, found: s.n_parties() });
        }
        if s.local_dim() != local_dim {
            return Err(Error::LocalDimMismatch { expected: local_dim, found: s.local_dim() });
        }
    }
    let cut = Bipartition::new(n, measuring)?;
    let b_parties = cut.side_a().parties();
    let a_parties = cut.side_b().parties();
    let d = (local_dim as usize).pow(b_parties.len() as u32);

    // amplitudes keyed by (spectator index, measuring index), spectator-major
    let keyed: Vec<Vec<(u32, usize, C64)>> = ss
        .states
        .iter()
        .map(|s| {
            let mut v: Vec<_> = s
                .amplitudes()
                .map(|(j, a)| {
                    let x = j.project_index(&a_parties, local_dim as u32);
                    let u = j.project_index(&b_parties, local_dim as u32) as usize;
                    (x, u, a)
                })
                .collect();
            v.sort_unstable_by_key(|e| (e.0, e.1));
            v
        })
        .collect();

    let m = ss.len();
    let pairs: Vec<(usize, usize)> =
        (0..m).flat_map(|a| (a + 1..m).map(move |b| (a, b))).collect();
    let mut matrix = DMatrix::zeros(2 * pairs.len(), d * d);
    for (p, &(ia, ib)) in pairs.iter().enumerate() {
        let (ra, rb) = (2 * p, 2 * p + 1);
        let (sa, sb) = (&keyed[ia], &keyed[ib]);
        let (mut i, mut j) = (0, 0);
        while i < sa.len() && j < sb.len() {
            let (xa, xb) = (sa[i].0, sb[j].0);
            if xa < xb {
                i += 1;
                continue;
            }
            if xb < xa {
                j += 1;
                continue;
            }
            let i_end = i + sa[i..].iter().take_while(|e| e.0 == xa).count();
            let j_end = j + sb[j..].iter().take_while(|e| e.0 == xb).count();
            for &(_, u, alpha) in &sa[i..i_end] {
                for &(_, v, beta) in &sb[j..j_end] {
                    // contribution c_uv = conj(α)β multiplies E_uv
                    let z = alpha.conj() * beta;
                    if u == v {
                        matrix[(ra, u)] += z.re;
                        matrix[(rb, u)] += z.im;
                        continue;
                    }
                    let col = offdiag_column(d, u.min(v), u.max(v));
                    let sign = if u < v { 1.0 } else { -1.0 };
                    matrix[(ra, col)] += z.re * FRAC_1_SQRT_2;
                    matrix[(ra, col + 1)] -= sign * z.im * FRAC_1_SQRT_2;
                    matrix[(rb, col)] += z.im * FRAC_1_SQRT_2;
                    matrix[(rb, col + 1)] += sign * z.re * FRAC_1_SQRT_2;
                }
            }
            i = i_end;
            j = j_end;
        }
    }
    Ok(ConstraintSystem { n_parties: n, local_dim, measuring, dim: d, pairs, matrix })
}

/// The real nullspace of a constraint system.
#[derive(Clone, Debug)]
pub struct SolutionSpace {
    pub measuring: PartySet,
    pub dim: usize,
    /// Real dimension of the space of admissible Hermitian operators.
    pub dimension: usize,
    /// Orthonormal parameter vectors spanning the space.
    pub basis: Vec<Vec<f64>>,
    pub is_trivial: bool,
    /// Largest constraint violation of the identity.
    pub identity_residual: f64,
    /// Distance of the basis element from `±I/√d` when the space is
    /// one-dimensional.
    pub proportionality_residual: Option<f64>,
}

impl SolutionSpace {
    /// Basis elements as Hermitian matrices.
    pub fn basis_matrices(&self) -> Vec<DMatrix<C64>> {
        self.basis.iter().map(|x| hermitian_from_params(self.dim, x)).collect()
    }
}

/// Nullspace via a QR reduction followed by an SVD of the triangular factor.
pub fn solve_solution_space(cs: &ConstraintSystem, opts: &SolveOptions) -> Result<SolutionSpace> {
    opts.validate()?;
    let d = cs.dim;
    if d > opts.max_dim {
        return Err(Error::OracleDimensionExceeded { dim: d, max: opts.max_dim });
    }
    let n = d * d;
    let identity_residual = cs.residual(&identity_params(d));

    let rows: Vec<usize> = (0..cs.matrix.nrows())
        .filter(|&r| cs.matrix.row(r).iter().any(|&x| x != 0.0))
        .collect();
    let mut a = cs.matrix.select_rows(rows.iter());
    if a.nrows() < n {
        a = a.resize_vertically(n, 0.0);
    }
    let r = a.qr().r();
    let svd = r.svd(false, true);
    let v_t = svd.v_t.expect("right singular vectors were requested");
    let sigma = &svd.singular_values;
    let smax = sigma.iter().copied().fold(0.0, f64::max);
    let threshold = opts.null_tol * smax;
    let mut basis: Vec<Vec<f64>> = (0..sigma.len())
        .filter(|&i| sigma[i] <= threshold)
        .map(|i| v_t.row(i).iter().copied().collect())
        .collect();
    for x in &mut basis {
        // fix the sign so repeated runs agree
        if let Some(&lead) = x.iter().find(|v| v.abs() > 1e-12) {
            if lead < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
        }
    }

    let proportionality_residual = (basis.len() == 1).then(|| {
        let x = &basis[0];
        let scale = 1.0 / libm::sqrt(d as f64);
        let overlap: f64 = x[..d].iter().sum::<f64>() * scale;
        let mut r2 = 0.0;
        for (i, v) in x.iter().enumerate() {
            let target = if i < d { overlap * scale } else { 0.0 };
            r2 += (v - target) * (v - target);
        }
        libm::sqrt(r2)
    });
    let is_trivial = proportionality_residual.is_some_and(|r| r < opts.trivial_tol);
    Ok(SolutionSpace {
        measuring: cs.measuring,
        dim: d,
        dimension: basis.len(),
        basis,
        is_trivial,
        identity_residual,
        proportionality_residual,
    })
}

/// Frobenius norm of the `S × T` block of `e`.
pub fn block_norm(e: &DMatrix<C64>, rows: &[u32], cols: &[u32]) -> f64 {
    let mut s = 0.0;
    for &r in rows {
        for &c in cols {
            s += e[(r as usize, c as usize)].norm_sqr();
        }
    }
    libm::sqrt(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nonlocality::fixtures::{ghz_basis_fixture, product_basis_fixture};
    use crate::states::build_oges;
    use crate::tritsets::build_modified_family;

    #[test]
    fn parametrization_round_trip() {
        let mut e = DMatrix::zeros(3, 3);
        e[(0, 0)] = C64::new(1.5, 0.0);
        e[(1, 1)] = C64::new(-2.0, 0.0);
        e[(0, 2)] = C64::new(0.25, -0.75);
        e[(2, 0)] = C64::new(0.25, 0.75);
        e[(1, 2)] = C64::new(0.0, 1.0);
        e[(2, 1)] = C64::new(0.0, -1.0);
        let x = params_from_hermitian(&e);
        assert_eq!(hermitian_from_params(3, &x), e);
        let frob: f64 = e.iter().map(|z| z.norm_sqr()).sum();
        let eucl: f64 = x.iter().map(|v| v * v).sum();
        assert!((frob - eucl).abs() < 1e-12);
        assert_eq!(offdiag_column(3, 0, 1), 3);
        assert_eq!(offdiag_column(3, 0, 2), 5);
        assert_eq!(offdiag_column(3, 1, 2), 7);
    }

    #[test]
    fn oges_three_parties_counts_and_triviality() {
        let ss = build_oges(&build_modified_family(3).unwrap()).unwrap();
        let cs = build_constraint_system(&ss, PartySet::from_parties(&[1, 2])).unwrap();
        assert_eq!(cs.pairs().len(), 153);
        assert_eq!(cs.n_constraints(), 306);
        assert_eq!(cs.param_count(), 81);
        let sol = solve_solution_space(&cs, &SolveOptions::default()).unwrap();
        assert!(sol.identity_residual < 1e-12);
        assert_eq!(sol.dimension, 1);
        assert!(sol.is_trivial);
    }

    #[test]
    fn product_basis_leaves_diagonal_free() {
        let ss = product_basis_fixture();
        let cs = build_constraint_system(&ss, PartySet::single(1)).unwrap();
        let sol = solve_solution_space(&cs, &SolveOptions::default()).unwrap();
        assert_eq!(sol.dimension, 2);
        assert!(!sol.is_trivial);
        for e in sol.basis_matrices() {
            assert!(e[(0, 1)].norm_sqr() < 1e-20);
        }
    }

    #[test]
    fn ghz_two_party_side_is_reducible() {
        let ss = ghz_basis_fixture();
        let cs = build_constraint_system(&ss, PartySet::from_parties(&[1, 2])).unwrap();
        let sol = solve_solution_space(&cs, &SolveOptions::default()).unwrap();
        assert!(sol.dimension > 1);
    }

    #[test]
    fn dimension_gate() {
        let ss = build_oges(&build_modified_family(3).unwrap()).unwrap();
        let cs = build_constraint_system(&ss, PartySet::from_parties(&[1, 2])).unwrap();
        let opts = SolveOptions { max_dim: 8, ..SolveOptions::default() };
        assert_eq!(
            solve_solution_space(&cs, &opts).unwrap_err(),
            Error::OracleDimensionExceeded { dim: 9, max: 8 }
        );
    }
}
