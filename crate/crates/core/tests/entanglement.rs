mod common;

use common::{abs, dense, rank_complex, split_index};
use ogeb_core::entanglement::{
    coefficient_matrix, enumerate_bipartitions, is_genuinely_entangled, is_one_uniform, reduced_density,
    schmidt_rank, Bipartition, PartySet, ONE_UNIFORM_TOL,
};
use ogeb_core::states::{build_oges, PhasedState, C64};
use ogeb_core::tritsets::{build_family, build_modified_family};
use ogeb_core::build_ogeb;
use proptest::prelude::*;

fn dense_matrix(s: &PhasedState, side: &[usize]) -> Vec<Vec<C64>> {
    let n = s.n_parties();
    let d = s.local_dim() as usize;
    let rows = d.pow(side.len() as u32);
    let cols = d.pow((n - side.len()) as u32);
    let mut m = vec![vec![C64::new(0.0, 0.0); cols]; rows];
    for (i, a) in dense(s).into_iter().enumerate() {
        let (r, c) = split_index(i, d, n, side);
        m[r][c] = a;
    }
    m
}

/// `Tr_{others}(|ψ⟩⟨ψ|)/⟨ψ|ψ⟩` from the full vector.
fn dense_reduced(s: &PhasedState, party: usize) -> Vec<Vec<C64>> {
    let m = dense_matrix(s, &[party]);
    let norm: f64 = m.iter().flatten().map(|z| z.norm_sqr()).sum();
    let d = m.len();
    let mut rho = vec![vec![C64::new(0.0, 0.0); d]; d];
    for t in 0..d {
        for u in 0..d {
            rho[t][u] = m[t].iter().zip(&m[u]).map(|(a, b)| a * b.conj()).sum::<C64>() / norm;
        }
    }
    rho
}

fn sample_states() -> Vec<PhasedState> {
    let mut out = Vec::new();
    out.extend(build_ogeb(&build_family(3).unwrap()).unwrap().states);
    out.extend(build_ogeb(&build_modified_family(3).unwrap()).unwrap().states);
    out.extend(build_oges(&build_modified_family(4).unwrap()).unwrap().states.into_iter().step_by(5));
    out
}

#[test]
fn coefficient_matrices_match_reshaped_vectors() {
    for s in sample_states() {
        for cut in enumerate_bipartitions(s.n_parties()).unwrap() {
            let side = cut.side_a().parties();
            let reference = dense_matrix(&s, &side);
            let m = coefficient_matrix(&s, &cut).unwrap();
            for (r, row) in reference.iter().enumerate() {
                for (c, z) in row.iter().enumerate() {
                    assert!(abs(m[(r, c)] - z) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn ranks_match_gaussian_elimination() {
    for s in sample_states() {
        for cut in enumerate_bipartitions(s.n_parties()).unwrap() {
            let reference = rank_complex(dense_matrix(&s, &cut.side_a().parties()), 1e-9);
            assert_eq!(schmidt_rank(&s, &cut).unwrap(), reference);
        }
    }
}

#[test]
fn reduced_densities_match_partial_trace() {
    for s in sample_states() {
        for p in 0..s.n_parties() {
            let reference = dense_reduced(&s, p);
            let rho = reduced_density(&s, p).unwrap();
            for t in 0..3 {
                for u in 0..3 {
                    assert!(abs(rho[(t, u)] - reference[t][u]) < 1e-12);
                }
            }
        }
    }
}

#[test]
fn standard_single_party_ranks_are_full() {
    for n in 3..=5 {
        for s in &build_ogeb(&build_family(n).unwrap()).unwrap().states {
            let r = is_genuinely_entangled(s).unwrap();
            assert!(r.verdict.is_pass());
            for c in r.cuts.iter().filter(|c| c.cut.side_a().len() == 1 || c.cut.side_b().len() == 1) {
                assert_eq!(c.rank, 3, "{}", c.cut);
            }
        }
    }
}

#[test]
fn standard_states_are_one_uniform() {
    for n in 3..=4 {
        for s in &build_ogeb(&build_family(n).unwrap()).unwrap().states {
            let r = is_one_uniform(s, ONE_UNIFORM_TOL).unwrap();
            assert!(r.verdict.is_pass(), "max deviation {}", r.max_deviation());
        }
    }
}

proptest! {
    #[test]
    fn rank_is_mirror_symmetric_and_norm_is_kept(
        n in 3usize..=5,
        set in 0usize..3,
        k in any::<u32>(),
        mask in any::<u32>(),
        modified in any::<bool>(),
    ) {
        let f = if modified { build_modified_family(n).unwrap() } else { build_family(n).unwrap() };
        let strings = f.set(set);
        let s = ogeb_core::build_state(strings, k % strings.len() as u32).unwrap();
        let full = (1u32 << n) - 1;
        let side = 1 + mask % (full - 1);
        let cut = Bipartition::new(n, PartySet::from_mask(side)).unwrap();
        prop_assert_eq!(schmidt_rank(&s, &cut).unwrap(), schmidt_rank(&s, &cut.mirror()).unwrap());
        let m = coefficient_matrix(&s, &cut).unwrap();
        let frob: f64 = m.iter().map(|z| z.norm_sqr()).sum();
        prop_assert!((frob - s.norm_sqr()).abs() < 1e-9);
        prop_assert_eq!(m.nrows() * m.ncols(), 3usize.pow(n as u32));
    }
}
