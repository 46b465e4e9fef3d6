//! Brute-force reference computations shared by the integration tests.
//!
//! Nothing here calls into the crate's own linear algebra or index
//! helpers: strings are decoded digit by digit and ranks come from plain
//! Gaussian elimination.

#![allow(dead_code)]

use ogeb_core::{PhasedState, TritString, C64};

/// Digits of `index` in base `radix`, most significant first.
pub fn digits(mut index: usize, radix: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = index % radix;
        index /= radix;
    }
    out
}

pub fn undigits(ds: &[usize], radix: usize) -> usize {
    ds.iter().fold(0, |acc, &d| acc * radix + d)
}

pub fn string_digits(s: &TritString) -> Vec<usize> {
    s.to_string().bytes().map(|b| (b - b'0') as usize).collect()
}

/// The state as a dense vector, amplitudes computed from the exponents.
pub fn dense(s: &PhasedState) -> Vec<C64> {
    let d = s.local_dim() as usize;
    let mut v = vec![C64::new(0.0, 0.0); d.pow(s.n_parties() as u32)];
    for (j, e) in s.entries() {
        let theta = 2.0 * std::f64::consts::PI * e as f64 / s.order() as f64;
        v[undigits(&string_digits(&j), d)] = C64::new(theta.cos(), theta.sin());
    }
    v
}

pub fn abs(z: C64) -> f64 {
    z.re.hypot(z.im)
}

pub fn dot(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Rank by Gaussian elimination with partial pivoting.
pub fn rank_complex(mut m: Vec<Vec<C64>>, tol: f64) -> usize {
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows).max_by(|&a, &b| abs(m[a][c]).total_cmp(&abs(m[b][c]))) else {
            break;
        };
        if abs(m[p][c]) <= tol {
            continue;
        }
        m.swap(rank, p);
        let pivot = m[rank][c];
        for r in 0..rows {
            if r != rank {
                let f = m[r][c] / pivot;
                if abs(f) > 0.0 {
                    for k in c..cols {
                        let sub = f * m[rank][k];
                        m[r][k] -= sub;
                    }
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn rank_real(m: &[Vec<f64>], tol: f64) -> usize {
    rank_complex(
        m.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect(),
        tol,
    )
}

/// Splits a full index into the indices on `side` and on the remaining
/// parties, both read in increasing party order.
pub fn split_index(index: usize, d: usize, n: usize, side: &[usize]) -> (usize, usize) {
    let ds = digits(index, d, n);
    let on: Vec<usize> = (0..n).filter(|p| side.contains(p)).map(|p| ds[p]).collect();
    let off: Vec<usize> = (0..n).filter(|p| !side.contains(p)).map(|p| ds[p]).collect();
    (undigits(&on, d), undigits(&off, d))
}
