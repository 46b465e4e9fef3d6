//! Phased superpositions over string sets and exact orthogonality decisions.
//!
//! A state built from a set of `s` strings with phase index `k` is
//!
//! ```text
//! |Ψ_k⟩ = Σ_j ω_s^{k·r(j)} |j⟩,   ω_s = exp(2πi/s)
//! ```
//!
//! where `r(j)` is the lexicographic rank of `j` in the set. States are never
//! normalized. Amplitudes are kept as integer exponents over a root-of-unity
//! order so inner products can be decided exactly whenever the exponent
//! multiset is a union of complete cosets.

use alloc::collections::BTreeMap;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;

use nalgebra::Complex;

use crate::error::{Error, Result};
use crate::tritsets::{verify_partition, StringFamily, TritString, Variant};
use crate::Verdict;

pub type C64 = Complex<f64>;

/// Relative tolerance for inner products that miss every symbolic zero path.
pub const NUMERIC_ZERO_TOL: f64 = 1e-12;

/// `|z|`, computed without the `std` float intrinsics.
pub fn modulus(z: C64) -> f64 {
    libm::hypot(z.re, z.im)
}

/// `ω_order^exponent`.
pub fn root_of_unity(exponent: u64, order: u64) -> C64 {
    if order == 0 || exponent % order == 0 {
        return C64::new(1.0, 0.0);
    }
    let (s, c) = libm::sincos(2.0 * PI * (exponent % order) as f64 / order as f64);
    C64::new(c, s)
}

/// Which set and which phase index a state was built from.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct StateLabel {
    pub set_index: usize,
    pub k: u32,
}

/// Exponents of the form `offset + slope·r (mod order)` in support order.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
struct AffinePhase {
    offset: u32,
    slope: u32,
}

/// A sparse unnormalized state `Σ_j ω_order^{e_j} |j⟩`.
#[derive(Clone, Debug)]
pub struct PhasedState {
    n_parties: usize,
    local_dim: u8,
    order: u32,
    support: Arc<[TritString]>,
    exponents: Vec<u32>,
    label: StateLabel,
    affine: Option<AffinePhase>,
}

impl PartialEq for PhasedState {
    fn eq(&self, other: &Self) -> bool {
        self.n_parties == other.n_parties
            && self.local_dim == other.local_dim
            && self.order == other.order
            && self.label == other.label
            && self.exponents == other.exponents
            && self.support[..] == other.support[..]
    }
}

impl PhasedState {
    /// General constructor. Entries are sorted by string; every invariant of
    /// the type is checked.
    pub fn new(
        n_parties: usize,
        local_dim: u8,
        order: u32,
        mut entries: Vec<(TritString, u32)>,
        label: StateLabel,
    ) -> Result<Self> {
        if order == 0 {
            return Err(Error::ZeroOrder);
        }
        if entries.is_empty() {
            return Err(Error::EmptySupport);
        }
        if !(2..=3).contains(&local_dim) {
            return Err(Error::InvalidDigit { digit: local_dim, local_dim: 3 });
        }
        entries.sort_unstable_by_key(|e| e.0);
        for (i, (s, e)) in entries.iter().enumerate() {
            if s.len() != n_parties {
                return Err(Error::LengthMismatch { expected: n_parties, found: s.len() });
            }
            if let Some(bad) = s.trits().into_iter().find(|&t| t >= local_dim) {
                return Err(Error::InvalidDigit { digit: bad, local_dim });
            }
            if *e >= order {
                return Err(Error::ExponentOutOfRange { exponent: *e, order });
            }
            if i > 0 && entries[i - 1].0 == *s {
                return Err(Error::DuplicateSupport(*s));
            }
        }
        let (support, exponents): (Vec<_>, Vec<_>) = entries.into_iter().unzip();
        Ok(Self::from_parts(n_parties, local_dim, order, support.into(), exponents, label))
    }

    fn from_parts(
        n_parties: usize,
        local_dim: u8,
        order: u32,
        support: Arc<[TritString]>,
        exponents: Vec<u32>,
        label: StateLabel,
    ) -> Self {
        let affine = detect_affine(&exponents, order);
        PhasedState { n_parties, local_dim, order, support, exponents, label, affine }
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn local_dim(&self) -> u8 {
        self.local_dim
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn label(&self) -> StateLabel {
        self.label
    }

    pub fn with_label(mut self, label: StateLabel) -> Self {
        self.label = label;
        self
    }

    /// Support strings in lexicographic order.
    pub fn support(&self) -> &[TritString] {
        &self.support
    }

    pub fn shares_support_with(&self, other: &PhasedState) -> bool {
        Arc::ptr_eq(&self.support, &other.support) || self.support[..] == other.support[..]
    }

    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn entries(&self) -> impl Iterator<Item = (TritString, u32)> + '_ {
        self.support.iter().copied().zip(self.exponents.iter().copied())
    }

    /// `(string, amplitude)` pairs.
    pub fn amplitudes(&self) -> impl Iterator<Item = (TritString, C64)> + '_ {
        let order = self.order as u64;
        self.entries().map(move |(s, e)| (s, root_of_unity(e as u64, order)))
    }

    /// Exponent attached to `s`, if `s` is in the support.
    pub fn exponent_of(&self, s: &TritString) -> Option<u32> {
        self.support.binary_search(s).ok().map(|i| self.exponents[i])
    }

    /// `⟨ψ|ψ⟩`: every amplitude has unit modulus.
    pub fn norm_sqr(&self) -> f64 {
        self.support.len() as f64
    }

    /// Index of the computational basis vector for a digit string, base `d`.
    pub fn dense_index(&self, s: &TritString) -> usize {
        let d = self.local_dim as usize;
        (0..self.n_parties).fold(0usize, |acc, p| acc * d + s.trit(p) as usize)
    }

    /// Full amplitude vector of length `d^N`.
    pub fn to_dense(&self) -> Vec<C64> {
        let dim = (self.local_dim as usize).pow(self.n_parties as u32);
        let mut v = alloc::vec![C64::new(0.0, 0.0); dim];
        for (s, a) in self.amplitudes() {
            v[self.dense_index(&s)] = a;
        }
        v
    }
}

fn detect_affine(exponents: &[u32], order: u32) -> Option<AffinePhase> {
    let offset = *exponents.first()?;
    let slope = if exponents.len() > 1 { (exponents[1] + order - offset) % order } else { 0 };
    let mut cur = offset;
    for &e in exponents {
        if e != cur {
            return None;
        }
        cur = ((cur as u64 + slope as u64) % order as u64) as u32;
    }
    Some(AffinePhase { offset, slope })
}

/// Choice of the bijection from a set of size `s` onto `Z_s`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Ranking {
    /// Rank in lexicographic order.
    #[default]
    Lexicographic,
    /// Rank in reverse lexicographic order.
    ReverseLexicographic,
}

/// `Σ_j ω_s^{k·rank(j)} |j⟩` over a set of trit strings.
pub fn build_state(support_set: &[TritString], k: u32) -> Result<PhasedState> {
    let mut support = support_set.to_vec();
    support.sort_unstable();
    if let Some(w) = support.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicateSupport(w[0]));
    }
    let n = support.first().ok_or(Error::EmptySupport)?.len();
    if let Some(bad) = support.iter().find(|s| s.len() != n) {
        return Err(Error::LengthMismatch { expected: n, found: bad.len() });
    }
    build_state_shared(support.into(), k, Ranking::Lexicographic, 0)
}

fn build_state_shared(
    support: Arc<[TritString]>,
    k: u32,
    ranking: Ranking,
    set_index: usize,
) -> Result<PhasedState> {
    let s = support.len() as u32;
    if s == 0 {
        return Err(Error::EmptySupport);
    }
    if k >= s {
        return Err(Error::PhaseIndexOutOfRange { k, order: s });
    }
    let exponents = (0..s)
        .map(|r| {
            let rank = match ranking {
                Ranking::Lexicographic => r,
                Ranking::ReverseLexicographic => s - 1 - r,
            };
            ((k as u64 * rank as u64) % s as u64) as u32
        })
        .collect();
    let n = support[0].len();
    Ok(PhasedState::from_parts(n, 3, s, support, exponents, StateLabel { set_index, k }))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Provenance {
    OgebStandard,
    OgebModified,
    Oges,
    External,
}

#[derive(Clone, Debug, PartialEq)]
pub struct StateSet {
    pub states: Vec<PhasedState>,
    pub provenance: Provenance,
}

impl StateSet {
    pub fn new(states: Vec<PhasedState>, provenance: Provenance) -> Self {
        StateSet { states, provenance }
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn n_parties(&self) -> usize {
        self.states.first().map_or(0, PhasedState::n_parties)
    }

    pub fn local_dim(&self) -> u8 {
        self.states.first().map_or(3, PhasedState::local_dim)
    }

    /// Indices of states built on set `set_index`.
    pub fn indices_of_set(&self, set_index: usize) -> Vec<usize> {
        self.states
            .iter()
            .enumerate()
            .filter(|(_, s)| s.label.set_index == set_index)
            .map(|(i, _)| i)
            .collect()
    }

    /// Count a basis of this kind must have, if the provenance fixes one.
    pub fn expected_len(&self) -> Option<usize> {
        let n = self.n_parties() as u32;
        let d = self.local_dim() as usize;
        match self.provenance {
            Provenance::OgebStandard | Provenance::OgebModified => Some(d.pow(n)),
            Provenance::Oges => Some(2 * d.pow(n.saturating_sub(1))),
            Provenance::External => None,
        }
    }
}

/// One state per set and phase index; `3^N` states in total.
pub fn build_ogeb(f: &StringFamily) -> Result<StateSet> {
    build_ogeb_with(f, Ranking::Lexicographic)
}

/// [`build_ogeb`] with an explicit choice of bijection.
pub fn build_ogeb_with(f: &StringFamily, ranking: Ranking) -> Result<StateSet> {
    if let Verdict::Fail(v) = verify_partition(f) {
        return Err(Error::Partition(v));
    }
    let provenance = match f.variant() {
        Variant::Standard => Provenance::OgebStandard,
        Variant::Modified => Provenance::OgebModified,
    };
    let sets: Vec<usize> = (0..f.num_sets()).collect();
    Ok(StateSet::new(states_on_sets(f, &sets, ranking)?, provenance))
}

/// The modified basis without the states on set 2: `2·3^{N−1}` states.
pub fn build_oges(f: &StringFamily) -> Result<StateSet> {
    build_oges_with(f, Ranking::Lexicographic)
}

pub fn build_oges_with(f: &StringFamily, ranking: Ranking) -> Result<StateSet> {
    if f.variant() != Variant::Modified {
        return Err(Error::StandardFamilyInput);
    }
    if let Verdict::Fail(v) = verify_partition(f) {
        return Err(Error::Partition(v));
    }
    let sets: Vec<usize> = (0..f.num_sets()).filter(|&i| i != 2).collect();
    Ok(StateSet::new(states_on_sets(f, &sets, ranking)?, Provenance::Oges))
}

/// All phase states on the listed sets of a family, in set order then `k`.
pub fn states_on_sets(
    f: &StringFamily,
    sets: &[usize],
    ranking: Ranking,
) -> Result<Vec<PhasedState>> {
    let mut out = Vec::new();
    for &i in sets {
        let support: Arc<[TritString]> = f.set(i).into();
        for k in 0..support.len() as u32 {
            out.push(build_state_shared(support.clone(), k, ranking, i)?);
        }
    }
    Ok(out)
}

/// Why an inner product is exactly zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ZeroReason {
    DisjointSupport,
    /// The phase differences form whole cosets of a nontrivial subgroup of
    /// the roots of unity, so they sum to zero.
    GeometricSum,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Overlap {
    ExactZero(ZeroReason),
    /// Floating-point value; `tolerance` is the zero threshold for this pair.
    Numeric { value: C64, tolerance: f64 },
}

impl Overlap {
    pub fn is_zero(&self) -> bool {
        match self {
            Overlap::ExactZero(_) => true,
            Overlap::Numeric { value, tolerance } => modulus(*value) <= *tolerance,
        }
    }

    pub fn value(&self) -> C64 {
        match self {
            Overlap::ExactZero(_) => C64::new(0.0, 0.0),
            Overlap::Numeric { value, .. } => *value,
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            out.push(p);
            while n % p == 0 {
                n /= p;
            }
        }
        p += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

/// `⟨a|b⟩ = Σ_{j} ω^{e_b(j) − e_a(j)}` over the common support.
///
/// Orders are reconciled over `lcm(order_a, order_b)` with integer
/// arithmetic. The result is an exact zero when the supports are disjoint or
/// when the multiset of phase differences is invariant under rotation by a
/// nontrivial subgroup; otherwise it is evaluated in floating point.
pub fn inner_product(a: &PhasedState, b: &PhasedState) -> Result<Overlap> {
    if a.n_parties != b.n_parties {
        return Err(Error::LengthMismatch { expected: a.n_parties, found: b.n_parties });
    }
    if a.local_dim != b.local_dim {
        return Err(Error::LocalDimMismatch { expected: a.local_dim, found: b.local_dim });
    }
    let tolerance = NUMERIC_ZERO_TOL * libm::sqrt(a.norm_sqr() * b.norm_sqr());

    // same support with affine phases: a single geometric series
    if a.order == b.order && a.shares_support_with(b) {
        if let (Some(pa), Some(pb)) = (a.affine, b.affine) {
            let s = a.order as u64;
            let len = a.support.len() as u64;
            let dslope = (pb.slope as u64 + s - pa.slope as u64) % s;
            if dslope != 0 && len % (s / gcd(dslope, s)) == 0 {
                return Ok(Overlap::ExactZero(ZeroReason::GeometricSum));
            }
        }
    }

    let order_l = {
        let (x, y) = (a.order as u64, b.order as u64);
        x / gcd(x, y) * y
    };
    let scale_a = order_l / a.order as u64;
    let scale_b = order_l / b.order as u64;
    let mut counts: BTreeMap<u64, u64> = BTreeMap::new();
    let (mut i, mut j) = (0, 0);
    while i < a.support.len() && j < b.support.len() {
        match a.support[i].cmp(&b.support[j]) {
            core::cmp::Ordering::Less => i += 1,
            core::cmp::Ordering::Greater => j += 1,
            core::cmp::Ordering::Equal => {
                let ea = a.exponents[i] as u64 * scale_a;
                let eb = b.exponents[j] as u64 * scale_b;
                *counts.entry((eb + order_l - ea) % order_l).or_insert(0) += 1;
                i += 1;
                j += 1;
            }
        }
    }
    if counts.is_empty() {
        return Ok(Overlap::ExactZero(ZeroReason::DisjointSupport));
    }
    for p in prime_factors(order_l) {
        let shift = order_l / p;
        let invariant = counts
            .iter()
            .all(|(&r, &c)| counts.get(&((r + shift) % order_l)) == Some(&c));
        if invariant {
            return Ok(Overlap::ExactZero(ZeroReason::GeometricSum));
        }
    }
    let value = counts
        .iter()
        .fold(C64::new(0.0, 0.0), |acc, (&r, &c)| acc + root_of_unity(r, order_l) * c as f64);
    Ok(Overlap::Numeric { value, tolerance })
}

/// First pair found to be non-orthogonal.
#[derive(Clone, Debug, PartialEq)]
pub struct NonOrthogonalPair {
    pub a: usize,
    pub b: usize,
    pub value: C64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OrthogonalityReport {
    pub states: usize,
    pub pairs_checked: u64,
    pub disjoint_pairs: u64,
    pub geometric_pairs: u64,
    /// Pairs that were only numerically zero. Zero for every constructed set.
    pub numeric_pairs: u64,
    pub expected_count: Option<usize>,
    pub verdict: Verdict<NonOrthogonalPair>,
}

impl OrthogonalityReport {
    pub fn count_ok(&self) -> bool {
        self.expected_count.map_or(true, |c| c == self.states)
    }

    pub fn passed(&self) -> bool {
        self.verdict.is_pass() && self.count_ok()
    }

    /// Every off-diagonal pair went through a symbolic zero path.
    pub fn all_exact(&self) -> bool {
        self.numeric_pairs == 0
    }
}

/// Checks pairwise orthogonality of a whole set and, for bases, the count.
pub fn verify_orthogonal_basis(ss: &StateSet) -> Result<OrthogonalityReport> {
    let mut report = OrthogonalityReport {
        states: ss.len(),
        pairs_checked: 0,
        disjoint_pairs: 0,
        geometric_pairs: 0,
        numeric_pairs: 0,
        expected_count: ss.expected_len(),
        verdict: Verdict::Pass,
    };
    for (ia, a) in ss.states.iter().enumerate() {
        for (ib, b) in ss.states.iter().enumerate().skip(ia + 1) {
            report.pairs_checked += 1;
            match inner_product(a, b)? {
                Overlap::ExactZero(ZeroReason::DisjointSupport) => report.disjoint_pairs += 1,
                Overlap::ExactZero(ZeroReason::GeometricSum) => report.geometric_pairs += 1,
                o @ Overlap::Numeric { value, .. } => {
                    report.numeric_pairs += 1;
                    if !o.is_zero() && report.verdict.is_pass() {
                        report.verdict = Verdict::Fail(NonOrthogonalPair { a: ia, b: ib, value });
                    }
                }
            }
        }
    }
    Ok(report)
}
