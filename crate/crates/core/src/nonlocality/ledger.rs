//! Monotone fact base about the entries of a measurement operator `Π`.
//!
//! Indices are measuring-side strings encoded in base 3 in increasing party
//! order. Facts are only ever added; adding a fact twice is a no-op.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

/// A statement about a block of `Π`. Index lists are sorted and free of
/// duplicates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum FactKind {
    /// `_S Π _T = 0` and `_T Π _S = 0`.
    BlockZero { s: Vec<u32>, t: Vec<u32> },
    /// All diagonal entries on `S` coincide.
    DiagEqual(Vec<u32>),
    /// `Π_S ∝ I_S`: no off-diagonal weight inside `S`, equal diagonal.
    BlockPropIdentity(Vec<u32>),
}

impl FactKind {
    /// Block zero with the two sides in canonical order.
    pub fn block_zero(mut s: Vec<u32>, mut t: Vec<u32>) -> Self {
        s.sort_unstable();
        s.dedup();
        t.sort_unstable();
        t.dedup();
        if t < s {
            core::mem::swap(&mut s, &mut t);
        }
        FactKind::BlockZero { s, t }
    }

    pub fn diag_equal(mut s: Vec<u32>) -> Self {
        s.sort_unstable();
        s.dedup();
        FactKind::DiagEqual(s)
    }

    pub fn prop_identity(mut s: Vec<u32>) -> Self {
        s.sort_unstable();
        s.dedup();
        FactKind::BlockPropIdentity(s)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Lemma {
    BlockZeros,
    BlockTrivial,
    /// Several known facts combined entry by entry.
    Union,
    /// Closing step: `Π ∝ I` on the whole universe.
    Conclusion,
}

impl fmt::Display for Lemma {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Lemma::BlockZeros => "block-zeros",
            Lemma::BlockTrivial => "block-trivial",
            Lemma::Union => "union",
            Lemma::Conclusion => "conclusion",
        })
    }
}

/// How a fact was obtained.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    pub lemma: Lemma,
    /// Set indices of the witness state families.
    pub witnesses: Vec<usize>,
    /// Spectator trit the fact was projected on, if any.
    pub spectator_value: Option<u8>,
    /// Full-length index of the pivot string for block-trivial steps.
    pub pivot: Option<u32>,
    /// Ids of earlier facts the derivation relied on.
    pub premises: Vec<usize>,
}

impl Derivation {
    pub fn new(lemma: Lemma) -> Self {
        Derivation { lemma, witnesses: Vec::new(), spectator_value: None, pivot: None, premises: Vec::new() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fact {
    pub kind: FactKind,
    pub derivation: Derivation,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LedgerError {
    IndexOutOfRange(u32),
    /// The two sides of a block zero overlap.
    Overlap(u32),
    EmptySide,
}

impl fmt::Display for LedgerError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LedgerError::IndexOutOfRange(i) => write!(f, "index {i} outside the universe"),
            LedgerError::Overlap(i) => write!(f, "block sides share index {i}"),
            LedgerError::EmptySide => write!(f, "block side is empty"),
        }
    }
}

/// Facts, plus two derived views: a bitmap of entries known to vanish and a
/// union-find over indices with known-equal diagonal.
#[derive(Clone, Debug)]
pub struct OplmLedger {
    dim: usize,
    facts: Vec<Fact>,
    ids: BTreeMap<FactKind, usize>,
    zero: Vec<u64>,
    parent: Vec<u32>,
}

impl OplmLedger {
    pub fn new(dim: usize) -> Self {
        OplmLedger {
            dim,
            facts: Vec::new(),
            ids: BTreeMap::new(),
            zero: vec![0; (dim * dim).div_ceil(64)],
            parent: (0..dim as u32).collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn facts(&self) -> &[Fact] {
        &self.facts
    }

    pub fn len(&self) -> usize {
        self.facts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facts.is_empty()
    }

    pub fn id_of(&self, kind: &FactKind) -> Option<usize> {
        self.ids.get(kind).copied()
    }

    /// Adds a fact and returns its id and whether it was new. A fact already
    /// present keeps its first derivation.
    pub fn add(&mut self, kind: FactKind, derivation: Derivation) -> Result<(usize, bool), LedgerError> {
        if let Some(&id) = self.ids.get(&kind) {
            return Ok((id, false));
        }
        self.check(&kind)?;
        match &kind {
            FactKind::BlockZero { s, t } => {
                for &a in s {
                    for &b in t {
                        self.set_zero(a, b);
                    }
                }
            }
            FactKind::DiagEqual(s) => self.merge_all(s),
            FactKind::BlockPropIdentity(s) => {
                for (i, &a) in s.iter().enumerate() {
                    for &b in &s[i + 1..] {
                        self.set_zero(a, b);
                    }
                }
                self.merge_all(s);
            }
        }
        let id = self.facts.len();
        self.ids.insert(kind.clone(), id);
        self.facts.push(Fact { kind, derivation });
        Ok((id, true))
    }

    fn check(&self, kind: &FactKind) -> Result<(), LedgerError> {
        let in_range = |v: &[u32]| match v.iter().find(|&&i| i as usize >= self.dim) {
            Some(&i) => Err(LedgerError::IndexOutOfRange(i)),
            None => Ok(()),
        };
        match kind {
            FactKind::BlockZero { s, t } => {
                if s.is_empty() || t.is_empty() {
                    return Err(LedgerError::EmptySide);
                }
                in_range(s)?;
                in_range(t)?;
                if let Some(&i) = s.iter().find(|i| t.binary_search(i).is_ok()) {
                    return Err(LedgerError::Overlap(i));
                }
                Ok(())
            }
            FactKind::DiagEqual(s) | FactKind::BlockPropIdentity(s) => {
                if s.is_empty() {
                    return Err(LedgerError::EmptySide);
                }
                in_range(s)
            }
        }
    }

    fn bit(&self, a: u32, b: u32) -> usize {
        a as usize * self.dim + b as usize
    }

    fn set_zero(&mut self, a: u32, b: u32) {
        for k in [self.bit(a, b), self.bit(b, a)] {
            self.zero[k / 64] |= 1 << (k % 64);
        }
    }

    /// `Π_{a,b} = 0` is known. Always false on the diagonal.
    pub fn is_zero(&self, a: u32, b: u32) -> bool {
        if a == b || a as usize >= self.dim || b as usize >= self.dim {
            return false;
        }
        let k = self.bit(a, b);
        self.zero[k / 64] & (1 << (k % 64)) != 0
    }

    fn find(&self, mut a: u32) -> u32 {
        while self.parent[a as usize] != a {
            a = self.parent[a as usize];
        }
        a
    }

    fn merge_all(&mut self, s: &[u32]) {
        let Some(&first) = s.first() else { return };
        for &x in &s[1..] {
            let (ra, rb) = (self.find(first), self.find(x));
            if ra != rb {
                let (lo, hi) = (ra.min(rb), ra.max(rb));
                self.parent[hi as usize] = lo;
            }
        }
    }

    /// `Π_{a,a} = Π_{b,b}` is known.
    pub fn diag_equal(&self, a: u32, b: u32) -> bool {
        a == b || self.find(a) == self.find(b)
    }

    /// First pair `(a, b)`, `a ∈ s`, `b ∈ t`, `a ≠ b`, not known to vanish.
    pub fn missing_zero(&self, s: &[u32], t: &[u32]) -> Option<(u32, u32)> {
        s.iter()
            .flat_map(|&a| t.iter().map(move |&b| (a, b)))
            .find(|&(a, b)| a != b && !self.is_zero(a, b))
    }

    /// First index of `s` whose diagonal is not known equal to `s[0]`'s.
    pub fn missing_diag(&self, s: &[u32]) -> Option<u32> {
        let first = *s.first()?;
        s.iter().copied().find(|&x| !self.diag_equal(first, x))
    }

    /// Ids of zero facts covering at least one entry of `S × T`.
    pub fn zero_premises(&self, s: &[u32], t: &[u32]) -> Vec<usize> {
        let meets = |v: &[u32], w: &[u32]| v.iter().any(|x| w.binary_search(x).is_ok());
        self.facts
            .iter()
            .enumerate()
            .filter(|(_, f)| match &f.kind {
                FactKind::BlockZero { s: a, t: b } => {
                    (meets(a, s) && meets(b, t)) || (meets(a, t) && meets(b, s))
                }
                FactKind::BlockPropIdentity(a) => meets(a, s) && meets(a, t),
                FactKind::DiagEqual(_) => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Ids of facts that tie diagonal entries inside `s` together.
    pub fn diag_premises(&self, s: &[u32]) -> Vec<usize> {
        self.facts
            .iter()
            .enumerate()
            .filter(|(_, f)| match &f.kind {
                FactKind::DiagEqual(a) | FactKind::BlockPropIdentity(a) => {
                    a.iter().filter(|x| s.binary_search(x).is_ok()).nth(1).is_some()
                }
                FactKind::BlockZero { .. } => false,
            })
            .map(|(i, _)| i)
            .collect()
    }

    /// Every off-diagonal entry vanishes and every diagonal entry is equal.
    pub fn concludes_identity(&self) -> bool {
        let all: Vec<u32> = (0..self.dim as u32).collect();
        self.missing_zero(&all, &all).is_none() && self.missing_diag(&all).is_none()
    }

    /// Block-zero facts as `(id, S, T)`.
    pub fn block_zero_facts(&self) -> impl Iterator<Item = (usize, &[u32], &[u32])> + '_ {
        self.facts.iter().enumerate().filter_map(|(i, f)| match &f.kind {
            FactKind::BlockZero { s, t } => Some((i, s.as_slice(), t.as_slice())),
            _ => None,
        })
    }
}
