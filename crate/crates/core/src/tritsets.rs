//! Recursive partitions of `Z_3^N` into permutation-invariant string sets.
//!
//! The standard family for `N` parties consists of three sets `G^N_0`,
//! `G^N_1`, `G^N_2`. It starts from the singletons `{0}`, `{1}`, `{2}` and
//! grows one party at a time by prefixing:
//!
//! ```text
//! G^{N+1}_i = {i}×G^N_0  ∪  {i+2}×G^N_1  ∪  {i+1}×G^N_2      (mod 3)
//! ```
//!
//! The modified families (three or more parties) pull the constant strings
//! `0…0`, `1…1`, `2…2` out of the sets they land in and collect them into a
//! fourth set. Which constants move depends on `N mod 3`.
//!
//! Strings are stored as base-3 indices with party 1 as the most significant
//! trit, so the natural integer order is the lexicographic order on trits and
//! the index doubles as the dense state-vector coordinate.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::Verdict;

/// Longest string the `u32` base-3 encoding can hold.
pub const MAX_PARTIES: usize = 20;

/// Seed used by sampled permutation checks when the caller has no preference.
pub const DEFAULT_PERMUTATION_SEED: u64 = 0x0005_EED0_F3A1_1CE5;

/// `3^k`.
pub const fn pow3(k: usize) -> u32 {
    let mut acc = 1u32;
    let mut i = 0;
    while i < k {
        acc *= 3;
        i += 1;
    }
    acc
}

/// A word over `{0,1,2}` of fixed length, encoded as a base-3 integer.
///
/// The digit alphabet is not checked beyond `< 3`; qubit fixtures reuse the
/// type with digits restricted to `{0,1}`.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct TritString {
    len: u8,
    index: u32,
}

impl TritString {
    pub fn new(trits: &[u8]) -> Result<Self> {
        if trits.is_empty() {
            return Err(Error::ZeroParties);
        }
        if trits.len() > MAX_PARTIES {
            return Err(Error::TooManyParties { requested: trits.len(), max: MAX_PARTIES });
        }
        let mut index = 0u32;
        for &t in trits {
            if t > 2 {
                return Err(Error::InvalidDigit { digit: t, local_dim: 3 });
            }
            index = index * 3 + t as u32;
        }
        Ok(TritString { len: trits.len() as u8, index })
    }

    /// Builds a string from its base-3 index. Panics if the index does not fit
    /// in `len` trits.
    pub fn from_index(len: usize, index: u32) -> Self {
        assert!((1..=MAX_PARTIES).contains(&len), "string length {len} out of range");
        assert!((index as u64) < 3u64.pow(len as u32), "index {index} too large for {len} trits");
        TritString { len: len as u8, index }
    }

    /// `(t, t, …, t)` of the given length.
    pub fn constant(len: usize, trit: u8) -> Self {
        assert!(trit < 3);
        let repunit = (pow3(len) - 1) / 2;
        TritString::from_index(len, repunit * trit as u32)
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn index(&self) -> u32 {
        self.index
    }

    /// Trit held by party `pos` (0-based, party 1 is position 0).
    pub fn trit(&self, pos: usize) -> u8 {
        debug_assert!(pos < self.len());
        ((self.index / pow3(self.len() - 1 - pos)) % 3) as u8
    }

    pub fn trits(&self) -> Vec<u8> {
        (0..self.len()).map(|p| self.trit(p)).collect()
    }

    pub fn digit_sum(&self) -> u32 {
        (0..self.len()).map(|p| self.trit(p) as u32).sum()
    }

    /// `(t, self…)`.
    pub fn prepend(&self, trit: u8) -> Self {
        debug_assert!(trit < 3);
        TritString::from_index(self.len() + 1, trit as u32 * pow3(self.len()) + self.index)
    }

    /// Drops the trit at `pos`, keeping the others in order.
    pub fn remove(&self, pos: usize) -> Self {
        let len = self.len();
        debug_assert!(pos < len && len >= 2);
        let low_w = pow3(len - 1 - pos);
        let high = self.index / (low_w * 3);
        let low = self.index % low_w;
        TritString::from_index(len - 1, high * low_w + low)
    }

    /// Coordinate `q` of the result is coordinate `perm[q]` of `self`.
    pub fn permute(&self, perm: &[usize]) -> Self {
        debug_assert_eq!(perm.len(), self.len());
        let index = perm.iter().fold(0u32, |acc, &src| acc * 3 + self.trit(src) as u32);
        TritString::from_index(self.len(), index)
    }

    /// Index of the sub-string made of the listed positions, read as base-`radix`.
    pub fn project_index(&self, positions: &[usize], radix: u32) -> u32 {
        positions.iter().fold(0u32, |acc, &p| acc * radix + self.trit(p) as u32)
    }
}

impl fmt::Display for TritString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in 0..self.len() {
            write!(f, "{}", self.trit(p))?;
        }
        Ok(())
    }
}

impl fmt::Debug for TritString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl core::str::FromStr for TritString {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut trits = Vec::with_capacity(s.len());
        for b in s.bytes() {
            match b {
                b'0'..=b'2' => trits.push(b - b'0'),
                other => {
                    return Err(Error::InvalidDigit { digit: other.wrapping_sub(b'0'), local_dim: 3 })
                }
            }
        }
        TritString::new(&trits)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Variant {
    Standard,
    Modified,
}

/// Residue class of `N` that selects the modification rule.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum CaseTag {
    None,
    /// `N ≡ 0 (mod 3)`: all three constants move to the fourth set.
    CaseI,
    /// `N ≡ 1 (mod 3)`: `0…0` and `1…1` move.
    CaseII,
    /// `N ≡ 2 (mod 3)`: `0…0` and `2…2` move.
    CaseIII,
}

impl CaseTag {
    pub fn for_parties(n: usize) -> CaseTag {
        match n % 3 {
            0 => CaseTag::CaseI,
            1 => CaseTag::CaseII,
            _ => CaseTag::CaseIII,
        }
    }
}

/// An ordered list of string sets over `Z_3^N`.
///
/// Sets are kept sorted lexicographically. Nothing here enforces the
/// partition property; use [`verify_partition`] for that.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StringFamily {
    n_parties: usize,
    variant: Variant,
    case_tag: CaseTag,
    sets: Vec<Vec<TritString>>,
    moved_constants: Vec<TritString>,
}

impl StringFamily {
    /// Assembles a family from raw sets. Strings are sorted within each set;
    /// duplicates are kept so that verification can report them.
    pub fn from_sets(
        n_parties: usize,
        variant: Variant,
        case_tag: CaseTag,
        mut sets: Vec<Vec<TritString>>,
    ) -> Result<Self> {
        check_parties(n_parties)?;
        for s in sets.iter_mut() {
            if let Some(bad) = s.iter().find(|t| t.len() != n_parties) {
                return Err(Error::LengthMismatch { expected: n_parties, found: bad.len() });
            }
            s.sort_unstable();
        }
        let moved_constants = match variant {
            Variant::Modified => sets.get(3).cloned().unwrap_or_default(),
            Variant::Standard => Vec::new(),
        };
        Ok(StringFamily { n_parties, variant, case_tag, sets, moved_constants })
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn variant(&self) -> Variant {
        self.variant
    }

    pub fn case_tag(&self) -> CaseTag {
        self.case_tag
    }

    pub fn sets(&self) -> &[Vec<TritString>] {
        &self.sets
    }

    pub fn set(&self, i: usize) -> &[TritString] {
        &self.sets[i]
    }

    pub fn num_sets(&self) -> usize {
        self.sets.len()
    }

    /// Constant strings removed from the first sets and gathered in the
    /// fourth (empty for standard families).
    pub fn moved_constants(&self) -> &[TritString] {
        &self.moved_constants
    }

    pub fn contains(&self, set: usize, s: &TritString) -> bool {
        self.sets[set].binary_search(s).is_ok()
    }

    /// Index of the set containing `s`.
    pub fn classify_string(&self, s: &TritString) -> Result<usize> {
        if s.len() != self.n_parties {
            return Err(Error::LengthMismatch { expected: self.n_parties, found: s.len() });
        }
        (0..self.sets.len()).find(|&i| self.contains(i, s)).ok_or(Error::Unclassified(*s))
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(Vec::len).collect()
    }
}

fn check_parties(n: usize) -> Result<()> {
    if n == 0 {
        Err(Error::ZeroParties)
    } else if n > MAX_PARTIES {
        Err(Error::TooManyParties { requested: n, max: MAX_PARTIES })
    } else {
        Ok(())
    }
}

/// The one-party family `{0}, {1}, {2}`.
pub fn build_base_family() -> StringFamily {
    let sets = (0..3u8).map(|t| vec![TritString::constant(1, t)]).collect();
    StringFamily {
        n_parties: 1,
        variant: Variant::Standard,
        case_tag: CaseTag::None,
        sets,
        moved_constants: Vec::new(),
    }
}

/// One prefixing step: `N` parties to `N + 1`.
pub fn extend_family(f: &StringFamily) -> Result<StringFamily> {
    if f.variant != Variant::Standard || f.sets.len() != 3 {
        return Err(Error::ModifiedFamilyInput);
    }
    check_parties(f.n_parties + 1)?;
    let sets = (0..3u8)
        .map(|i| {
            let mut out: Vec<TritString> = Vec::with_capacity(3 * f.sets[0].len());
            // set k of the smaller family is prefixed with i + 2k (mod 3)
            for (k, sub) in f.sets.iter().enumerate() {
                let lead = (i + 2 * k as u8) % 3;
                out.extend(sub.iter().map(|s| s.prepend(lead)));
            }
            out.sort_unstable();
            out
        })
        .collect();
    Ok(StringFamily {
        n_parties: f.n_parties + 1,
        variant: Variant::Standard,
        case_tag: CaseTag::None,
        sets,
        moved_constants: Vec::new(),
    })
}

/// Standard family for `n` parties.
pub fn build_family(n: usize) -> Result<StringFamily> {
    check_parties(n)?;
    let mut f = build_base_family();
    for _ in 1..n {
        f = extend_family(&f)?;
    }
    Ok(f)
}

/// The four-set family for `n ≥ 3`, dispatching on `n mod 3`.
///
/// Set 2 is the unmodified standard set. The constants taken out of sets 0
/// and 1 form set 3.
pub fn build_modified_family(n: usize) -> Result<StringFamily> {
    if n < 3 {
        return Err(Error::TooFewParties { requested: n, min: 3 });
    }
    let base = build_family(n)?;
    let case_tag = CaseTag::for_parties(n);
    let zeros = TritString::constant(n, 0);
    let ones = TritString::constant(n, 1);
    let twos = TritString::constant(n, 2);
    // (set, constant) pairs to move
    let moves: &[(usize, TritString)] = match case_tag {
        CaseTag::CaseI => &[(0, zeros), (0, twos), (0, ones)],
        CaseTag::CaseII => &[(0, zeros), (1, ones)],
        CaseTag::CaseIII => &[(0, zeros), (1, twos)],
        CaseTag::None => unreachable!(),
    };
    let mut sets = base.sets;
    let mut extra = Vec::with_capacity(moves.len());
    for &(set, c) in moves {
        let pos = sets[set]
            .binary_search(&c)
            .unwrap_or_else(|_| panic!("constant {c} expected in set {set} for N = {n}"));
        sets[set].remove(pos);
        extra.push(c);
    }
    extra.sort_unstable();
    sets.push(extra.clone());
    Ok(StringFamily {
        n_parties: n,
        variant: Variant::Modified,
        case_tag,
        sets,
        moved_constants: extra,
    })
}

/// First offending string found by [`verify_partition`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PartitionViolation {
    /// The string is listed in two sets (or twice in one).
    Overlap { string: TritString, first_set: usize, second_set: usize },
    /// No set contains the string.
    Missing { string: TritString },
}

impl fmt::Display for PartitionViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PartitionViolation::Overlap { string, first_set, second_set } => {
                write!(f, "{string} appears in sets {first_set} and {second_set}")
            }
            PartitionViolation::Missing { string } => write!(f, "{string} is in no set"),
        }
    }
}

/// Passes iff the sets are pairwise disjoint and cover `Z_3^N`.
pub fn verify_partition(f: &StringFamily) -> Verdict<PartitionViolation> {
    let n = f.n_parties;
    let mut owner: Vec<Option<usize>> = vec![None; pow3(n) as usize];
    for (i, set) in f.sets.iter().enumerate() {
        for s in set {
            let slot = &mut owner[s.index() as usize];
            if let Some(first_set) = *slot {
                return Verdict::Fail(PartitionViolation::Overlap {
                    string: *s,
                    first_set,
                    second_set: i,
                });
            }
            *slot = Some(i);
        }
    }
    match owner.iter().position(Option::is_none) {
        Some(idx) => Verdict::Fail(PartitionViolation::Missing {
            string: TritString::from_index(n, idx as u32),
        }),
        None => Verdict::Pass,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PermutationMode {
    /// All `N!` coordinate permutations.
    Exhaustive,
    /// `count` uniformly random permutations from a seeded ChaCha8 stream.
    Sampled { count: usize, seed: u64 },
}

impl PermutationMode {
    /// Exhaustive up to six parties, 1000 seeded samples above.
    pub fn default_for(n: usize) -> PermutationMode {
        if n <= 6 {
            PermutationMode::Exhaustive
        } else {
            PermutationMode::Sampled { count: 1000, seed: DEFAULT_PERMUTATION_SEED }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationViolation {
    pub permutation: Vec<usize>,
    pub set: usize,
    pub string: TritString,
    pub image: TritString,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationCheck {
    pub permutations_tested: usize,
    pub verdict: Verdict<PermutationViolation>,
}

/// Checks that every tested coordinate permutation maps each set onto itself.
///
/// A permutation is a bijection on strings, so testing `π(S) ⊆ S` for each
/// set is enough.
pub fn verify_permutation_invariance(f: &StringFamily, mode: PermutationMode) -> PermutationCheck {
    let n = f.n_parties;
    let mut tested = 0usize;
    let mut check = |perm: &[usize]| -> Option<PermutationViolation> {
        tested += 1;
        for (i, set) in f.sets.iter().enumerate() {
            for s in set {
                let image = s.permute(perm);
                if !f.contains(i, &image) {
                    return Some(PermutationViolation {
                        permutation: perm.to_vec(),
                        set: i,
                        string: *s,
                        image,
                    });
                }
            }
        }
        None
    };

    let mut perm: Vec<usize> = (0..n).collect();
    let violation = match mode {
        PermutationMode::Exhaustive => loop {
            if let Some(v) = check(&perm) {
                break Some(v);
            }
            if !next_permutation(&mut perm) {
                break None;
            }
        },
        PermutationMode::Sampled { count, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut found = None;
            for _ in 0..count {
                perm.shuffle(&mut rng);
                if let Some(v) = check(&perm) {
                    found = Some(v);
                    break;
                }
            }
            found
        }
    };
    PermutationCheck {
        permutations_tested: tested,
        verdict: match violation {
            Some(v) => Verdict::Fail(v),
            None => Verdict::Pass,
        },
    }
}

/// Advances to the next permutation in lexicographic order.
fn next_permutation(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}
