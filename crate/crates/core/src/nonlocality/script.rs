//! Proof scripts for the three residue classes of `N mod 3`.
//!
//! A script is a list of lemma applications written against one spectator
//! party. Block sets are described over the `N−1`-trit measuring universe in
//! terms of the standard sets `G^{N−1}_k`; the engine evaluates every
//! description concretely and checks it against what each lemma actually
//! yields.

use alloc::vec::Vec;

use crate::tritsets::{CaseTag, StringFamily, TritString};

/// A set of measuring-side strings, described relative to `G^{N−1}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SetExpr {
    /// `G^{N−1}_k`.
    Sub(u8),
    /// `G^{N−1}_k ∖ {(c, …, c)}`.
    SubMinus(u8, u8),
    /// Constant strings `(c, …, c)` for each listed `c`.
    Consts(&'static [u8]),
    /// All of `Z_3^{N−1}`.
    Universe,
    /// `Z_3^{N−1} ∖ {(c, …, c)}`.
    UniverseMinus(u8),
}

impl SetExpr {
    /// Sorted measuring-side indices, or `None` when the expression names a
    /// constant that is not in the set it is removed from.
    pub fn eval(&self, sub: &StringFamily) -> Option<Vec<u32>> {
        let m = sub.n_parties();
        let idx = |c: u8| TritString::constant(m, c).index();
        let mut out: Vec<u32> = match *self {
            SetExpr::Sub(k) => sub.set(k as usize).iter().map(|s| s.index()).collect(),
            SetExpr::SubMinus(k, c) => {
                let all: Vec<u32> = sub.set(k as usize).iter().map(|s| s.index()).collect();
                let pos = all.iter().position(|&x| x == idx(c))?;
                let mut v = all;
                v.remove(pos);
                v
            }
            SetExpr::Consts(cs) => cs.iter().map(|&c| idx(c)).collect(),
            SetExpr::Universe => (0..crate::tritsets::pow3(m)).collect(),
            SetExpr::UniverseMinus(c) => (0..crate::tritsets::pow3(m)).filter(|&x| x != idx(c)).collect(),
        };
        out.sort_unstable();
        out.dedup();
        Some(out)
    }
}

/// One application in a script.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Step {
    /// Block zeros between the string sets of two families, witnessed by the
    /// two state families. `expect` lists the projected blocks, one per
    /// spectator value that leaves both sides nonempty.
    BlockZeros { sets: (usize, usize), expect: &'static [(SetExpr, SetExpr)] },
    /// Block trivial on one family. The pivot has trit `pivot.0` on the
    /// spectator and `pivot.1` everywhere else.
    BlockTrivial {
        set: usize,
        pivot: (u8, u8),
        expect_identity: &'static [SetExpr],
        expect_diag: SetExpr,
    },
    /// Assemble a block zero from facts already covering each entry.
    UnionZero(SetExpr, SetExpr),
    /// Assemble `Π ∝ I` on a set from known entries.
    UnionIdentity(SetExpr),
    /// `Π ∝ I` on the whole measuring universe.
    Conclude,
}

use SetExpr::*;

const CASE_I: &[Step] = &[
    Step::BlockZeros {
        sets: (0, 1),
        expect: &[(SubMinus(0, 0), Sub(1)), (Sub(0), SubMinus(2, 1)), (SubMinus(1, 2), Sub(2))],
    },
    Step::BlockZeros {
        sets: (1, 3),
        expect: &[(Consts(&[0]), Sub(1)), (Sub(0), Consts(&[1])), (Consts(&[2]), Sub(2))],
    },
    Step::BlockZeros {
        sets: (0, 3),
        expect: &[
            (Consts(&[0]), SubMinus(0, 0)),
            (Consts(&[1]), SubMinus(2, 1)),
            (Consts(&[2]), SubMinus(1, 2)),
        ],
    },
    Step::BlockTrivial {
        set: 1,
        pivot: (1, 0),
        expect_identity: &[Sub(0), Sub(1), Sub(2)],
        expect_diag: Universe,
    },
    Step::UnionZero(Sub(0), Sub(1)),
    Step::UnionZero(Sub(0), Sub(2)),
    Step::UnionZero(Sub(1), Sub(2)),
    Step::Conclude,
];

const CASE_II: &[Step] = &[
    Step::BlockZeros {
        sets: (0, 1),
        expect: &[(SubMinus(0, 0), Sub(1)), (SubMinus(0, 1), Sub(2)), (Sub(1), Sub(2))],
    },
    Step::BlockZeros {
        sets: (1, 3),
        expect: &[(Consts(&[0]), Sub(1)), (Consts(&[1]), SubMinus(0, 1))],
    },
    Step::BlockZeros {
        sets: (0, 3),
        expect: &[(Consts(&[0]), SubMinus(0, 0)), (Consts(&[1]), Sub(2))],
    },
    Step::BlockTrivial {
        set: 1,
        pivot: (1, 0),
        expect_identity: &[SubMinus(0, 1), Sub(1), Sub(2)],
        expect_diag: UniverseMinus(1),
    },
    Step::BlockTrivial {
        set: 3,
        pivot: (0, 0),
        expect_identity: &[],
        expect_diag: Consts(&[0, 1]),
    },
    Step::UnionZero(Sub(0), Sub(1)),
    Step::UnionZero(Sub(0), Sub(2)),
    Step::UnionZero(Sub(1), Sub(2)),
    Step::UnionIdentity(Sub(0)),
    Step::Conclude,
];

const CASE_III: &[Step] = &[
    Step::BlockZeros {
        sets: (0, 1),
        expect: &[(SubMinus(0, 0), Sub(1)), (Sub(0), Sub(2)), (Sub(1), SubMinus(2, 2))],
    },
    Step::BlockZeros {
        sets: (1, 3),
        expect: &[(Consts(&[0]), Sub(1)), (Consts(&[2]), SubMinus(2, 2))],
    },
    Step::BlockZeros {
        sets: (0, 3),
        expect: &[(Consts(&[0]), SubMinus(0, 0)), (Sub(1), Consts(&[2]))],
    },
    Step::BlockTrivial {
        set: 1,
        pivot: (1, 0),
        expect_identity: &[Sub(0), Sub(1), SubMinus(2, 2)],
        expect_diag: UniverseMinus(2),
    },
    Step::BlockTrivial {
        set: 3,
        pivot: (0, 0),
        expect_identity: &[],
        expect_diag: Consts(&[0, 2]),
    },
    Step::UnionZero(Sub(0), Sub(1)),
    Step::UnionZero(Sub(0), Sub(2)),
    Step::UnionZero(Sub(1), Sub(2)),
    Step::UnionIdentity(Sub(2)),
    Step::Conclude,
];

/// The script for a residue class; `None` for standard families.
pub fn script_for(case: CaseTag) -> Option<&'static [Step]> {
    match case {
        CaseTag::CaseI => Some(CASE_I),
        CaseTag::CaseII => Some(CASE_II),
        CaseTag::CaseIII => Some(CASE_III),
        CaseTag::None => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tritsets::build_family;
    use alloc::vec;

    #[test]
    fn set_expressions_over_two_trits() {
        let sub = build_family(2).unwrap();
        let ix = |v: &[&str]| -> Vec<u32> {
            let mut out: Vec<u32> =
                v.iter().map(|s| s.parse::<TritString>().unwrap().index()).collect();
            out.sort_unstable();
            out
        };
        assert_eq!(Sub(0).eval(&sub).unwrap(), ix(&["00", "12", "21"]));
        assert_eq!(SubMinus(1, 2).eval(&sub).unwrap(), ix(&["01", "10"]));
        assert_eq!(SubMinus(1, 0).eval(&sub), None);
        assert_eq!(Consts(&[2, 0]).eval(&sub).unwrap(), vec![0, 8]);
        assert_eq!(UniverseMinus(1).eval(&sub).unwrap().len(), 8);
    }

    #[test]
    fn every_case_has_a_script() {
        for c in [CaseTag::CaseI, CaseTag::CaseII, CaseTag::CaseIII] {
            let s = script_for(c).unwrap();
            assert_eq!(s.last(), Some(&Step::Conclude));
        }
        assert!(script_for(CaseTag::None).is_none());
    }
}
