//! Executes proof scripts against a concrete family and state set.
//!
//! Lemmas are applied to `E = I_spectator ⊗ Π` on the full space and then
//! read off per spectator trit: `E_{(c,x),(c,y)} = Π_{x,y}`, while entries of
//! `E` with different spectator trits vanish for structural reasons and say
//! nothing about `Π`. Every precondition is checked on the actual strings and
//! states; the script only says which lemma to try and what it should yield.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use super::ledger::{Derivation, FactKind, Lemma, OplmLedger};
use super::script::{script_for, SetExpr, Step};
use crate::entanglement::PartySet;
use crate::error::{Error, Result};
use crate::states::{build_oges, inner_product, StateSet};
use crate::tritsets::{build_family, build_modified_family, CaseTag, StringFamily, TritString, Variant};
use crate::Verdict;

/// One derived fact, in the order it was derived.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceEntry {
    /// 1-based position of the script step.
    pub step: usize,
    pub lemma: Lemma,
    pub s: String,
    pub t: Option<String>,
    pub u0: Option<String>,
    pub witnesses: Vec<usize>,
    pub fact: String,
    pub fact_id: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProofFailure {
    pub step: usize,
    pub message: String,
}

#[derive(Clone, Debug)]
pub struct CutProof {
    /// The party left out of the measuring side.
    pub spectator: usize,
    pub measuring: PartySet,
    pub ledger: OplmLedger,
    pub trace: Vec<TraceEntry>,
    pub verdict: Verdict<ProofFailure>,
}

#[derive(Clone, Debug)]
pub struct ProofReport {
    pub n_parties: usize,
    pub case_tag: CaseTag,
    pub cuts: Vec<CutProof>,
}

impl ProofReport {
    pub fn passed(&self) -> bool {
        !self.cuts.is_empty() && self.cuts.iter().all(|c| c.verdict.is_pass())
    }

    /// First failing cut, by spectator.
    pub fn first_failure(&self) -> Option<(usize, &ProofFailure)> {
        self.cuts.iter().find_map(|c| c.verdict.failure().map(|f| (c.spectator, f)))
    }
}

/// The scripted proof on the OGES of the modified family with `n` parties,
/// once per spectator party.
pub fn run_proof_script(n: usize) -> Result<ProofReport> {
    if n < 3 {
        return Err(Error::TooFewParties { requested: n, min: 3 });
    }
    let family = build_modified_family(n)?;
    let states = build_oges(&family)?;
    let script = script_for(family.case_tag()).ok_or(Error::ModifiedFamilyInput)?;
    run_script_on(&family, &states, script)
}

/// Runs `script` on every cut `Ā_p` of `states`.
pub fn run_script_on(family: &StringFamily, states: &StateSet, script: &[Step]) -> Result<ProofReport> {
    if family.variant() != Variant::Modified {
        return Err(Error::StandardFamilyInput);
    }
    let n = family.n_parties();
    if states.n_parties() != n {
        return Err(Error::LengthMismatch { expected: n, found: states.n_parties() });
    }
    if states.local_dim() != 3 {
        return Err(Error::LocalDimMismatch { expected: 3, found: states.local_dim() });
    }
    let sub = build_family(n - 1)?;
    let names = Names::new(&sub);
    let mut ctx = Context { family, states, sub, witnesses: vec![None; family.num_sets()] };
    let cuts = (0..n).map(|p| ctx.run_cut(p, script, &names)).collect();
    Ok(ProofReport { n_parties: n, case_tag: family.case_tag(), cuts })
}

/// Readable names for measuring-side index sets.
struct Names {
    m: usize,
    known: Vec<(Vec<u32>, String)>,
}

impl Names {
    fn new(sub: &StringFamily) -> Self {
        let m = sub.n_parties();
        let c = |t: u8| TritString::constant(m, t);
        let mut exprs: Vec<(SetExpr, String)> = vec![(SetExpr::Universe, format!("Z^{m}_3"))];
        for t in 0..3u8 {
            exprs.push((SetExpr::UniverseMinus(t), format!("Z^{m}_3 \\ {{{}}}", c(t))));
        }
        for k in 0..3u8 {
            exprs.push((SetExpr::Sub(k), format!("G^{m}_{k}")));
            for t in 0..3u8 {
                exprs.push((SetExpr::SubMinus(k, t), format!("G^{m}_{k} \\ {{{}}}", c(t))));
            }
        }
        let known = exprs.into_iter().filter_map(|(e, name)| Some((e.eval(sub)?, name))).collect();
        Names { m, known }
    }

    fn describe(&self, set: &[u32]) -> String {
        if let Some((_, name)) = self.known.iter().find(|(v, _)| v == set) {
            return name.clone();
        }
        let items: Vec<String> =
            set.iter().map(|&i| format!("{}", TritString::from_index(self.m, i))).collect();
        format!("{{{}}}", items.join(","))
    }

    fn fact(&self, kind: &FactKind) -> String {
        match kind {
            FactKind::BlockZero { s, t } => {
                format!("block({}, {}) = 0", self.describe(s), self.describe(t))
            }
            FactKind::DiagEqual(s) => format!("diagonal constant on {}", self.describe(s)),
            FactKind::BlockPropIdentity(s) => format!("proportional to identity on {}", self.describe(s)),
        }
    }
}

struct Context<'a> {
    family: &'a StringFamily,
    states: &'a StateSet,
    sub: StringFamily,
    /// Witness validation outcome per set, computed on first use.
    witnesses: Vec<Option<core::result::Result<Vec<usize>, String>>>,
}

struct CutState<'a> {
    spectator: usize,
    ledger: OplmLedger,
    trace: Vec<TraceEntry>,
    step: usize,
    names: &'a Names,
}

impl CutState<'_> {
    fn record(
        &mut self,
        kind: FactKind,
        derivation: Derivation,
        s: &[u32],
        t: Option<&[u32]>,
        u0: Option<String>,
    ) -> core::result::Result<(), String> {
        // keep the orientation the lemma produced rather than the ledger's
        let fact = match (&kind, t) {
            (FactKind::BlockZero { .. }, Some(t)) => {
                format!("block({}, {}) = 0", self.names.describe(s), self.names.describe(t))
            }
            _ => self.names.fact(&kind),
        };
        let lemma = derivation.lemma;
        let witnesses = derivation.witnesses.clone();
        let (fact_id, _) = self.ledger.add(kind, derivation).map_err(|e| format!("{fact}: {e}"))?;
        self.trace.push(TraceEntry {
            step: self.step,
            lemma,
            s: self.names.describe(s),
            t: t.map(|t| self.names.describe(t)),
            u0,
            witnesses,
            fact,
            fact_id,
        });
        Ok(())
    }
}

fn sorted(mut v: Vec<u32>) -> Vec<u32> {
    v.sort_unstable();
    v.dedup();
    v
}

impl Context<'_> {
    fn eval(&self, e: &SetExpr) -> core::result::Result<Vec<u32>, String> {
        e.eval(&self.sub).ok_or_else(|| format!("script names a constant missing from {e:?}"))
    }

    /// `{x : (c at p, x) ∈ set}` as measuring-side indices.
    fn project(&self, set: &[TritString], p: usize, c: u8) -> Vec<u32> {
        sorted(set.iter().filter(|s| s.trit(p) == c).map(|s| s.remove(p).index()).collect())
    }

    /// Checks that the states labelled with `set` form an orthogonal family
    /// of the right size supported on the set's strings; returns their
    /// positions in the state set.
    fn witness_family(&mut self, set: usize) -> core::result::Result<Vec<usize>, String> {
        if set >= self.witnesses.len() {
            return Err(format!("family has no set {set}"));
        }
        if let Some(r) = &self.witnesses[set] {
            return r.clone();
        }
        let r = self.validate_witnesses(set);
        self.witnesses[set] = Some(r.clone());
        r
    }

    fn validate_witnesses(&self, set: usize) -> core::result::Result<Vec<usize>, String> {
        let members = self.states.indices_of_set(set);
        if members.is_empty() {
            return Err(format!("witness family {set} is not part of the certified set"));
        }
        let strings = self.family.set(set);
        if members.len() != strings.len() {
            return Err(format!(
                "witness family {set} has {} states but its set has {} strings",
                members.len(),
                strings.len()
            ));
        }
        for &i in &members {
            let st = &self.states.states[i];
            if let Some(s) = st.support().iter().find(|s| !self.family.contains(set, s)) {
                return Err(format!("witness state {i} has support string {s} outside set {set}"));
            }
        }
        for (x, &i) in members.iter().enumerate() {
            for &j in &members[x + 1..] {
                let o = inner_product(&self.states.states[i], &self.states.states[j])
                    .map_err(|e| format!("{e}"))?;
                if !o.is_zero() {
                    return Err(format!("witness states {i} and {j} are not orthogonal"));
                }
            }
        }
        Ok(members)
    }

    fn run_cut(&mut self, p: usize, script: &[Step], names: &Names) -> CutProof {
        let n = self.family.n_parties();
        let dim = crate::tritsets::pow3(n - 1) as usize;
        let mut cut = CutState { spectator: p, ledger: OplmLedger::new(dim), trace: Vec::new(), step: 0, names };
        let mut verdict = Verdict::Fail(ProofFailure {
            step: script.len(),
            message: String::from("script ended without concluding"),
        });
        for (i, step) in script.iter().enumerate() {
            cut.step = i + 1;
            let outcome = match *step {
                Step::BlockZeros { sets, expect } => self.block_zeros(&mut cut, sets, expect),
                Step::BlockTrivial { set, pivot, expect_identity, expect_diag } => {
                    self.block_trivial(&mut cut, set, pivot, expect_identity, expect_diag)
                }
                Step::UnionZero(a, b) => self.union_zero(&mut cut, &a, &b),
                Step::UnionIdentity(a) => self.union_identity(&mut cut, &a, Lemma::Union),
                Step::Conclude => self.union_identity(&mut cut, &SetExpr::Universe, Lemma::Conclusion),
            };
            if let Err(message) = outcome {
                verdict = Verdict::Fail(ProofFailure { step: i + 1, message });
                break;
            }
            if matches!(step, Step::Conclude) && cut.ledger.concludes_identity() {
                verdict = Verdict::Pass;
            }
        }
        CutProof {
            spectator: p,
            measuring: PartySet::from_parties(&[p]).complement(n),
            ledger: cut.ledger,
            trace: cut.trace,
            verdict,
        }
    }

    fn block_zeros(
        &mut self,
        cut: &mut CutState<'_>,
        (a, b): (usize, usize),
        expect: &[(SetExpr, SetExpr)],
    ) -> core::result::Result<(), String> {
        let fa = self.witness_family(a)?;
        let fb = self.witness_family(b)?;
        let (s, t) = (self.family.set(a), self.family.set(b));
        if s.is_empty() || t.is_empty() {
            return Err(format!("sets {a} and {b} must be nonempty"));
        }
        if let Some(x) = s.iter().find(|x| self.family.contains(b, x)) {
            return Err(format!("sets {a} and {b} share string {x}"));
        }
        // witnesses of different families are members of one orthogonal set,
        // so every cross pair carries a constraint
        debug_assert!(fa.iter().all(|i| !fb.contains(i)));
        let mut wanted = Vec::new();
        for (x, y) in expect {
            wanted.push((self.eval(x)?, self.eval(y)?));
        }
        let p = cut.spectator;
        let mut derived = Vec::new();
        for c in 0..3u8 {
            let (sc, tc) = (self.project(s, p, c), self.project(t, p, c));
            if sc.is_empty() || tc.is_empty() {
                continue;
            }
            let derivation = Derivation {
                witnesses: vec![a, b],
                spectator_value: Some(c),
                ..Derivation::new(Lemma::BlockZeros)
            };
            // report in the script's orientation when it has a matching row
            let flipped = wanted.iter().any(|(x, y)| x == &tc && y == &sc);
            let (rows, cols) = if flipped { (&tc, &sc) } else { (&sc, &tc) };
            let kind = FactKind::block_zero(sc.clone(), tc.clone());
            cut.record(kind.clone(), derivation, rows, Some(cols), None)?;
            derived.push(kind);
        }
        let mut wanted: Vec<FactKind> = wanted.into_iter().map(|(x, y)| FactKind::block_zero(x, y)).collect();
        derived.sort();
        wanted.sort();
        if derived != wanted {
            return Err(format!("blocks derived from sets {a} and {b} differ from the script"));
        }
        Ok(())
    }

    fn block_trivial(
        &mut self,
        cut: &mut CutState<'_>,
        set: usize,
        (c0, rest): (u8, u8),
        expect_identity: &[SetExpr],
        expect_diag: SetExpr,
    ) -> core::result::Result<(), String> {
        let members = self.witness_family(set)?;
        let n = self.family.n_parties();
        let p = cut.spectator;
        let trits: Vec<u8> = (0..n).map(|q| if q == p { c0 } else { rest }).collect();
        let u0 = TritString::new(&trits).map_err(|e| format!("{e}"))?;
        let s = self.family.set(set);
        if !self.family.contains(set, &u0) {
            return Err(format!("pivot {u0} is not in set {set}"));
        }
        if let Some(&i) = members.iter().find(|&&i| self.states.states[i].exponent_of(&u0).is_none()) {
            return Err(format!("pivot {u0} is orthogonal to witness state {i}"));
        }
        let u0_sub = u0.remove(p).index();
        let mut needed = Vec::new();
        for x in s.iter().filter(|x| **x != u0 && x.trit(p) == c0) {
            let x_sub = x.remove(p).index();
            if !cut.ledger.is_zero(u0_sub, x_sub) {
                return Err(format!(
                    "prerequisite missing: entry ({}, {}) not known to vanish",
                    u0.remove(p),
                    x.remove(p)
                ));
            }
            needed.push(x_sub);
        }
        let premises = cut.ledger.zero_premises(&[u0_sub], &sorted(needed));
        let derivation = |c: Option<u8>| Derivation {
            witnesses: vec![set],
            spectator_value: c,
            pivot: Some(u0.index()),
            premises: premises.clone(),
            ..Derivation::new(Lemma::BlockTrivial)
        };
        let u0_name = format!("{u0}");
        let mut blocks = Vec::new();
        let mut diag = Vec::new();
        for c in 0..3u8 {
            let sc = self.project(s, p, c);
            diag.extend_from_slice(&sc);
            if sc.len() >= 2 {
                let kind = FactKind::prop_identity(sc.clone());
                cut.record(kind.clone(), derivation(Some(c)), &sc, None, Some(u0_name.clone()))?;
                blocks.push(kind);
            }
        }
        let diag = sorted(diag);
        if diag.len() >= 2 {
            cut.record(FactKind::diag_equal(diag.clone()), derivation(None), &diag, None, Some(u0_name))?;
        }
        let mut wanted = Vec::new();
        for e in expect_identity {
            wanted.push(FactKind::prop_identity(self.eval(e)?));
        }
        blocks.sort();
        wanted.sort();
        if blocks != wanted || diag != self.eval(&expect_diag)? {
            return Err(format!("conclusions on set {set} differ from the script"));
        }
        Ok(())
    }

    fn union_zero(&mut self, cut: &mut CutState<'_>, a: &SetExpr, b: &SetExpr) -> core::result::Result<(), String> {
        let (sa, sb) = (self.eval(a)?, self.eval(b)?);
        if let Some((x, y)) = cut.ledger.missing_zero(&sa, &sb) {
            return Err(format!("entry ({}, {}) not known to vanish", self.sub_string(x), self.sub_string(y)));
        }
        let derivation = Derivation { premises: cut.ledger.zero_premises(&sa, &sb), ..Derivation::new(Lemma::Union) };
        cut.record(FactKind::block_zero(sa.clone(), sb.clone()), derivation, &sa, Some(&sb), None)
    }

    fn union_identity(&mut self, cut: &mut CutState<'_>, a: &SetExpr, lemma: Lemma) -> core::result::Result<(), String> {
        let sa = self.eval(a)?;
        if let Some((x, y)) = cut.ledger.missing_zero(&sa, &sa) {
            return Err(format!("entry ({}, {}) not known to vanish", self.sub_string(x), self.sub_string(y)));
        }
        if let Some(x) = cut.ledger.missing_diag(&sa) {
            return Err(format!("diagonal entry {} not known equal to the rest", self.sub_string(x)));
        }
        let mut premises = cut.ledger.zero_premises(&sa, &sa);
        premises.extend(cut.ledger.diag_premises(&sa));
        premises.sort_unstable();
        premises.dedup();
        let derivation = Derivation { premises, ..Derivation::new(lemma) };
        cut.record(FactKind::prop_identity(sa.clone()), derivation, &sa, None, None)
    }

    fn sub_string(&self, index: u32) -> TritString {
        TritString::from_index(self.sub.n_parties(), index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::states::{Provenance, StateSet};

    #[test]
    fn three_parties_conclude_on_every_cut() {
        let r = run_proof_script(3).unwrap();
        assert!(r.passed(), "{:?}", r.first_failure());
        assert_eq!(r.cuts.len(), 3);
        for c in &r.cuts {
            assert!(c.ledger.concludes_identity());
        }
    }

    #[test]
    fn trace_rows_name_the_projected_blocks() {
        let r = run_proof_script(3).unwrap();
        let first: Vec<_> = r.cuts[0].trace.iter().take(3).map(|e| e.fact.clone()).collect();
        assert_eq!(
            first,
            vec![
                "block(G^2_0 \\ {00}, G^2_1) = 0",
                "block(G^2_0, G^2_2 \\ {11}) = 0",
                "block(G^2_1 \\ {22}, G^2_2) = 0",
            ]
        );
        let bt = r.cuts[0].trace.iter().find(|e| e.lemma == Lemma::BlockTrivial).unwrap();
        assert_eq!(bt.u0.as_deref(), Some("100"));
    }

    #[test]
    fn residue_classes_four_and_five() {
        for n in [4, 5] {
            let r = run_proof_script(n).unwrap();
            assert!(r.passed(), "n = {n}: {:?}", r.first_failure());
        }
    }

    #[test]
    fn rerunning_is_idempotent() {
        let a = run_proof_script(4).unwrap();
        let b = run_proof_script(4).unwrap();
        for (x, y) in a.cuts.iter().zip(&b.cuts) {
            assert_eq!(x.trace, y.trace);
            assert_eq!(x.ledger.facts(), y.ledger.facts());
        }
    }

    #[test]
    fn missing_constant_family_is_not_certified() {
        let family = build_modified_family(3).unwrap();
        let oges = build_oges(&family).unwrap();
        let states = oges.states.iter().filter(|s| s.label().set_index != 3).cloned().collect();
        let reduced = StateSet::new(states, Provenance::External);
        let r = run_script_on(&family, &reduced, script_for(CaseTag::CaseI).unwrap()).unwrap();
        assert!(!r.passed());
        let (_, failure) = r.first_failure().unwrap();
        assert_eq!(failure.step, 2);
        assert!(failure.message.contains("witness family 3"));
    }

    #[test]
    fn wrong_script_is_rejected() {
        let family = build_modified_family(4).unwrap();
        let oges = build_oges(&family).unwrap();
        let r = run_script_on(&family, &oges, script_for(CaseTag::CaseI).unwrap()).unwrap();
        assert!(!r.passed());
    }

    #[test]
    fn small_party_counts_rejected() {
        assert!(matches!(run_proof_script(2), Err(Error::TooFewParties { .. })));
    }
}
