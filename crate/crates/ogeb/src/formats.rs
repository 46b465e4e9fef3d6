//! On-disk formats for string families and state sets.
//!
//! Families are written either as text, one string per line under `#set <i>`
//! headers, or as a JSON array of arrays of strings. State sets use a JSON
//! record per state listing each support string with its phase exponent.

use ogeb_core::states::{PhasedState, Provenance, StateLabel, StateSet};
use ogeb_core::tritsets::{CaseTag, StringFamily, TritString, Variant};
use serde::{Deserialize, Serialize};

#[derive(Debug, thiserror::Error)]
pub enum FormatError {
    #[error("line {line}: {message}")]
    Text { line: usize, message: String },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{0}")]
    Content(String),
    #[error(transparent)]
    Core(#[from] ogeb_core::Error),
}

/// Infers variant and residue class from the number of sets.
fn assemble(n: usize, sets: Vec<Vec<TritString>>) -> Result<StringFamily, FormatError> {
    let (variant, case) = match sets.len() {
        3 => (Variant::Standard, CaseTag::None),
        4 => (Variant::Modified, CaseTag::for_parties(n)),
        k => return Err(FormatError::Content(format!("expected 3 or 4 sets, found {k}"))),
    };
    Ok(StringFamily::from_sets(n, variant, case, sets)?)
}

fn common_length(sets: &[Vec<TritString>]) -> Result<usize, FormatError> {
    sets.iter()
        .flatten()
        .next()
        .map(TritString::len)
        .ok_or_else(|| FormatError::Content("family contains no strings".into()))
}

pub fn family_to_text(f: &StringFamily) -> String {
    let mut out = String::new();
    for (i, set) in f.sets().iter().enumerate() {
        out.push_str(&format!("#set {i}\n"));
        for s in set {
            out.push_str(&format!("{s}\n"));
        }
    }
    out
}

pub fn family_from_text(text: &str) -> Result<StringFamily, FormatError> {
    let mut sets: Vec<Vec<TritString>> = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim_end_matches('\r');
        let err = |message: String| FormatError::Text { line: i + 1, message };
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix("#set ") {
            let idx: usize = rest.trim().parse().map_err(|_| err(format!("bad set header `{line}`")))?;
            if idx != sets.len() {
                return Err(err(format!("expected `#set {}`, found `{line}`", sets.len())));
            }
            sets.push(Vec::new());
            continue;
        }
        let s: TritString = line.parse().map_err(|e| err(format!("{e}")))?;
        match sets.last_mut() {
            Some(set) => set.push(s),
            None => return Err(err("string before the first `#set` header".into())),
        }
    }
    let n = common_length(&sets)?;
    assemble(n, sets)
}

pub fn family_to_json(f: &StringFamily) -> String {
    let sets: Vec<Vec<String>> =
        f.sets().iter().map(|set| set.iter().map(|s| s.to_string()).collect()).collect();
    let mut out = serde_json::to_string_pretty(&sets).expect("string arrays serialize");
    out.push('\n');
    out
}

pub fn family_from_json(json: &str) -> Result<StringFamily, FormatError> {
    let raw: Vec<Vec<String>> = serde_json::from_str(json)?;
    let sets = raw
        .iter()
        .map(|set| set.iter().map(|s| s.parse::<TritString>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<Vec<_>, _>>()?;
    let n = common_length(&sets)?;
    assemble(n, sets)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProvenanceTag {
    OgebStandard,
    OgebModified,
    Oges,
    External,
}

impl From<Provenance> for ProvenanceTag {
    fn from(p: Provenance) -> Self {
        match p {
            Provenance::OgebStandard => ProvenanceTag::OgebStandard,
            Provenance::OgebModified => ProvenanceTag::OgebModified,
            Provenance::Oges => ProvenanceTag::Oges,
            Provenance::External => ProvenanceTag::External,
        }
    }
}

impl From<ProvenanceTag> for Provenance {
    fn from(p: ProvenanceTag) -> Self {
        match p {
            ProvenanceTag::OgebStandard => Provenance::OgebStandard,
            ProvenanceTag::OgebModified => Provenance::OgebModified,
            ProvenanceTag::Oges => Provenance::Oges,
            ProvenanceTag::External => Provenance::External,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SupportEntry {
    pub trits: String,
    pub exponent: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateRecord {
    pub set_index: usize,
    pub k: u32,
    pub order: u32,
    pub support: Vec<SupportEntry>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StateSetFile {
    pub n_parties: usize,
    pub local_dim: u8,
    pub provenance: ProvenanceTag,
    pub states: Vec<StateRecord>,
}

impl StateSetFile {
    pub fn from_state_set(ss: &StateSet) -> Self {
        let states = ss
            .states
            .iter()
            .map(|s| StateRecord {
                set_index: s.label().set_index,
                k: s.label().k,
                order: s.order(),
                support: s
                    .entries()
                    .map(|(t, exponent)| SupportEntry { trits: t.to_string(), exponent })
                    .collect(),
            })
            .collect();
        StateSetFile {
            n_parties: ss.n_parties(),
            local_dim: ss.local_dim(),
            provenance: ss.provenance.into(),
            states,
        }
    }

    pub fn to_state_set(&self) -> Result<StateSet, FormatError> {
        let mut states = Vec::with_capacity(self.states.len());
        for (i, r) in self.states.iter().enumerate() {
            let entries = r
                .support
                .iter()
                .map(|e| Ok((e.trits.parse::<TritString>()?, e.exponent)))
                .collect::<Result<Vec<_>, ogeb_core::Error>>()?;
            let label = StateLabel { set_index: r.set_index, k: r.k };
            let state = PhasedState::new(self.n_parties, self.local_dim, r.order, entries, label)
                .map_err(|e| FormatError::Content(format!("state {i}: {e}")))?;
            states.push(state);
        }
        Ok(StateSet::new(states, self.provenance.into()))
    }
}

pub fn state_set_to_json(ss: &StateSet) -> String {
    let mut out = serde_json::to_string_pretty(&StateSetFile::from_state_set(ss)).expect("records serialize");
    out.push('\n');
    out
}

pub fn state_set_from_json(json: &str) -> Result<StateSet, FormatError> {
    let file: StateSetFile = serde_json::from_str(json)?;
    file.to_state_set()
}

/// Interleaved real and imaginary parts, indexed by base-`d` string value.
pub fn dense_vector(s: &PhasedState) -> Vec<f64> {
    s.to_dense().iter().flat_map(|z| [z.re, z.im]).collect()
}

pub fn dense_to_json(ss: &StateSet) -> String {
    let vectors: Vec<Vec<f64>> = ss.states.iter().map(dense_vector).collect();
    let mut out = serde_json::to_string(&vectors).expect("floats serialize");
    out.push('\n');
    out
}
