//! Qubit sets used as negative controls.

use alloc::vec;
use alloc::vec::Vec;

use crate::states::{PhasedState, Provenance, StateLabel, StateSet};
use crate::tritsets::TritString;

fn bits(s: &str) -> TritString {
    s.parse().expect("fixture strings are valid")
}

/// The three-qubit GHZ basis
/// `{|000⟩±|111⟩, |011⟩±|100⟩, |001⟩±|110⟩, |010⟩±|101⟩}`.
///
/// Signs are order-2 exponents on the second string of each pair; the label
/// records the pair as `set_index` and the sign as `k`.
pub fn ghz_basis_fixture() -> StateSet {
    let pairs = [("000", "111"), ("011", "100"), ("001", "110"), ("010", "101")];
    let mut states = Vec::with_capacity(8);
    for (g, (lo, hi)) in pairs.into_iter().enumerate() {
        for k in 0..2u32 {
            let entries = vec![(bits(lo), 0), (bits(hi), k)];
            let label = StateLabel { set_index: g, k };
            states.push(PhasedState::new(3, 2, 2, entries, label).expect("valid GHZ state"));
        }
    }
    StateSet::new(states, Provenance::External)
}

/// `{|00⟩, |01⟩, |10⟩, |11⟩}`.
pub fn product_basis_fixture() -> StateSet {
    let states = ["00", "01", "10", "11"]
        .into_iter()
        .enumerate()
        .map(|(i, s)| {
            let label = StateLabel { set_index: i, k: 0 };
            PhasedState::new(2, 2, 1, vec![(bits(s), 0)], label).expect("valid product state")
        })
        .collect();
    StateSet::new(states, Provenance::External)
}
