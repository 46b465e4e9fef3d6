//! Orthogonal genuinely entangled bases built from trit-string families,
//! together with the machinery to check their orthogonality, entanglement
//! and strong quantum nonlocality.
//!
//! The crate is `no_std` and only needs `alloc`. Linear algebra is done with
//! `nalgebra`; file formats and the command-line driver live in the `ogeb`
//! crate.

#![no_std]

extern crate alloc;

pub mod entanglement;
pub mod error;
pub mod nonlocality;
pub mod states;
pub mod tritsets;

pub use error::{Error, Result};
pub use states::{
    build_ogeb, build_oges, build_state, inner_product, verify_orthogonal_basis, PhasedState,
    StateSet, C64,
};
pub use tritsets::{
    build_family, build_modified_family, verify_partition,
    verify_permutation_invariance, StringFamily, TritString, Variant,
};

/// Outcome of a check that can fail on well-formed input.
///
/// `Fail` carries the first witness of the failure.
#[derive(Clone, Debug, PartialEq, Eq)]
#[must_use]
pub enum Verdict<V> {
    Pass,
    Fail(V),
}

impl<V> Verdict<V> {
    pub fn is_pass(&self) -> bool {
        matches!(self, Verdict::Pass)
    }

    pub fn failure(&self) -> Option<&V> {
        match self {
            Verdict::Pass => None,
            Verdict::Fail(v) => Some(v),
        }
    }
}
