use alloc::string::String;
use core::fmt;

use crate::tritsets::{PartitionViolation, TritString};

/// Errors raised by constructors and checked operations across the crate.
///
/// Verification routines that can legitimately *fail* (a partition check, an
/// orthogonality check) report through [`crate::Verdict`] instead; this type
/// is reserved for malformed input and violated preconditions.
#[derive(Clone, Debug, PartialEq)]
pub enum Error {
    /// A family or string with zero parties was requested.
    ZeroParties,
    /// More parties than the base-3 index encoding supports.
    TooManyParties { requested: usize, max: usize },
    /// A trit outside the local alphabet.
    InvalidDigit { digit: u8, local_dim: u8 },
    /// Two objects disagree on the number of parties.
    LengthMismatch { expected: usize, found: usize },
    /// Two states live in spaces of different local dimension.
    LocalDimMismatch { expected: u8, found: u8 },
    /// An operation defined only on standard families got a modified one.
    ModifiedFamilyInput,
    /// An operation defined only on modified families got a standard one.
    StandardFamilyInput,
    /// Modified families exist only for three or more parties.
    TooFewParties { requested: usize, min: usize },
    /// The input family does not partition the string space.
    Partition(PartitionViolation),
    /// A string that no set of the family contains.
    Unclassified(TritString),
    /// Phase index outside `[0, order)`.
    PhaseIndexOutOfRange { k: u32, order: u32 },
    /// The same basis string listed twice in one state.
    DuplicateSupport(TritString),
    /// A state with no support.
    EmptySupport,
    /// Root-of-unity order of zero.
    ZeroOrder,
    /// A phase exponent outside `[0, order)`.
    ExponentOutOfRange { exponent: u32, order: u32 },
    /// Party index outside `0..n`.
    PartyOutOfRange { party: usize, n_parties: usize },
    /// A bipartition side that is empty or covers every party.
    DegenerateBipartition,
    /// Two states of a set that should be orthogonal are not.
    NotOrthogonal { a: usize, b: usize },
    /// Measuring-side dimension above the oracle gate.
    OracleDimensionExceeded { dim: usize, max: usize },
    /// A tolerance that must be strictly positive was not.
    InvalidTolerance,
    /// A proof step failed one of its lemma preconditions.
    Proof(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroParties => write!(f, "number of parties must be at least 1"),
            Error::TooManyParties { requested, max } => {
                write!(f, "{requested} parties requested, at most {max} supported")
            }
            Error::InvalidDigit { digit, local_dim } => {
                write!(f, "digit {digit} outside local dimension {local_dim}")
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} parties, found {found}")
            }
            Error::LocalDimMismatch { expected, found } => {
                write!(f, "expected local dimension {expected}, found {found}")
            }
            Error::ModifiedFamilyInput => write!(f, "operation requires a standard family"),
            Error::StandardFamilyInput => write!(f, "operation requires a modified family"),
            Error::TooFewParties { requested, min } => {
                write!(f, "{requested} parties requested, at least {min} required")
            }
            Error::Partition(v) => write!(f, "family is not a partition: {v}"),
            Error::Unclassified(s) => write!(f, "string {s} belongs to no set"),
            Error::PhaseIndexOutOfRange { k, order } => {
                write!(f, "phase index {k} outside [0, {order})")
            }
            Error::DuplicateSupport(s) => write!(f, "string {s} appears twice in one support"),
            Error::EmptySupport => write!(f, "state has empty support"),
            Error::ZeroOrder => write!(f, "root-of-unity order must be positive"),
            Error::ExponentOutOfRange { exponent, order } => {
                write!(f, "exponent {exponent} outside [0, {order})")
            }
            Error::PartyOutOfRange { party, n_parties } => {
                write!(f, "party {party} outside 0..{n_parties}")
            }
            Error::DegenerateBipartition => {
                write!(f, "both sides of a bipartition must be nonempty")
            }
            Error::NotOrthogonal { a, b } => write!(f, "states {a} and {b} are not orthogonal"),
            Error::OracleDimensionExceeded { dim, max } => write!(
                f,
                "measuring-side dimension {dim} exceeds the oracle limit {max}; raise the limit explicitly"
            ),
            Error::InvalidTolerance => write!(f, "tolerance must be positive and finite"),
            Error::Proof(msg) => write!(f, "proof step failed: {msg}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
