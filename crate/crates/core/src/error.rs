//! Error type shared by every module of the crate.
//!
//! All fallible operations return [`Result`]. Variants name the violated
//! precondition so callers (and the CLI) can report it verbatim.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// An argument that must be nonzero was zero (division, inversion,
    /// factorization of zero, zero eigenvalue of a diffeomorphism, ...).
    ZeroArgument(&'static str),
    /// Operands declare different numbers of variables.
    VariableCountMismatch { expected: usize, found: usize },
    /// Operands declare different truncation orders where equal orders are required.
    OrderMismatch { expected: u32, found: u32 },
    /// A computation needs jets of at least `needed` but the input only carries `have`.
    OrderTooLow { needed: u32, have: u32 },
    /// A series that must have zero constant term does not.
    NonzeroConstantTerm,
    /// A series that must have a unit (nonzero) constant term does not.
    ZeroConstantTerm,
    /// The linear part of a map is not invertible.
    SingularLinearPart,
    /// The linear part is not lower-triangular, but the operation requires it.
    NonTriangularLinearPart,
    /// The linear part is not unipotent, but a logarithm was requested.
    NonUnipotentLinearPart,
    /// The linear part is not nilpotent, but an exponential of a field was requested.
    NonNilpotentLinearPart,
    /// The characteristic polynomial has an irreducible factor of degree >= 2
    /// over Q(i); the spectrum does not lie in Q(i).
    SpectrumNotInQi,
    /// Exponential-polynomial operands of different character kinds were mixed.
    MixedCharacterKinds,
    /// A list of jets does not form a group under composition at the stored order.
    NotAGroup(String),
    /// Text input could not be parsed; `pos` is a byte offset into the input.
    Parse { pos: usize, msg: String },
    /// An internal invariant that theory guarantees failed to hold.
    /// Encountering this variant signals an implementation bug.
    Internal(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::ZeroArgument(what) => write!(f, "{what} must be nonzero"),
            Error::VariableCountMismatch { expected, found } => {
                write!(f, "variable count mismatch: expected {expected}, found {found}")
            }
            Error::OrderMismatch { expected, found } => {
                write!(f, "truncation order mismatch: expected {expected}, found {found}")
            }
            Error::OrderTooLow { needed, have } => {
                write!(f, "truncation order too low: need at least {needed}, have {have}")
            }
            Error::NonzeroConstantTerm => write!(f, "constant term must be zero"),
            Error::ZeroConstantTerm => write!(f, "constant term must be nonzero"),
            Error::SingularLinearPart => write!(f, "linear part is not invertible"),
            Error::NonTriangularLinearPart => {
                write!(f, "linear part is not lower-triangular")
            }
            Error::NonUnipotentLinearPart => write!(f, "linear part is not unipotent"),
            Error::NonNilpotentLinearPart => write!(f, "linear part is not nilpotent"),
            Error::SpectrumNotInQi => {
                write!(f, "spectrum does not lie in Q(i): irreducible factor of degree >= 2")
            }
            Error::MixedCharacterKinds => {
                write!(f, "cannot mix multiplicative and exponential characters")
            }
            Error::NotAGroup(why) => write!(f, "not a group at the stored order: {why}"),
            Error::Parse { pos, msg } => write!(f, "parse error at byte {pos}: {msg}"),
            Error::Internal(msg) => write!(f, "internal invariant violated: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
