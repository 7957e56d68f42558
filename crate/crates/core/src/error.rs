use core::fmt;

/// Errors shared across the crate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    /// Exact division by zero.
    DivisionByZero,
    /// A square system had no unique solution.
    SingularMatrix,
    /// Operand shapes do not conform; the payload names the operation.
    DimensionMismatch(&'static str),
    /// A polyhedron required to be nonempty is empty.
    Infeasible,
    /// A polyhedron is nonempty but has no interior point.
    EmptyInterior,
    /// The piece with this index has an empty region.
    EmptyPiece(usize),
    /// An operation over a nonempty list received an empty one.
    EmptyList,
    /// The affine fit for this piece produced a singular system, which
    /// signals a violated nonempty-interior precondition.
    SingularFit(usize),
    /// The affine map fitted from samples disagrees with the map declared
    /// for this piece.
    InconsistentFit(usize),
    /// Invalid argument combination; the payload says which.
    InvalidArgs(&'static str),
    /// Region extraction refuses networks with this many ReLUs.
    TooManyNeurons(usize),
    /// Cell enumeration refuses arrangements in this input dimension.
    DimensionTooLarge(usize),
    /// A point fell outside every piece of an instance.
    NotCovered,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DivisionByZero => write!(f, "division by zero"),
            Error::SingularMatrix => write!(f, "singular matrix"),
            Error::DimensionMismatch(what) => write!(f, "dimension mismatch in {what}"),
            Error::Infeasible => write!(f, "polyhedron is empty"),
            Error::EmptyInterior => write!(f, "polyhedron has empty interior"),
            Error::EmptyPiece(i) => write!(f, "piece {i} has an empty region"),
            Error::SingularFit(i) => write!(f, "singular affine fit on piece {i}"),
            Error::InconsistentFit(i) => {
                write!(f, "fitted map disagrees with declared map on piece {i}")
            }
            Error::EmptyList => write!(f, "expected a nonempty list"),
            Error::InvalidArgs(what) => write!(f, "invalid arguments: {what}"),
            Error::TooManyNeurons(n) => {
                write!(f, "network has {n} ReLUs, exceeding the region extraction limit")
            }
            Error::DimensionTooLarge(n) => {
                write!(f, "cell enumeration not supported in dimension {n}")
            }
            Error::NotCovered => write!(f, "point lies outside every piece"),
        }
    }
}

#[cfg(feature = "std")]
impl std::error::Error for Error {}
