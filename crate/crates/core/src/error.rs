//! Error types shared by every module of the crate.

use thiserror::Error;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Failure while turning history text into an AST.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    /// A character that belongs to no token of the grammar.
    #[error("unknown token '{found}' at position {position}")]
    UnknownToken { position: usize, found: char },
    /// Tokens in an order the grammar does not allow.
    #[error("syntax error at position {position}: expected {expected}, found {found}")]
    Syntax {
        position: usize,
        expected: &'static str,
        found: String,
    },
}

impl ParseError {
    /// Zero-based character offset at which the error was detected.
    pub fn position(&self) -> usize {
        match self {
            ParseError::UnknownToken { position, .. } => *position,
            ParseError::Syntax { position, .. } => *position,
        }
    }
}

/// Everything that can go wrong while building or evaluating histories.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a zero vector does not define a ray")]
    ZeroVector,

    #[error("vector norm {norm} is too far from 1 to be a ray (accepted deviation {tolerance})")]
    NormOutOfTolerance { norm: f64, tolerance: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {dim} outside the supported range {min}..={max}")]
    DimensionOutOfRange { dim: usize, min: usize, max: usize },

    #[error("operator is not unitary (deviation {deviation} from U\u{2020}U = I)")]
    NotUnitary { deviation: f64 },

    #[error("unknown event '{name}'")]
    UnknownEvent { name: String },

    #[error("event '{name}' is already registered")]
    DuplicateEvent { name: String },

    #[error("'{name}' is not a valid event name (expected [A-Za-z_][A-Za-z0-9_]*)")]
    InvalidEventName { name: String },

    #[error("a sequence may not appear inside an alternative slot")]
    NestedSequenceInSlot,

    #[error("alternatives '{left}' and '{right}' are not orthogonal (|overlap| = {overlap:.3e})")]
    NonOrthogonalAlternatives {
        left: String,
        right: String,
        overlap: f64,
    },

    #[error("history contains no alternatives to split")]
    NoAlternatives,

    #[error("history endpoint is an alternative group; this query needs elementary endpoints")]
    AlternativeEndpoint,

    #[error("forbidden history: operator trace {trace:.3e} is not positive")]
    ForbiddenHistory { trace: f64 },

    #[error("face index {index} out of range 1..={faces}")]
    FaceIndexOutOfRange { index: usize, faces: usize },

    #[error("internal consistency failure: {message}")]
    InternalConsistency { message: String },

    #[error(
        "representation mismatch: projector route gives {projector}, amplitude route gives {amplitude}"
    )]
    RepresentationMismatch { projector: f64, amplitude: f64 },

    #[error(transparent)]
    Parse(#[from] ParseError),
}
