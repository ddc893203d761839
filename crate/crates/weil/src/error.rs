use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("quotient is infinite-dimensional: no pure power of T{0} lies in the ideal")]
    InfiniteDimensional(usize),
    #[error("algebra dimension {0} exceeds the cap of {1} basis monomials")]
    DimensionCap(usize, usize),
    #[error("operands belong to different algebras")]
    AlgebraMismatch,
    #[error("element is not invertible (augmentation is zero)")]
    NotInvertible,
    #[error("augmented matrix is singular")]
    SingularAugmentation,
    #[error("syntax error at position {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("sampling exhausted: could not draw enough in-domain points")]
    SamplingExhausted,
    #[error("index {index} out of range ({len})")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("form is degenerate at a sampled point")]
    DegenerateAt,
    #[error("operation requires a constant-coefficient form")]
    NonConstantCoefficients,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}
