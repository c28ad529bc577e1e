use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("image dimensions must be positive, got {rows}x{cols}")]
    EmptyDimensions { rows: usize, cols: usize },

    #[error("expected {expected} samples for the given dimensions, got {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {left_rows}x{left_cols} vs {right_rows}x{right_cols}")]
    DimensionMismatch {
        left_rows: usize,
        left_cols: usize,
        right_rows: usize,
        right_cols: usize,
    },

    #[error("pixel {index} has intensity {value}, outside [0, 1]")]
    IntensityOutOfRange { index: usize, value: f64 },

    #[error("padding width must be at least 1")]
    InvalidPadWidth,

    #[error("patch size must be at least 2, got {0}")]
    InvalidPatchSize(usize),

    #[error("kernel weights must be finite and non-negative")]
    InvalidKernel,

    #[error("kernel weights sum to zero")]
    DegenerateKernel,

    #[error("missing fraction must lie in [0, 1], got {0}")]
    InvalidFraction(f64),

    #[error("text mask needs non-empty text and a positive scale")]
    InvalidText,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
