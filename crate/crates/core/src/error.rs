use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("malformed PGM header: {0}")]
    MalformedHeader(String),
    #[error("unsupported maxval {0} (only 255 is supported)")]
    UnsupportedMaxval(u32),
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    TruncatedPayload { expected: usize, found: usize },
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("dimension mismatch: {left_width}x{left_height} vs {right_width}x{right_height}")]
    DimensionMismatch {
        left_width: usize,
        left_height: usize,
        right_width: usize,
        right_height: usize,
    },
    #[error("bit plane index {0} out of range 1..=8")]
    PlaneOutOfRange(i64),
    #[error("plane stack must hold 8 planes ordered 1..=8")]
    MalformedStack,
    #[error("non-binary value {0} in bit plane")]
    NonBinary(u8),
    #[error("invalid attack parameter: {0}")]
    InvalidParameter(String),
    #[error("unknown attack kind {0:?}")]
    UnknownAttack(String),
    #[error("invalid weight profile: {0}")]
    InvalidProfile(String),
    #[error("expected {expected} values, got {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("plane subset must not be empty")]
    EmptySubset,
    #[error("profile {0:?} is not present in the report")]
    ProfileAbsent(String),
}

impl Error {
    pub(crate) fn dims(a: (usize, usize), b: (usize, usize)) -> Self {
        Error::DimensionMismatch {
            left_width: a.0,
            left_height: a.1,
            right_width: b.0,
            right_height: b.1,
        }
    }
}
