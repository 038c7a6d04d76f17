use thiserror::Error;

/// Errors raised by the polynomial, geometry, tracking and search layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid multi-index {exponents:?} for degree {degree} in {num_vars} variables")]
    InvalidMultiIndex {
        exponents: Vec<u32>,
        degree: u32,
        num_vars: usize,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("invalid degree vector: {0}")]
    InvalidDegrees(String),

    #[error("zero system cannot be normalized")]
    ZeroSystem,

    #[error("expected a unit vector, norm is {0}")]
    NotUnit(f64),

    #[error("numerically singular matrix (condition estimate {0:e})")]
    Singular(f64),

    #[error("degenerate homotopy: start and target coincide up to sign (Re<f,g> = {0})")]
    DegenerateHomotopy(f64),

    #[error("parameter {t} outside [0, {end}]")]
    OutOfRange { t: f64, end: f64 },

    #[error("empty root list")]
    EmptyRoots,

    #[error("root count deficit: expected {expected}, found {found}")]
    RootCountDeficit { expected: usize, found: usize },

    #[error("input is not square-free: roots {0} and {1} coincide")]
    NotSquareFree(usize, usize),

    #[error("path tracking failed: {0}")]
    TrackingFailed(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("degenerate random draw after {0} attempts")]
    DegenerateDraw(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    /// Stable snake-case name of the variant, for machine-readable output.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::ShapeMismatch(_) => "shape_mismatch",
            Error::InvalidMultiIndex { .. } => "invalid_multi_index",
            Error::NonFinite(_) => "non_finite",
            Error::InvalidDegrees(_) => "invalid_degrees",
            Error::ZeroSystem => "zero_system",
            Error::NotUnit(_) => "not_unit",
            Error::Singular(_) => "singular",
            Error::DegenerateHomotopy(_) => "degenerate_homotopy",
            Error::OutOfRange { .. } => "out_of_range",
            Error::EmptyRoots => "empty_roots",
            Error::RootCountDeficit { .. } => "root_count_deficit",
            Error::NotSquareFree(_, _) => "not_square_free",
            Error::TrackingFailed(_) => "tracking_failed",
            Error::InvalidConfig(_) => "invalid_config",
            Error::DegenerateDraw(_) => "degenerate_draw",
            Error::Parse { .. } => "parse",
            Error::Io(_) => "io",
        }
    }
}
