use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid Pauli letter {found:?} at position {position}")]
    Parse { position: usize, found: char },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("{what} exceeds the supported limit ({value} > {limit})")]
    Capacity {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error(
        "input vectors are linearly dependent (column {column} has residual norm {residual:e})"
    )]
    Degenerate { column: usize, residual: f64 },

    #[error("subspace violates the Knill-Laflamme conditions (violation {violation:e} > tolerance {tolerance:e})")]
    NotACode { violation: f64, tolerance: f64 },

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("generators {first} and {second} anticommute")]
    Anticommuting { first: usize, second: usize },

    #[error("generator {index} is dependent on the preceding generators")]
    DependentGenerator { index: usize },

    #[error("stabilizer eigenspace has dimension {found}, expected {expected}")]
    Inconsistent { expected: usize, found: usize },

    #[error("unknown name {0:?}")]
    UnknownName(String),

    #[error("parameter matrix is ill-conditioned (smallest singular value {0:e})")]
    Conditioning(f64),

    #[error("constructed family member is not a code (violation {0:e}); this indicates an implementation fault")]
    Construction(f64),

    #[error("invalid cyclic coefficients, residuals {0:?}")]
    InvalidCoefficients([f64; 4]),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
