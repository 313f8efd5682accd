use thiserror::Error;

/// Errors raised by the lattice, solver and verification routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate side length {side} on axis {axis}: no interior lattice points")]
    DegenerateSide { axis: usize, side: u64 },

    #[error("empty domain")]
    EmptyDomain,

    #[error("domain is not connected ({components} components)")]
    Disconnected { components: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("point {0:?} is not an interior point of the domain")]
    NotInterior(Vec<i64>),

    #[error("neighbor {neighbor:?} of {point:?} is undefined on the domain")]
    MissingNeighbor { point: Vec<i64>, neighbor: Vec<i64> },

    #[error("non-finite value at position {0}")]
    NonFinite(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("Dirichlet solve failed: {reason} (residual {residual:e})")]
    Solver { reason: String, residual: f64 },

    #[error("eigensolver residual {residual:e} exceeds bound {bound:e}")]
    Eigen { residual: f64, bound: f64 },

    #[error("positivity condition violated: sum of u+(x',0)^2 is zero")]
    PositivityViolated,

    #[error("{source_name}:{line}: {message}")]
    Parse {
        source_name: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
