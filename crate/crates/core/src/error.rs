use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid dimensions: {0}")]
    Dimension(String),

    #[error("gamma tensor violates the trilinear condition ({count} violations, first at k={k}, i={i}, j={j})")]
    NotTrilinear { count: usize, k: usize, i: usize, j: usize },

    #[error("model coefficients violate the compatibility conditions: {0}")]
    ConstraintViolated(String),

    #[error("diagonal lambda entry lambda_{k}^({a},{a}) is not allowed")]
    DiagonalLambda { k: usize, a: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("monomial of degree {degree} exceeds the expectation degree cap {cap}")]
    DegreeCapExceeded { degree: u32, cap: u32 },

    #[error("time step {dt} exceeds the stability bound {bound}")]
    UnstableTimeStep { dt: f64, bound: f64 },

    #[error("state became non-finite at step {step}")]
    NonFinite { step: u64 },

    #[error("trajectory {index} failed: {source}")]
    Trajectory {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("cannot parse {0:?} as an exact rational")]
    ParseRational(String),

    #[error("malformed trajectory file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
