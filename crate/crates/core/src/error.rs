use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("block {k} lies outside the set's k-range")]
    BlockOutOfRange { k: i32 },

    #[error("generator tail did not converge: {0}")]
    NonConvergentGenerator(String),

    #[error("scale {delta:e} is below the certified threshold {required:e}; re-resolve the block")]
    Uncertified { delta: f64, required: f64 },

    #[error("too many items to materialize ({0}); raise the certified resolution")]
    TooManyItems(usize),

    #[error("convexity violated at points ({0}, {1}, {2})")]
    ConvexityViolation(f64, f64, f64),

    #[error("quadrature did not converge: estimate {estimate:e}, residual {residual:e}")]
    Quadrature { estimate: f64, residual: f64 },

    #[error("circle at ({x}, {y}) with radius {radius} leaves the field domain")]
    OutOfDomain { x: f64, y: f64, radius: f64 },

    #[error("insufficient resolution: {0}")]
    Resolution(String),

    #[error("invalid set descriptor: {0}")]
    Descriptor(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Name of the module an error originates from, for CLI diagnostics.
    pub fn module(&self) -> &'static str {
        match self {
            Error::BlockOutOfRange { .. }
            | Error::NonConvergentGenerator(_)
            | Error::TooManyItems(_)
            | Error::Descriptor(_) => "dilation_set",
            Error::Uncertified { .. } => "entropy",
            Error::ConvexityViolation(..) => "regularity",
            Error::Quadrature { .. } => "spherical",
            Error::OutOfDomain { .. } | Error::Resolution(_) => "counterexamples",
            Error::InvalidParameter(_) | Error::Io(_) | Error::Json(_) => "cli",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
