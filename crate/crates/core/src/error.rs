use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("value {value} outside the admissible domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("unsupported order {order} for {family} (supported: {supported})")]
    UnsupportedOrder {
        family: &'static str,
        order: usize,
        supported: &'static str,
    },

    #[error("derivation did not converge after {iterations} iterations (residual {residual:.3e})")]
    DerivationFailed { iterations: usize, residual: f64 },

    #[error("singular Jacobian at iteration {iteration}")]
    SingularSystem { iteration: usize },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("invalid quadrature policy: {0}")]
    PolicyInvalid(String),

    #[error("stencil undefined: {0}")]
    StencilUndefined(String),

    #[error("matrix rows are not translation invariant (max deviation {deviation:.3e})")]
    Inconsistent { deviation: f64 },

    #[error("no real wavenumber at Lambda = {lambda} (cutoff {cutoff:.6})")]
    StopBand { lambda: f64, cutoff: f64 },

    #[error("insufficient data: {usable} usable points, at least {required} required")]
    InsufficientData { usable: usize, required: usize },

    #[error("mass matrix is not symmetric positive definite")]
    NotSpd,

    #[error(
        "problem dimension {dim} exceeds the dense cap {cap}; use the tensor-product shortcut"
    )]
    TooLarge { dim: usize, cap: usize },

    #[error("eigenpair matching failed: {0}")]
    Pairing(String),

    #[error("{path}:{line}: {message}")]
    ConfigParse {
        path: String,
        line: usize,
        message: String,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidMesh(_)
            | Error::InvalidParameter(_)
            | Error::UnsupportedOrder { .. }
            | Error::Configuration(_)
            | Error::PolicyInvalid(_)
            | Error::ConfigParse { .. }
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}
