use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (‖H − H*‖ = {defect:.3e}, allowed {allowed:.3e})")]
    NotHermitian { defect: f64, allowed: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps")]
    NoConvergence { sweeps: usize },

    #[error("matrix is not positive semidefinite (eigenvalue {eigenvalue:.3e} below {floor:.3e})")]
    NotPsd { eigenvalue: f64, floor: f64 },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("point {0} is outside the kernel domain")]
    OutOfDomain(String),

    #[error("reproducing kernel at {0} has (numerically) zero norm")]
    DegenerateKernel(String),

    #[error("invalid sample plan: {0}")]
    InvalidPlan(String),

    #[error("exponent p = {0} must satisfy p ≥ 1")]
    BadExponent(f64),

    #[error("bad parameters for {check}: {reason}")]
    BadParams { check: String, reason: String },

    #[error("f(t)·g(t) ≠ t at t = {t:.6e} (product {product:.6e})")]
    FgProductMismatch { t: f64, product: f64 },

    #[error("unknown checker `{0}`")]
    UnknownChecker(String),

    #[error("bad configuration: {0}")]
    BadConfig(String),

    #[error("i/o failure: {0}")]
    Io(#[from] std::io::Error),

    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn bad_params(check: &str, reason: impl Into<String>) -> Self {
        Error::BadParams {
            check: check.to_string(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
