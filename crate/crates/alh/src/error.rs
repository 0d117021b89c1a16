use num_complex::Complex;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum AlError {
    #[error("singular state: |1 - q_k r_k| = {value:.3e} at k = {k}")]
    SingularState { k: i64, value: f64 },

    #[error("singular transfer matrix at k = {k} (1 - q_k r_k ~ 0)")]
    SingularTransfer { k: i64 },

    #[error("a(z) vanishes at z = {z} (bound-state eigenvalue)")]
    ZeroOfA { z: Complex<f64> },

    #[error("branch violation: |q_k r_k| >= 1 at k = {k}")]
    BranchViolation { k: i64 },

    #[error("potential does not decay at window edge: |value| = {value:.3e} at k = {k}")]
    DecayViolation { k: i64, value: f64 },

    #[error("window too small: need at least {needed} sites, got {got}")]
    WindowTooSmall { needed: usize, got: usize },

    #[error("field/operator ordering mismatch: expected {expected}, got {got}")]
    OrderingMismatch { expected: String, got: String },

    #[error("window mismatch between operands")]
    WindowMismatch,

    #[error("unknown operator `{0}`")]
    UnknownOperator(String),

    #[error("no analytic variational derivative for `{0}`")]
    NoAnalyticRule(String),

    #[error("blow-up during integration at t = {t:.6}: |potential| = {value:.3e}")]
    BlowUp { t: f64, value: f64 },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, AlError>;

impl AlError {
    /// Process exit code for the CLI: 2 for usage/parse problems, 3 for
    /// numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            AlError::InvalidInput(_)
            | AlError::Io(_)
            | AlError::Json(_)
            | AlError::UnknownOperator(_) => 2,
            _ => 3,
        }
    }
}
