use thiserror::Error;

/// Errors raised anywhere in the pipeline.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum LleError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("regime error: {0}")]
    Regime(String),

    #[error("requested class {requested} but the spectrum gives {found}")]
    WrongClass { requested: String, found: String },

    #[error("ambiguous classification: {0}")]
    AmbiguousClassification(String),

    #[error("near-singular linear system (condition number {cond:.3e})")]
    NearSingular { cond: f64 },

    #[error("projection {name} has imaginary part {imag:.3e}")]
    NonRealProjection { name: String, imag: f64 },

    #[error("sign violation: {0}")]
    SignViolation(String),

    #[error("basis mismatch: {0}")]
    BasisMismatch(String),

    #[error("grid too coarse: differentiation error {estimate:.3e} against residual {residual:.3e}")]
    GridTooCoarse { estimate: f64, residual: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("Newton iteration did not converge after {iterations} steps (defect {defect:.3e})")]
    NoConvergence { iterations: usize, defect: f64 },

    #[error("singular Jacobian in Newton iteration")]
    SingularJacobian,

    #[error("coefficient cross-check failed: {0}")]
    CrossCheck(String),

    #[error("verification failed: {0}")]
    Verification(String),

    #[error("io error: {0}")]
    Io(String),
}

impl LleError {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            LleError::CrossCheck(_) => 3,
            LleError::Regime(_) => 4,
            LleError::Verification(_)
            | LleError::GridTooCoarse { .. }
            | LleError::NoConvergence { .. }
            | LleError::SingularJacobian => 5,
            LleError::Io(_) => 1,
            _ => 2,
        }
    }
}

impl From<std::io::Error> for LleError {
    fn from(e: std::io::Error) -> Self {
        LleError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, LleError>;
