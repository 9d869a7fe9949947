use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("matrix is not Hermitian (max |M - M†| entry = {deviation:.3e})")]
    HermiticityViolation { deviation: f64 },

    #[error("matrix is not positive semidefinite (min eigenvalue = {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("Jacobi eigensolver did not converge within {0} sweeps")]
    EigenNonConvergence(usize),

    #[error("matrix is numerically singular")]
    SingularMatrix,

    #[error("postselection impossible: output trace {trace:.3e} is not positive")]
    PostselectionImpossible { trace: f64 },

    #[error("Kraus set is not trace nonincreasing (max eigenvalue of sum K†K = {max_eigenvalue})")]
    NotTraceNonincreasing { max_eigenvalue: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("integration unstable: state eigenvalue {min_eigenvalue:.3e} < -1e-7 even after halving the step")]
    IntegrationUnstable { min_eigenvalue: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
