use thiserror::Error;

/// Errors raised anywhere in the witness pipeline.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("matrix is not Hermitian (max deviation {deviation:e} > {tolerance:e})")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("eigensolver did not converge for a {dim}x{dim} matrix (norm {norm:e})")]
    EigenNonConvergence { dim: usize, norm: f64 },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("state is not a probability mixture of Gaussians: {0}")]
    NotProbabilityMixture(String),

    #[error("characteristic function vanishes near the finite-difference stencil (|chi| = {0:e})")]
    BranchCut(f64),

    #[error("finite-difference step too coarse or too fine: imaginary residue {0:e}")]
    StepSize(f64),

    #[error("model inconsistency: {0}")]
    Model(String),

    #[error("Fock cutoff {cutoff} too small: {reason}")]
    CutoffTooSmall { cutoff: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
