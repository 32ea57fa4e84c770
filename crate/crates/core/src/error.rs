use thiserror::Error;

/// Errors shared by the solvers in this crate.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A Cholesky factorization hit a non-positive pivot: the overlap matrix
    /// is numerically singular at the working precision. Raising
    /// `decimal_digits` usually fixes it.
    #[error("matrix ill-conditioned at working precision (pivot {index}: {detail})")]
    IllConditioned { index: usize, detail: String },

    /// The Jacobi eigensolver did not reach its off-diagonal threshold
    /// within the sweep cap.
    #[error("eigensolver did not converge after {sweeps} sweeps (off-norm {off_norm})")]
    NoConvergence { sweeps: usize, off_norm: String },

    /// A Hankel determinant of dimension D with offset d needs at least
    /// 2D + d series coefficients.
    #[error("series too short: have {have} coefficients, need {need}")]
    InsufficientCoefficients { have: usize, need: usize },

    /// Exact-mode series generation past the configured cap.
    #[error("exact series of length {requested} exceeds cap {cap}")]
    ResourceLimit { requested: usize, cap: usize },

    /// A root matched the variational bounds of both partner Hamiltonians
    /// and the interleaving order could not break the tie.
    #[error("ambiguous classification of root {value}: {detail}")]
    AmbiguousClassification { value: String, detail: String },

    /// Invalid argument or configuration value.
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
