use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mode index {mode} out of range for space with {n_modes} modes")]
    ModeOutOfRange { mode: usize, n_modes: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error(
        "truncation guard violated: |alpha|^2 = {alpha_sq:.4} exceeds dim/4 = {limit:.4} \
         for mode of dimension {dim}"
    )]
    TruncationGuard { alpha_sq: f64, limit: f64, dim: usize },

    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-Hermitian Hamiltonian at t = {t}: max deviation {dev:.3e}")]
    NonHermitian { t: f64, dev: f64 },

    #[error("integration failure: {0}")]
    Integration(String),
}

pub type Result<T> = std::result::Result<T, Error>;
