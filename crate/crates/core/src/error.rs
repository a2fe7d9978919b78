use thiserror::Error;

/// Errors produced while building or solving Dicke Hamiltonians.
#[derive(Debug, Error)]
pub enum DickeError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("basis dimension {dim} exceeds the configured budget of {max_dim}")]
    Resource { dim: usize, max_dim: usize },

    #[error("no convergence within budget after {} cutoffs (last cutoff {})", path.len(), path.last().map(|p| p.0).unwrap_or(0))]
    NonConvergence { path: Vec<(u32, f64)> },

    #[error("Fock cutoff {fock_cutoff} captures only {captured:.12} of the state norm")]
    NormLoss { fock_cutoff: u32, captured: f64 },

    #[error("eigensolver failed on a {dim}x{dim} matrix (max |entry| {max_abs:.3e}): {message}")]
    Solver {
        dim: usize,
        max_abs: f64,
        message: String,
    },

    #[error("matrix dump parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DickeError>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(DickeError::Domain(msg.into()))
}
