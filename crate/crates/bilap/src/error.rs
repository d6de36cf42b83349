use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("factorization breakdown (matrix not positive definite): {0}")]
    Factorization(String),

    #[error("eigensolver stalled: achieved residual {achieved:e} after {sweeps} sweeps")]
    NoConvergence { achieved: f64, sweeps: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("singular pencil: undamped resonance near sigma = {0}")]
    Resonance(f64),

    #[error("near-unobservable span: gramian condition number {0:.3e}")]
    NearUnobservable(f64),

    #[error("quadrature underresolved: relative change {0:.3e} under grid refinement")]
    Underresolved(f64),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
