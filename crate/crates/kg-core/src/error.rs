use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("unknown entity: {0:?}")]
    UnknownEntity(String),

    #[error("graph is empty")]
    EmptyGraph,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{what} did not converge within {max_iterations} iterations")]
    Convergence {
        what: &'static str,
        max_iterations: usize,
    },

    #[error("katz attenuation {alpha} is not below 1/lambda_max (estimated bound {bound})")]
    KatzAlpha { alpha: f64, bound: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
