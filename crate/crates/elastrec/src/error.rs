use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("mesh subdivisions must be at least 1")]
    EmptyMesh,

    #[error("field defined on a different mesh ({expected} vertices expected, got {got})")]
    MeshMismatch { expected: usize, got: usize },

    #[error("matrix is not symmetric positive definite (negative curvature at iteration {iter})")]
    NotSpd { iter: usize },

    #[error("iterative solver did not converge within {iters} iterations (residual {residual:.3e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("compact-support mode requires background Lame fields in the problem data")]
    MissingBackground,

    #[error("composed phantom violates admissibility: mu = {mu} at vertex {vertex}")]
    AdmissibilityViolation { vertex: usize, mu: f64 },

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: String,
        line: usize,
        msg: String,
    },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
