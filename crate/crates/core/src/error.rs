use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("invalid input: {0}")]
    Input(String),

    #[error("singular material: Poisson ratio {nu} outside [0, 0.5)")]
    SingularMaterial { nu: f64 },

    #[error("element {element}: non-positive Jacobian determinant {det:e}")]
    Jacobian { element: usize, det: f64 },

    /// Cholesky pivot collapsed; usually an unconstrained rigid-body mode.
    #[error("singular system: pivot {pivot:e} at equation {equation} (diagonal {diagonal:e})")]
    SingularSystem {
        equation: usize,
        pivot: f64,
        diagonal: f64,
    },

    #[error("solver failure: {0}")]
    Solver(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: parse error at line {line}, column {column}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        column: usize,
        message: String,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
