use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid mesh: {0}")]
    Validation(String),

    #[error("mesh topology error: {0}")]
    Topology(String),

    #[error("mesh generation failed: {0}")]
    Generation(String),

    #[error("element error on triangle {triangle}: {message}")]
    Element { triangle: usize, message: String },

    #[error("problem is not well posed: {0}")]
    WellPosedness(String),

    #[error("evaluation error: {0}")]
    Evaluation(String),

    #[error("unknown benchmark problem {0} (expected 1..=10)")]
    UnknownProblem(u32),

    #[error("linear solver failed: {0}")]
    Singular(String),

    #[error("relative residual {residual:.3e} exceeds {threshold:.1e}")]
    Accuracy { residual: f64, threshold: f64 },

    #[error("convergence study error: {0}")]
    Study(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn element(triangle: usize, message: impl Into<String>) -> Self {
        Error::Element {
            triangle,
            message: message.into(),
        }
    }
}
