use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("invalid grid spec: {0}")]
    InvalidGrid(String),

    #[error("invalid genome: {0}")]
    InvalidGenome(String),

    #[error("archive is empty")]
    EmptyArchive,

    #[error("archive still empty after {evaluations} random genomes; evaluator `{evaluator}` never returned a valid result")]
    NoValidEvaluations { evaluator: String, evaluations: u64 },

    #[error("kernel matrix is ill-conditioned (condition estimate {condition:.3e}) even with jitter {jitter:e}")]
    IllConditioned { condition: f64, jitter: f64 },

    #[error("candidate list is empty")]
    NoCandidates,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("trial evaluation failed: {0}")]
    Evaluation(String),

    #[error("archive format error at line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("trajectory format error at line {line}: {message}")]
    Trajectory { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
