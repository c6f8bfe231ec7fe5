use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("register width mismatch: expected {expected} bits, got {actual}")]
    RegisterWidth { expected: usize, actual: usize },

    #[error("invalid peptide: {0}")]
    InvalidPeptide(String),

    #[error("instance too small: {beads} beads leave no free turns (need at least 4)")]
    InstanceTooSmall { beads: usize },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("capacity exceeded: {what} needs {requested}, limit is {limit}")]
    Capacity {
        what: &'static str,
        requested: usize,
        limit: usize,
    },

    #[error("parameter count mismatch: circuit has {expected} slots, got {actual} values")]
    ParameterCount { expected: usize, actual: usize },

    #[error("objective returned {value} at params {params:?}")]
    NonFiniteObjective { params: Vec<f64>, value: f64 },

    #[error("calibration matrix is ill-conditioned (condition number {condition:e})")]
    IllConditioned { condition: f64 },

    #[error("sample set is empty")]
    EmptySamples,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad input rather than a failed computation.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::RegisterWidth { .. }
                | Error::InvalidPeptide(_)
                | Error::InstanceTooSmall { .. }
                | Error::Schema(_)
                | Error::Data(_)
                | Error::ParameterCount { .. }
                | Error::InvalidConfig(_)
                | Error::Parse(_)
                | Error::Io(_)
                | Error::Json(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
