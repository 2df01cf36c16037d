use std::fmt;

use crate::midline::Midline;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the toolkit reports. The `kind` string of each variant is
/// what ends up in `gaps.csv` and in CLI diagnostics.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),

    #[error("empty input: {0}")]
    EmptyInput(String),

    #[error("ambiguous topology: {0}")]
    AmbiguousTopology(String),

    #[error("empty sequence: {0}")]
    EmptySequence(String),

    #[error("degenerate profile: {0}")]
    DegenerateProfile(String),

    #[error("degenerate field: {0}")]
    DegenerateField(String),

    #[error("simulation diverged: {0}")]
    Diverged(Box<Divergence>),

    #[error("run failed: {0}")]
    RunFailed(String),

    #[error("{path}:{line}: {message}")]
    Config {
        path: String,
        line: usize,
        message: String,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument(_) => "invalid-argument",
            Error::DegenerateGeometry(_) => "degenerate-geometry",
            Error::EmptyInput(_) => "empty-input",
            Error::AmbiguousTopology(_) => "ambiguous-topology",
            Error::EmptySequence(_) => "empty-sequence",
            Error::DegenerateProfile(_) => "degenerate-profile",
            Error::DegenerateField(_) => "degenerate-field",
            Error::Diverged(_) => "simulation-diverged",
            Error::RunFailed(_) => "run-failed",
            Error::Config { .. } => "config",
            Error::Parse(_) => "parse",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}

/// Diagnostics for a simulation that produced a non-finite or overstretched
/// state, together with every frame emitted before the failure.
#[derive(Debug, Clone)]
pub struct Divergence {
    pub step: u64,
    pub time: f64,
    pub reason: String,
    pub partial: Vec<Midline>,
}

impl fmt::Display for Divergence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} at step {} (t = {} s), {} frame(s) recovered",
            self.reason,
            self.step,
            self.time,
            self.partial.len()
        )
    }
}
