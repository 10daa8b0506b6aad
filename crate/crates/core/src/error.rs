use thiserror::Error;

/// Phase point reported alongside integration failures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LastState {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("{potential}: coordinate {q} outside the potential's domain")]
    Domain { potential: &'static str, q: f64 },

    #[error("exponent 2*gamma*t = {exponent} exceeds the cap {cap}")]
    OverflowGuard { exponent: f64, cap: f64 },

    #[error("step size {h:e} fell below h_min at t = {}", last.t)]
    StepSizeUnderflow { h: f64, last: LastState },

    #[error("trajectory left the potential domain at t = {}", last.t)]
    DomainExit { last: LastState },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("{id} is singular here{}", sample.map(|i| format!(" (sample {i})")).unwrap_or_default())]
    SingularPoint { id: String, sample: Option<usize> },

    #[error("{id} is bound to the {expected} potential, got {found}")]
    PotentialMismatch {
        id: String,
        expected: &'static str,
        found: &'static str,
    },

    #[error("chart {chart} is outside its validity window{}", sample.map(|i| format!(" (sample {i})")).unwrap_or_default())]
    OutOfWindow {
        chart: String,
        sample: Option<usize>,
    },

    #[error("generator {name}: {what} partial disagrees with finite differences (rel {rel:e})")]
    PartialAudit {
        name: String,
        what: &'static str,
        rel: f64,
    },
}

impl Error {
    /// Attach a sample index to errors that carry one.
    pub fn at_sample(self, index: usize) -> Self {
        match self {
            Error::SingularPoint { id, .. } => Error::SingularPoint {
                id,
                sample: Some(index),
            },
            Error::OutOfWindow { chart, .. } => Error::OutOfWindow {
                chart,
                sample: Some(index),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
