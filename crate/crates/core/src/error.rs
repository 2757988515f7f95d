use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The chain fails the transition-matrix assumptions.
    #[error("invalid chain instance: {0}")]
    InvalidChain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    /// `I - M` could not be factored. Unreachable for validated chains.
    #[error("singular system (I - M); the chain admits a non-absorbing cycle")]
    Singular,

    #[error("invalid parameter `{name}`: {reason}")]
    Parameter { name: &'static str, reason: String },

    #[error("value {value} outside domain {domain}")]
    Domain { value: f64, domain: &'static str },

    /// A walk exceeded the hard step cap.
    #[error("walk from node {start} exceeded {cap} steps; instance is corrupted")]
    StepCap { start: usize, cap: usize },

    #[error("epoch mismatch: ledger at {expected}, trajectory from {got}")]
    Sequencing { expected: usize, got: usize },

    #[error("config: {0}")]
    Config(String),

    #[error("format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::Parameter {
            name,
            reason: reason.into(),
        }
    }
}
