use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("feature vector must have at least one component")]
    EmptyFeatures,
    #[error("non-finite activation {value} at neuron {index}")]
    NonFinite { index: usize, value: f64 },
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },
    #[error("neuron id {id} out of range for {n} neurons")]
    NeuronOutOfRange { id: usize, n: usize },
    #[error("invalid spike packet: {0}")]
    Packet(String),
    #[error("invalid traversal: {0}")]
    Traversal(String),
    #[error("invalid parameter `{name}`: {reason}")]
    Param { name: String, reason: String },
    #[error("negative inter-packet interval {0} s")]
    NegativeInterval(f64),
    #[error("class index {index} out of range for {classes} classes")]
    ClassOutOfRange { index: usize, classes: usize },
    #[error("empty class `{0}`: no training traversals")]
    EmptyClass(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("config error at `{key}`: {reason}")]
    Config { key: String, reason: String },
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::Param {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
