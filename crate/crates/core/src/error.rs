use std::path::PathBuf;

use crate::sample::Codec;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Position-annotated failure from the program-text parser.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("parse error at byte {offset}: expected {expected}")]
pub struct ParseError {
    pub offset: usize,
    pub expected: String,
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("distinguisher family `{0}` has no members")]
    EmptyFamily(String),

    #[error("distinguisher `{distinguisher}` cannot read {codec} payloads")]
    CodecMismatch { distinguisher: String, codec: Codec },

    #[error("sample `{sample}` has no feature `{feature}`")]
    MissingFeature { sample: String, feature: String },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("duplicate sample id `{0}`")]
    DuplicateId(String),

    #[error("feature `{feature}` of sample `{sample}` is not finite")]
    NonFiniteFeature { sample: String, feature: String },

    #[error("value {value} from `{source_name}` is outside [0, 1]")]
    OutOfUnitInterval { source_name: String, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("program needs {needed} steps but the budget is {budget}")]
    StepBudgetExceeded { needed: usize, budget: usize },

    #[error("no program within the bound reproduces the prefix")]
    NoExplanation,

    #[error("no acceptable item after {0} attempts")]
    GenerationExhausted(usize),

    #[error("symbol {symbol} is outside the alphabet of size {alphabet}")]
    OutOfAlphabet { symbol: u32, alphabet: u32 },

    #[error("malformed environment: {0}")]
    MalformedEnv(String),

    #[error("malformed policy: {0}")]
    MalformedPolicy(String),

    #[error("suite has no holdout categories")]
    EmptyHoldout,

    #[error("{path}:{line}: {message}")]
    Data {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error("report has no run manifest")]
    MissingManifest,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn data(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Data {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
