use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    InvalidModulus(u64),

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("ideal is not m-primary within truncation order {order}")]
    NotMPrimary { order: u32 },

    #[error("truncation order {available} is insufficient (need {needed})")]
    TruncationInsufficient { needed: u32, available: u32 },

    #[error("colon by the zero element")]
    ZeroDivisorInput,

    #[error("operands live in different algebras")]
    AlgebraMismatch,

    #[error("polynomial fit unstable: {0}")]
    FitUnstable(String),

    #[error("coefficient consistency failure: {0}")]
    ConsistencyFailure(String),

    #[error("no certified joint reduction after {attempts} attempts")]
    SamplingExhausted { attempts: u32 },

    #[error("superficial condition not observed within window: {0}")]
    SuperficialityNotObserved(String),

    #[error("internal identity failure: {0}")]
    InternalIdentityFailure(String),

    #[error("Ratliff-Rush chain did not stabilize by k = {k_max}")]
    StabilizationNotReached { k_max: u32 },

    #[error("alpha/beta mismatch at index {index}: fits give {from_fits}, lengths give {from_lengths}")]
    AlphaMismatch {
        index: u32,
        from_fits: i64,
        from_lengths: i64,
    },

    #[error("cross-check failure: {0}")]
    CrossCheckFailure(String),

    #[error("pair does not generate an m-primary ideal")]
    NotRegularSequence,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub fn is_truncation(&self) -> bool {
        matches!(self, Error::TruncationInsufficient { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
