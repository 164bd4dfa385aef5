use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid n-gram order {0}: must be at least 1")]
    InvalidOrder(usize),

    #[error("corpus is empty after pre-processing")]
    EmptyCorpus,

    #[error("cannot estimate discounts for order {order}: {reason}")]
    DiscountEstimation { order: usize, reason: String },

    #[error("fallback discount {0} must lie in (0, 1]")]
    InvalidFallback(f64),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("no gold label for tweet id {0}")]
    MissingGold(String),

    #[error("invalid gold labels: {0}")]
    InvalidGold(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        Error::Parse { line, message: message.into() }
    }
}
