use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("encoding error: {0}")]
    Encoding(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("resource limit exceeded for {what}: requires {required}, budget {budget}")]
    ResourceLimit {
        what: String,
        required: String,
        budget: String,
    },
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error("precondition failed at n = {n}: {detail}")]
    Precondition { n: u64, detail: String },
    #[error("search range exhausted: {0}")]
    RangeExhausted(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub fn resource(what: impl Into<String>, required: impl ToString, budget: impl ToString) -> Self {
        Error::ResourceLimit {
            what: what.into(),
            required: required.to_string(),
            budget: budget.to_string(),
        }
    }
}
