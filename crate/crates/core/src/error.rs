use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    Input(String),

    #[error("unsupported capability: {0}")]
    Unsupported(String),

    #[error("evaluation budget exceeded: {0}")]
    Budget(String),

    #[error("objective appears non-coercive: {0}")]
    NonCoercive(String),

    #[error("insufficient data for a rate fit: {usable} usable points (need at least {required}), {excluded} excluded at the gap floor")]
    InsufficientData {
        usable: usize,
        excluded: usize,
        required: usize,
    },

    #[error("configuration error at `{field}`: {message}")]
    Config { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}
