use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Malformed or inconsistent input.
    #[error("invalid input: {0}")]
    Input(String),
    /// An exhaustive routine declined to run because its work bound exceeds a cap.
    #[error("refused: {what} is {actual}, cap is {cap}")]
    Refused {
        what: String,
        actual: String,
        cap: String,
    },
}

impl Error {
    pub fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub fn refused(what: impl Into<String>, actual: impl ToString, cap: impl ToString) -> Self {
        Error::Refused {
            what: what.into(),
            actual: actual.to_string(),
            cap: cap.to_string(),
        }
    }

    pub fn is_refusal(&self) -> bool {
        matches!(self, Error::Refused { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
