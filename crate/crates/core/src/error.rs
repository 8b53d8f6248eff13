use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at byte {pos}: {message}")]
    Syntax { pos: usize, message: String },

    #[error("unknown symbol `{symbol}` at byte {pos}")]
    UnknownSymbol { pos: usize, symbol: String },

    #[error("{what}: size {size} exceeds cap {cap}")]
    CapExceeded { what: String, size: u128, cap: u128 },

    #[error("no value for variable `{0}`")]
    MissingVariable(String),

    #[error("formula is not quantifier-free")]
    NotQuantifierFree,

    #[error("sentence expected, found free variables: {}", .0.join(", "))]
    FreeVariables(Vec<String>),

    #[error("invalid group: {0}")]
    InvalidGroup(String),

    #[error("invalid field spec: {0}")]
    InvalidSpec(String),

    #[error("{0}")]
    NonConvergence(String),
}

impl Error {
    pub(crate) fn syntax(pos: usize, message: impl Into<String>) -> Self {
        Error::Syntax {
            pos,
            message: message.into(),
        }
    }

    pub(crate) fn cap(what: impl Into<String>, size: u128, cap: u128) -> Self {
        Error::CapExceeded {
            what: what.into(),
            size,
            cap,
        }
    }
}
