use alloc::string::String;

use crate::value::Path;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("signature error: {0}")]
    Signature(String),
    #[error("evaluation error: {0}")]
    Eval(String),
    #[error("rule error: {0}")]
    Rule(String),
    #[error("tree error: {0}")]
    Tree(String),
    #[error("reflection error at {path}: {msg}")]
    Reflect { path: Path, msg: String },
    #[error("isomorphism error: {0}")]
    Iso(String),
    #[error("state error: {0}")]
    State(String),
}

impl Error {
    pub(crate) fn reflect(path: &Path, msg: impl Into<String>) -> Self {
        Error::Reflect {
            path: path.clone(),
            msg: msg.into(),
        }
    }
}

pub(crate) fn reflect(path: &Path, msg: impl Into<String>) -> Error {
    Error::reflect(path, msg)
}
