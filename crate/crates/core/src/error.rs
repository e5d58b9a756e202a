use thiserror::Error;

/// Errors surfaced by the library. The CLI maps these onto exit codes:
/// configuration/resource problems exit 1, certified failures exit 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("valuation error: {0}")]
    Valuation(String),
    #[error("resource error: {0}")]
    Resource(String),
    #[error("structural error: {0}")]
    Structure(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("certification failure: {0}")]
    Certification(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
