use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("poset error: {0}")]
    Poset(String),
    #[error("identifier error: {0}")]
    Identifier(String),
    #[error("closure error: cell `{kept}` is kept but its face `{missing}` is not")]
    Closure { kept: String, missing: String },
    #[error("map error: {0}")]
    Map(String),
    #[error("illegal move: {0}")]
    IllegalMove(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("parameter error: {0}")]
    Parameter(String),
    #[error("replay failed at step {step}: {reason}")]
    Replay { step: usize, reason: String },
    #[error("endpoint mismatch: {0}")]
    Endpoint(String),
    #[error("input error: {0}")]
    Input(String),
    #[error("certificate search failed: {0}")]
    Search(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
