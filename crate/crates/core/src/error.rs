use thiserror::Error;

pub type Result<T> = std::result::Result<T, NcError>;

#[derive(Debug, Error)]
pub enum NcError {
    #[error("input error: {0}")]
    Input(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("reduction step budget exceeded ({0} steps)")]
    StepBudget(usize),

    #[error("window insufficient: {0}")]
    Window(String),
}
