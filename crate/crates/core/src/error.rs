use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid map parameters: {0}")]
    InvalidMap(String),

    #[error("empty box list")]
    EmptyBoxList,

    #[error("move generator exhausted at stage {0}")]
    GeneratorExhausted(usize),

    #[error("time {0} outside [0, 1]")]
    InvalidTime(f64),

    #[error("invalid schedule: {0}")]
    InvalidSchedule(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no region of the family fits inside the ball of radius {epsilon} within horizon {horizon}")]
    NoFactoring { epsilon: f64, horizon: usize },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
