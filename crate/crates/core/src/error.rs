use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point ({re}, {im}) lies outside the grid")]
    OutOfBounds { re: f64, im: f64 },

    #[error("grid of {cells} cells exceeds the memory cap of {cap} cells")]
    GridTooLarge { cells: u64, cap: u64 },

    #[error("{what}: argument {value} outside the domain")]
    Domain { what: &'static str, value: f64 },

    #[error("invalid parameter `{key}`: {reason}")]
    InvalidParameter { key: String, reason: String },

    #[error("need at least 3 usable scales, got {usable}")]
    TooFewScales { usable: usize },

    #[error("start point lies inside the obstacle")]
    StartInObstacle,

    #[error("path not stopped; max attained distance {max_attained}")]
    NotStopped { max_attained: f64 },

    #[error("horizon exhausted before the stopping event; attained {attained}")]
    HorizonExhausted { attained: f64 },

    #[error("n = {n} exceeds the enumeration cap {cap}")]
    OverCap { n: usize, cap: usize },

    #[error("count table has no entry for n = {n}")]
    MissingEntry { n: usize },

    #[error("configuration has no open edge")]
    EmptyConfiguration,

    #[error("swallowed at time 0: x = 0 is the driving point")]
    SwallowedAtStart,

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),

    #[error("malformed input: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub fn param(key: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            key: key.into(),
            reason: reason.into(),
        }
    }
}
