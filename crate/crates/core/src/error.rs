use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },

    #[error("mean increment must be positive, got {mu}")]
    NonPositiveMean { mu: f64 },

    #[error("degenerate increment law (zero variance) requires allow_degenerate")]
    DegenerateVariance,

    #[error("standardized processes need a positive variance")]
    StandardizationUndefined,

    #[error("path too short: level {level} is not below the walk maximum {max}")]
    PathTooShort { level: f64, max: f64 },

    #[error("walk length cap {cap} reached before passing level {level}; is the mean misspecified?")]
    WalkCapExceeded { cap: usize, level: f64 },

    #[error("operation needs almost surely positive increments")]
    NotOrdinaryRenewal,

    #[error("empty sample")]
    EmptySample,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("cannot parse distribution `{input}`: {reason}")]
    ParseDistribution { input: String, reason: String },
}
