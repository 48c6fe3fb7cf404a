use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("parameter `{field}` = {value} out of range ({constraint})")]
    OutOfRange {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    #[error("unknown sweep axis `{0}`")]
    UnknownAxis(String),

    #[error("sweep value {value} is not valid for axis `{axis}`: {reason}")]
    BadSweepValue {
        axis: &'static str,
        value: f64,
        reason: &'static str,
    },
}

pub type Result<T> = std::result::Result<T, AnalyticsError>;
