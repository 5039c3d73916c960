use thiserror::Error;

use crate::schedule::ScheduleError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("points live in different spaces ({left} vs {right})")]
    SpaceMismatch {
        left: &'static str,
        right: &'static str,
    },

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{name} = {value} is outside its admissible range {range}")]
    OutOfRange {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid weighted sample: {0}")]
    InvalidSample(String),

    #[error("invalid spider space: {0} legs (need at least 3)")]
    TooFewLegs(usize),

    #[error("spider point on leg {leg} but the space only has {legs} legs")]
    LegOutOfRange { leg: usize, legs: usize },

    #[error("degenerate median: the minimizer is not unique")]
    DegenerateMedian,

    #[error("{0} is not supported on this space")]
    UnsupportedSpace(&'static str),

    #[error(transparent)]
    Schedule(#[from] ScheduleError),
}
