use core::fmt;

use crate::dist::Family;

/// Validation and domain errors for chart construction, stepping, and
/// calibrated sampling.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Error {
    /// An input that must be finite was NaN or infinite.
    NonFinite { what: &'static str },
    /// The number of streams must be at least 1.
    InvalidStreams { streams: u32 },
    /// The smoothing constant must satisfy 0 < lambda <= 1.
    InvalidLambda { lambda: f64 },
    /// The control-limit multiplier must be positive and finite.
    InvalidLimit { limit: f64 },
    /// The in-control proportion must lie strictly between 0 and 1.
    InvalidProportion { p0: f64 },
    /// The shift magnitude is outside the representable range for the scenario.
    InvalidDelta { delta: f64, max: f64 },
    /// p1 = 1 requires an infinite location shift for this family; the
    /// `direct` family draws the same counts exactly.
    ShiftUnreachable { family: Family },
    /// Continuous calibration is defined for the canonical p0 = 1/2 only.
    ScenarioNotCanonical { p0: f64 },
    /// A slice argument had the wrong length.
    LengthMismatch { expected: usize, got: usize },
    /// Indicators must be 0 or 1.
    InvalidIndicator { value: u8 },
    /// The period index must be at least 1.
    ZeroPeriods,
    /// A count exceeded its maximum possible value.
    CountExceedsTotal { count: u64, max: u64 },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::NonFinite { what } => write!(f, "{what} must be finite"),
            Error::InvalidStreams { streams } => {
                write!(f, "stream count must be at least 1, got {streams}")
            }
            Error::InvalidLambda { lambda } => {
                write!(f, "smoothing constant must be in (0, 1], got {lambda}")
            }
            Error::InvalidLimit { limit } => {
                write!(f, "limit multiplier must be positive and finite, got {limit}")
            }
            Error::InvalidProportion { p0 } => {
                write!(f, "in-control proportion must be in (0, 1), got {p0}")
            }
            Error::InvalidDelta { delta, max } => {
                write!(f, "shift magnitude must be in [0, {max}], got {delta}")
            }
            Error::ShiftUnreachable { family } => write!(
                f,
                "p1 = 1 is unreachable by a finite location shift for the {family} family; \
                 use the direct family instead"
            ),
            Error::ScenarioNotCanonical { p0 } => write!(
                f,
                "continuous calibration requires the canonical p0 = 0.5, got p0 = {p0}"
            ),
            Error::LengthMismatch { expected, got } => {
                write!(f, "expected {expected} values, got {got}")
            }
            Error::InvalidIndicator { value } => {
                write!(f, "indicators must be 0 or 1, got {value}")
            }
            Error::ZeroPeriods => write!(f, "period index must be at least 1"),
            Error::CountExceedsTotal { count, max } => {
                write!(f, "count {count} exceeds maximum {max}")
            }
        }
    }
}

impl core::error::Error for Error {}
