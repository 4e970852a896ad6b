use alloc::string::String;

/// Errors raised by the probability engine and everything built on it.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Input data violates a documented invariant (negative mass, bad sums, ...).
    #[error("validation error: {0}")]
    Validation(String),
    /// A scalar argument lies outside its mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// The caller asked for something structurally invalid (bad axes, mismatched alphabets).
    #[error("usage error: {0}")]
    Usage(String),
    /// Conditioning on an event with zero probability.
    #[error("unsupported condition: axis `{axis}` value {value} has zero mass")]
    UnsupportedCondition { axis: String, value: usize },
    /// A quantity that must be nonnegative came out below tolerance.
    #[error("numerical error: {quantity} = {value:e} is below the -1e-10 tolerance")]
    Numerical { quantity: &'static str, value: f64 },
    /// Dense storage or enumeration would exceed a fixed cap.
    #[error("capacity error: {what} needs {requested} entries, cap is {limit}")]
    Capacity {
        what: &'static str,
        requested: u128,
        limit: u128,
    },
    /// A scenario cannot be materialized.
    #[error("construction error: {0}")]
    Construction(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
