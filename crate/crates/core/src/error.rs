use alloc::string::String;
use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A numeric argument fell outside the range an operation is defined on.
    #[error("{name} = {value} is outside {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    /// An environment or policy description cannot be realised.
    #[error("invalid configuration: {0}")]
    Config(String),
    /// A policy was driven out of order (choose/observe sequencing or clock mismatch).
    #[error("policy contract violated: {0}")]
    Contract(String),
    /// A model invariant failed on a simulated path.
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<f64> {
    if value >= lo && value <= hi {
        Ok(value)
    } else {
        Err(Error::Domain { name, value, range })
    }
}

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    check_range(name, value, 0.0, 1.0, "[0, 1]")
}
