use thiserror::Error;

/// Errors raised by the interval, function, projection and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid interval: lower endpoint {lo} exceeds upper endpoint {hi}")]
    Inverted { lo: f64, hi: f64 },

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("arithmetic result out of range: {0}")]
    Range(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("point {t} outside domain [{a}, {b}]")]
    Domain { t: f64, a: f64, b: f64 },

    #[error("validity violated at t = {t}: lower {lo} > upper {hi}")]
    Validity { t: f64, lo: f64, hi: f64 },

    #[error("kernel returned an invalid interval at (t, s) = ({t}, {s}): {reason}")]
    Kernel { t: f64, s: f64, reason: String },

    #[error("forcing cannot be manufactured at t = {t}: solution width {solution_width} is smaller than integral width {integral_width}")]
    Manufacture {
        t: f64,
        solution_width: f64,
        integral_width: f64,
    },

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
