use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("parameter `{name}` = {value} is out of range: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },
    #[error("singular evaluation: {0}")]
    Singularity(String),
    #[error("product transfer function needs at least one factor")]
    EmptyProduct,
    #[error("kernel is not causal: anti-causal residual {residual:e} exceeds {threshold:e}")]
    CausalityViolation { residual: f64, threshold: f64 },
    #[error("kernel is not real: imaginary residual {residual:e} exceeds {threshold:e}")]
    NotReal { residual: f64, threshold: f64 },
    #[error("grid aliasing: taps moved by {difference:e} between grid {grid} and {doubled} (limit {threshold:e})")]
    Aliasing {
        grid: usize,
        doubled: usize,
        difference: f64,
        threshold: f64,
    },
    #[error("non-finite sample at position {0}")]
    NonFinite(usize),
    #[error("autoregression ({beta1}, {beta2}) is not stationary")]
    NonStationary { beta1: f64, beta2: f64 },
    #[error("degenerate denominator {0:e} in error ratio")]
    DegenerateDenominator(f64),
    #[error("series does not cover time index {0}")]
    MissingIndex(i64),
    #[error("malformed csv: {0}")]
    Csv(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(name: &'static str, value: f64, expected: &'static str) -> Error {
    Error::Domain {
        name,
        value,
        expected,
    }
}
