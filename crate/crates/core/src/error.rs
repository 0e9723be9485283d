use thiserror::Error;

/// Errors raised by the laboratory. Numeric context is widened to `f64`.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("parameter `{name}` = {value} outside {range}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        range: &'static str,
    },
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("curvature profile evaluated at r = {r}, outside its domain [0, {end})")]
    ProfileDomain { r: f64, end: f64 },
    #[error("integrator step underflow at r = {r} (step {step})")]
    StepUnderflow { r: f64, step: f64 },
    #[error("integrator exceeded {steps} steps before reaching r = {r}")]
    TooManySteps { r: f64, steps: usize },
    #[error("radius {r} outside the solved range [0, {r_max}]")]
    OutOfRange { r: f64, r_max: f64 },
    #[error("singular evaluation: {0}")]
    Singular(&'static str),
    #[error("profiles not ordered at r = {r}: low = {low}, high = {high}")]
    NotOrdered { r: f64, low: f64, high: f64 },
    #[error("non-positive {what} at r = {r} (value {value})")]
    NonPositive {
        what: &'static str,
        r: f64,
        value: f64,
    },
    #[error("no stabilization: last change {change} after {doublings} domain doublings")]
    NotStabilized { change: f64, doublings: usize },
    #[error("root not bracketed: h(0) = {h_start}, h((gamma-1)/2) = {h_end}")]
    RootNotBracketed { h_start: f64, h_end: f64 },
    #[error("insufficient domain: need r = {needed}, available {available}")]
    InsufficientDomain { needed: f64, available: f64 },
    #[error("Newton iteration failed at t = {t} with residual {residual} (dt floor {dt})")]
    NewtonFailure { t: f64, residual: f64, dt: f64 },
    #[error("scheme violation: {0}")]
    SchemeViolation(String),
    #[error("quadrature produced a non-finite value: {0}")]
    Quadrature(String),
    #[error("volume overflow at R = {0}")]
    Overflow(f64),
}

pub type Result<T> = std::result::Result<T, LabError>;

/// Validate `lo <= value <= hi`.
pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    lo: f64,
    hi: f64,
    range: &'static str,
) -> Result<()> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(LabError::InvalidParameter { name, value, range })
    }
}
