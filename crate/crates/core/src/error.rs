use alloc::string::String;

/// Errors raised by the simulation and analysis kernels.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// A quantum number or argument outside its allowed range.
    #[error("domain error: {0}")]
    Domain(String),
    /// Missing or inconsistent configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// The trap does not support a stable linear crystal.
    #[error("unstable crystal: negative curvature along {direction} (eigenvalue {eigenvalue:e})")]
    Instability { direction: &'static str, eigenvalue: f64 },
    /// Adaptive integration could not meet its tolerance.
    #[error("integrator failure at t = {time:e} s (step {step:e} s, {steps} steps): {reason}")]
    Integrator {
        time: f64,
        step: f64,
        steps: usize,
        reason: &'static str,
    },
    /// Generic numerical failure (non-convergence, singular system).
    #[error("numerical failure: {0}")]
    Numerical(String),
    /// A value fell outside the invertible or physical range.
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// Ramsey fringe contrast is zero or negative.
    #[error("degenerate contrast {0}")]
    DegenerateContrast(f64),
    /// Inferred magnetic field has the wrong sign.
    #[error("sign convention error: inferred field {0} G is not positive")]
    SignConvention(f64),
    /// Linear fit design matrix is rank deficient.
    #[error("degenerate fit: {0}")]
    DegenerateFit(String),
    /// Exact frequency arithmetic overflowed.
    #[error("precision error: {0}")]
    Precision(String),
    /// Not enough data to form an estimate.
    #[error("insufficient data: {0}")]
    InsufficientData(String),
}

pub type Result<T, E = Error> = core::result::Result<T, E>;
