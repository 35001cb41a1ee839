use thiserror::Error;

/// Errors surfaced by the numerical toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A profile no longer fits the periodic box (aliasing past the boundary
    /// or loss of spectral resolution after a conformal rescaling).
    #[error("domain escape: {0}")]
    DomainEscape(String),

    /// The shooting bracket failed to converge within the iteration budget.
    #[error("shooting did not converge: {0}")]
    NoConvergence(String),

    /// A ground state was requested at an exponent it was not solved for.
    #[error("exponent mismatch: expected p = {expected}, got p = {got}")]
    ExponentMismatch { expected: f64, got: f64 },

    /// An operation that divides by a field norm received a zero field.
    #[error("zero field: {0}")]
    ZeroField(String),

    /// A mass projection or multiplier extraction hit a zero-mass component.
    #[error("zero mass in component {0}")]
    ZeroMass(usize),

    /// Kinetic energy vanished where a positive value is required.
    #[error("zero kinetic energy")]
    ZeroKinetic,

    /// Structure checks require a converged minimizer.
    #[error("result not converged (status {0})")]
    NotConverged(String),

    /// System parameters violate assumption (H); names the violated clause.
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    /// Grid construction rejected its arguments.
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    /// The time integrator produced a non-finite value.
    #[error("numerical blow-up at t = {time}")]
    NumericalBlowup { time: f64 },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("format error: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;
