use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("energy {energy} lies outside the band [{lower}, {upper}]")]
    OutOfBand { energy: f64, lower: f64, upper: f64 },

    #[error("wave number {k} is outside the first Brillouin zone")]
    WaveNumberOutOfRange { k: f64 },

    #[error("linear system is numerically singular (condition estimate {condition:.3e})")]
    SingularSystem { condition: f64 },

    #[error("Newton iteration did not converge after {iterations} iterations (|residual| = {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("mode index {n} is outside the allowed range [{min}, {max}]")]
    ModeIndexOutOfRange { n: i64, min: i64, max: i64 },

    #[error("atom {atom} has zero detuning from the cavity frequency")]
    ZeroDetuning { atom: usize },

    #[error("coupling strength must be positive for resonance analysis (got {j})")]
    ZeroCoupling { j: f64 },

    #[error("matching denominator vanishes at k = {k}")]
    SingularMatching { k: String },

    #[error("root k = {k_re} belongs to another mode: expected near q = {q} for n = {n}")]
    WrongMode { n: i64, k_re: f64, q: f64 },

    #[error("amplitude routes disagree by {mismatch:.3e}; k is not a resonance root")]
    InconsistentAmplitudes { mismatch: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
