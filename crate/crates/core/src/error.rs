use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: &'static str, reason: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("grid mismatch: {0}")]
    GridMismatch(String),

    #[error("corrected-mode denominator {denom:e} is not positive at r = {r}")]
    DegenerateDenominator { r: f64, denom: f64 },

    #[error("matrix exponential routes disagree by {0:e}")]
    ExpmDisagreement(f64),

    #[error("radial quadrature did not converge (relative change {0:e})")]
    Quadrature(f64),

    #[error("fit window holds {got} samples, need at least {need}")]
    InsufficientSamples { need: usize, got: usize },

    #[error("nonpositive value {value} at t = {t}")]
    NonPositive { t: f64, value: f64 },

    #[error("blow-up at t = {t}: {reason}")]
    BlowUp { t: f64, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name,
            reason: reason.into(),
        }
    }
}
