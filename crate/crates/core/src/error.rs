use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter {name} = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("not a physical Gaussian form: {0}")]
    Unphysical(String),

    #[error("subtraction click probability vanishes ({0})")]
    ZeroProbability(&'static str),

    #[error("Fock cutoff {cutoff} too small: truncated trace {trace:.3e} of {expected:.3e}")]
    CutoffTooSmall {
        cutoff: usize,
        trace: f64,
        expected: f64,
    },

    #[error("correlation coefficient {0} outside [-1, 1]")]
    CorrelationOutOfRange(f64),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("bad configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_range(
    name: &'static str,
    value: f64,
    ok: bool,
    reason: &'static str,
) -> Result<()> {
    if ok && value.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value, reason })
    }
}
