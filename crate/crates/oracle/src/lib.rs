//! Independent Fock-space reference implementation used to cross-check the
//! Gaussian closed forms in `twinbeam`.
//!
//! The main route works on explicit truncated density matrices: photon
//! subtraction is a beam splitter followed by an on/off detector, and
//! observables are traced against matrix elements of displacement,
//! parity and quadrature projectors. Noisy inputs, whose Fock expansion is
//! not finite in practice, go through [`phase_space`] instead.

pub mod check;
pub mod measure;
pub mod phase_space;
pub mod quadrature;
pub mod special;
pub mod states;
pub mod teleport;

pub use check::{run_checks, CheckGrid, CheckOptions, OracleReport};
pub use states::{apply_ips, build_twb, recommended_cutoff};

#[derive(Clone, Copy, Debug)]
pub struct OracleConfig {
    /// largest density matrix the oracle may allocate, in bytes
    pub memory_budget: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        OracleConfig { memory_budget: 2 << 30 }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum OracleError {
    #[error("cutoff {cutoff} needs {bytes} bytes, over the budget of {budget}")]
    Budget { cutoff: usize, bytes: usize, budget: usize },
    #[error(transparent)]
    Core(#[from] twinbeam::Error),
    #[error("truncated state lost too much weight: trace {trace} at cutoff {cutoff}")]
    Truncation { cutoff: usize, trace: f64 },
}

pub type Result<T> = std::result::Result<T, OracleError>;
