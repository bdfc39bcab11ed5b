//! Twin-beam states with and without inconclusive photon subtraction,
//! represented as finite sums of Gaussian forms.
//!
//! All closed forms run in double-double internally (see [`dd`]) and return
//! `f64`. The independent Fock-space cross-check lives in a separate crate.

pub mod bell;
pub mod channel;
pub mod dd;
pub mod error;
pub mod fock;
pub mod gaussian;
pub mod ips;
pub mod sweep;
pub mod teleport;

pub use error::{Error, Result};

pub use bell::{BellResult, BellTest, DetectorParams, DisplacementSettings};
pub use channel::{evolve_twb, noisy_substitution, noisy_twb_pair, ChannelParams, TwinBeamPair};
pub use fock::FockState2;
pub use gaussian::{
    squeezed_vacuum_form, twb_form, GaussianForm1, GaussianForm2, GaussianSumState,
    SingleModeSumState, TwbParams,
};
pub use ips::{ips_fock_matrix, ips_single_mode, ips_two_mode, IpsCoefficients, IpsParams};
pub use teleport::{fidelity_gaussian, fidelity_ips, relative_improvements, FidelityReport};
