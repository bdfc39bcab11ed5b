//! CHSH-type Bell parameters for Gaussian sums.
//!
//! Every test is linear in the density matrix, so each one reduces to a
//! weighted sum over the Gaussian terms of the state.

mod homodyne;
mod onoff;
mod parity;
mod pseudospin;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_range, Result};

pub use homodyne::{bell_hd, bell_hd_with, homodyne_correlation, quadrature_moments, QuadratureMoments};
pub use onoff::{
    bell_onoff, bell_onoff_with, ch_inequality, no_click_a, no_click_b, no_click_both, ChReport,
};
pub use parity::{bell_dp, bell_dp_with};
pub use pseudospin::{bell_ps, bell_ps_with, pseudospin_correlation};

/// Quantum bound on any CHSH combination.
pub const TSIRELSON: f64 = 2.0 * std::f64::consts::SQRT_2;
/// Local-realistic bound.
pub const CLASSICAL: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BellTest {
    /// displaced parity
    Dp,
    /// homodyne with sign binning
    Hd,
    /// pseudospin
    Ps,
    /// on/off photodetection
    #[serde(rename = "onoff")]
    OnOff,
}

impl BellTest {
    pub fn name(&self) -> &'static str {
        match self {
            BellTest::Dp => "dp",
            BellTest::Hd => "hd",
            BellTest::Ps => "ps",
            BellTest::OnOff => "onoff",
        }
    }

    pub fn parse(s: &str) -> Option<BellTest> {
        match s {
            "dp" => Some(BellTest::Dp),
            "hd" => Some(BellTest::Hd),
            "ps" => Some(BellTest::Ps),
            "onoff" => Some(BellTest::OnOff),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BellResult {
    pub test: BellTest,
    pub value: f64,
}

impl BellResult {
    pub fn violates_local_realism(&self) -> bool {
        self.value.abs() > CLASSICAL
    }

    pub fn within_tsirelson(&self) -> bool {
        self.value.abs() <= TSIRELSON + 1e-9
    }
}

/// Two local settings per side for displacement-based tests.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DisplacementSettings {
    pub alpha: [Complex64; 2],
    pub beta: [Complex64; 2],
}

impl DisplacementSettings {
    /// `alpha = (sqrt J, -3 sqrt J)`, `beta = (-sqrt J, 3 sqrt J)`.
    pub fn parity(j: f64) -> Result<Self> {
        check_range("J", j, j >= 0.0, "displacement amplitude must be non-negative")?;
        let s = j.sqrt();
        Ok(DisplacementSettings {
            alpha: [Complex64::new(s, 0.0), Complex64::new(-3.0 * s, 0.0)],
            beta: [Complex64::new(-s, 0.0), Complex64::new(3.0 * s, 0.0)],
        })
    }

    /// `alpha = -beta = J`, `alpha' = -beta' = -sqrt(11) J`.
    pub fn onoff(j: f64) -> Result<Self> {
        check_range("J", j, j >= 0.0, "displacement amplitude must be non-negative")?;
        let far = -(11f64).sqrt() * j;
        Ok(DisplacementSettings {
            alpha: [Complex64::new(j, 0.0), Complex64::new(far, 0.0)],
            beta: [Complex64::new(-j, 0.0), Complex64::new(-far, 0.0)],
        })
    }
}

/// Two local measurement angles per side.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AngleSettings {
    pub a: [f64; 2],
    pub b: [f64; 2],
}

impl AngleSettings {
    pub fn pseudospin() -> Self {
        use std::f64::consts::FRAC_PI_2 as H;
        use std::f64::consts::FRAC_PI_4 as Q;
        AngleSettings { a: [0.0, H], b: [Q, -Q] }
    }

    pub fn homodyne() -> Self {
        use std::f64::consts::FRAC_PI_2 as H;
        use std::f64::consts::FRAC_PI_4 as Q;
        AngleSettings { a: [0.0, H], b: [-Q, Q] }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DetectorParams {
    eta: f64,
    dark: f64,
}

impl DetectorParams {
    pub fn new(eta: f64, dark: f64) -> Result<Self> {
        check_range("eta", eta, eta > 0.0 && eta <= 1.0, "efficiency must lie in (0, 1]")?;
        check_range("dark", dark, dark >= 0.0, "dark-count rate must be non-negative")?;
        Ok(DetectorParams { eta, dark })
    }

    pub fn ideal() -> Self {
        DetectorParams { eta: 1.0, dark: 0.0 }
    }

    pub fn eta(&self) -> f64 {
        self.eta
    }

    pub fn dark(&self) -> f64 {
        self.dark
    }
}

/// `E(1,1) + E(1,2) + E(2,1) - E(2,2)` with `E(i, j)` from `corr`.
pub(crate) fn chsh<E>(mut corr: impl FnMut(usize, usize) -> std::result::Result<f64, E>) -> std::result::Result<f64, E> {
    Ok(corr(0, 0)? + corr(0, 1)? + corr(1, 0)? - corr(1, 1)?)
}
