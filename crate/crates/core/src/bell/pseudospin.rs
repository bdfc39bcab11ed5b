use std::f64::consts::PI;

use super::{chsh, AngleSettings, BellResult, BellTest};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gaussian::GaussianSumState;

/// `<(cos t_a S_z + sin t_a S_x) (cos t_b S_z + sin t_b S_x)>` with the
/// pseudospin built from parity (`S_z`) and the sign of position (`S_x`).
pub fn pseudospin_correlation(state: &GaussianSumState, theta_a: f64, theta_b: f64) -> Result<f64> {
    let zz = Dd::new(theta_a.cos() * theta_b.cos()) * 0.25;
    let xx = Dd::new(theta_a.sin() * theta_b.sin()) * (2.0 / PI);
    let mut acc = Dd::ZERO;
    for (c, form) in state.dd_terms() {
        let delta = form.delta_dd();
        if delta <= 0.0 {
            return Err(Error::Unphysical(format!("term determinant {}", delta.to_f64())));
        }
        let sx = (form.hd() / delta.sqrt()).atan() / delta;
        acc += *c * (zz + xx * sx);
    }
    Ok((acc / state.norm_dd()).to_f64())
}

pub fn bell_ps(state: &GaussianSumState) -> Result<BellResult> {
    bell_ps_with(state, &AngleSettings::pseudospin())
}

pub fn bell_ps_with(state: &GaussianSumState, angles: &AngleSettings) -> Result<BellResult> {
    let value = chsh(|i, j| pseudospin_correlation(state, angles.a[i], angles.b[j]))?;
    Ok(BellResult { test: BellTest::Ps, value })
}
