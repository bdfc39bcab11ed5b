use std::f64::consts::PI;

use super::{chsh, AngleSettings, BellResult, BellTest};
use crate::dd::Dd;
use crate::error::{check_range, Error, Result};
use crate::gaussian::{GaussianForm2, GaussianSumState};

/// Second moments of `X_a = Re(alpha e^{-i theta})`, `X_b = Re(beta e^{-i phi})`
/// for one normalized term; vacuum has variance 1/4 in these units.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureMoments {
    pub var_a: f64,
    pub var_b: f64,
    pub cov: f64,
}

/// The quadrature convention used by the homodyne test and its oracle.
/// `noise` is the extra variance per quadrature, `(1 - eta) / (4 eta)`
/// for detection efficiency `eta`.
pub(crate) fn moments_dd(form: &GaussianForm2, theta: f64, phi: f64, noise: Dd) -> (Dd, Dd, Dd) {
    let d2 = form.delta_dd() * 2.0;
    let var_a = form.gd() / d2 + noise;
    let var_b = form.fd() / d2 + noise;
    let cov = form.hd() * (theta + phi).cos() / d2;
    (var_a, var_b, cov)
}

pub fn quadrature_moments(form: &GaussianForm2, theta: f64, phi: f64, eta_h: f64) -> QuadratureMoments {
    let (a, b, c) = moments_dd(form, theta, phi, efficiency_noise(eta_h));
    QuadratureMoments { var_a: a.to_f64(), var_b: b.to_f64(), cov: c.to_f64() }
}

fn efficiency_noise(eta_h: f64) -> Dd {
    (Dd::ONE - eta_h) / (eta_h * 4.0)
}

fn correlation(state: &GaussianSumState, theta: f64, phi: f64, noise: Dd) -> Result<f64> {
    let mut acc = Dd::ZERO;
    for (c, form) in state.dd_terms() {
        let (va, vb, cov) = moments_dd(form, theta, phi, noise);
        let mut rho = cov / (va * vb).sqrt();
        let excess = rho.abs().to_f64() - 1.0;
        if excess > 0.0 {
            if excess > 1e-12 {
                return Err(Error::CorrelationOutOfRange(rho.to_f64()));
            }
            log::warn!("clamping correlation coefficient {} to unit modulus", rho.to_f64());
            rho = if rho.hi() > 0.0 { Dd::ONE } else { -Dd::ONE };
        }
        // sign-binned correlation of a centred Gaussian pair
        acc += *c / form.delta_dd() * rho.asin();
    }
    Ok((acc / state.norm_dd() * (2.0 / PI)).to_f64())
}

/// `<sign(X_a) sign(X_b)>` at angles `theta`, `phi` with efficiency `eta_h`.
pub fn homodyne_correlation(state: &GaussianSumState, theta: f64, phi: f64, eta_h: f64) -> Result<f64> {
    check_range("eta_h", eta_h, eta_h > 0.0 && eta_h <= 1.0, "efficiency must lie in (0, 1]")?;
    correlation(state, theta, phi, efficiency_noise(eta_h))
}

pub fn bell_hd(state: &GaussianSumState, eta_h: f64) -> Result<BellResult> {
    bell_hd_with(state, &AngleSettings::homodyne(), eta_h)
}

pub fn bell_hd_with(state: &GaussianSumState, angles: &AngleSettings, eta_h: f64) -> Result<BellResult> {
    check_range("eta_h", eta_h, eta_h > 0.0 && eta_h <= 1.0, "efficiency must lie in (0, 1]")?;
    let noise = efficiency_noise(eta_h);
    let value = chsh(|i, j| correlation(state, angles.a[i], angles.b[j], noise))?;
    Ok(BellResult { test: BellTest::Hd, value })
}
