//! On/off detection after local displacements.
//!
//! A no-click with efficiency `eta` projects on `(1 - eta)^n`, a Gaussian
//! of width `Delta_eta = 2 eta / (2 - eta)` in these units; each overlap
//! with a term of the state is again Gaussian. Dark counts with mean `D`
//! per gate rescale `eta -> eta / (1 + D)` and shrink each no-click by
//! `1 / (1 + D)`.

use num_complex::Complex64;
use serde::Serialize;

use super::{BellResult, BellTest, DetectorParams, DisplacementSettings};
use crate::dd::Dd;
use crate::error::Result;
use crate::gaussian::{quadratic_invariants, GaussianSumState};

fn width(eta: Dd) -> Dd {
    eta * 2.0 / (Dd::new(2.0) - eta)
}

fn both_ideal(state: &GaussianSumState, a: Complex64, b: Complex64, eta: Dd) -> Dd {
    let w = width(eta);
    let (a2, b2, ab) = quadratic_invariants(a, b);
    state.average(|form| {
        let (f, g, h) = (form.fd(), form.gd(), form.hd());
        let m = w.sqr() / ((f + w) * (g + w) - h.sqr());
        let ea = w - (g + w) * m;
        let eb = w - (f + w) * m;
        let expo = -(ea * a2) - eb * b2 + h * m * ab * 2.0;
        m / eta.sqr() * expo.exp()
    })
}

fn single_ideal(state: &GaussianSumState, z: Complex64, eta: Dd, mode_b: bool) -> Dd {
    let w = width(eta);
    let (z2, _, _) = quadratic_invariants(z, Complex64::new(0.0, 0.0));
    state.average(|form| {
        let (own, other) = if mode_b { (form.gd(), form.fd()) } else { (form.fd(), form.gd()) };
        let d = other * (own + w) - form.hd().sqr();
        w / (eta * d) * (-(w * form.delta_dd() / d * z2)).exp()
    })
}

fn effective(det: &DetectorParams) -> (Dd, Dd) {
    let scale = Dd::new(1.0 + det.dark()).recip();
    (Dd::new(det.eta()) * scale, scale)
}

/// Probability that neither detector clicks.
pub fn no_click_both(state: &GaussianSumState, a: Complex64, b: Complex64, det: &DetectorParams) -> f64 {
    let (eta, s) = effective(det);
    (both_ideal(state, a, b, eta) * s.sqr()).to_f64()
}

/// Probability that the detector on mode `a` does not click.
pub fn no_click_a(state: &GaussianSumState, a: Complex64, det: &DetectorParams) -> f64 {
    let (eta, s) = effective(det);
    (single_ideal(state, a, eta, false) * s).to_f64()
}

/// Probability that the detector on mode `b` does not click.
pub fn no_click_b(state: &GaussianSumState, b: Complex64, det: &DetectorParams) -> f64 {
    let (eta, s) = effective(det);
    (single_ideal(state, b, eta, true) * s).to_f64()
}

fn ch_sum(state: &GaussianSumState, s: &DisplacementSettings, det: &DetectorParams) -> Dd {
    let (eta, scale) = effective(det);
    let i = |x: usize, y: usize| both_ideal(state, s.alpha[x], s.beta[y], eta);
    let pairs = i(0, 0) + i(0, 1) + i(1, 0) - i(1, 1);
    let singles = single_ideal(state, s.alpha[0], eta, false) + single_ideal(state, s.beta[0], eta, true);
    pairs * scale.sqr() - singles * scale
}

pub fn bell_onoff(state: &GaussianSumState, j: f64, det: &DetectorParams) -> Result<BellResult> {
    bell_onoff_with(state, &DisplacementSettings::onoff(j)?, det)
}

pub fn bell_onoff_with(
    state: &GaussianSumState,
    s: &DisplacementSettings,
    det: &DetectorParams,
) -> Result<BellResult> {
    let value = (ch_sum(state, s, det) * 4.0 + 2.0).to_f64();
    Ok(BellResult { test: BellTest::OnOff, value })
}

/// Clauser-Horne combination; local realism requires `-1 <= lhs <= 0`.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChReport {
    pub lhs: f64,
    pub violated: bool,
}

pub fn ch_inequality(state: &GaussianSumState, s: &DisplacementSettings, det: &DetectorParams) -> ChReport {
    let lhs = ch_sum(state, s, det).to_f64();
    ChReport { lhs, violated: !(-1.0..=0.0).contains(&lhs) }
}
