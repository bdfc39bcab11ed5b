//! Gaussian forms in the complex phase-space variables.
//!
//! Convention: `alpha = (x + i y) / sqrt(2)`, so the vacuum quadrature
//! variance is 1/2 and `d^2 alpha = d Re(alpha) d Im(alpha)`. A two-mode form
//! `(F, G, H)` stands for `exp(-F|v|^2 - G|w|^2 + H (v w + v* w*))`, whose
//! integral over both planes is `pi^2 / Delta` with `Delta = F G - H^2`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{check_range, Error, Result};

/// Largest squeezing accepted. Beyond it `F G - H^2` cancels below
/// double-double resolution.
pub const R_MAX: f64 = 10.0;

/// Two-mode squeezing parameter. `lambda = tanh r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TwbParams {
    r: f64,
}

impl TwbParams {
    pub fn new(r: f64) -> Result<Self> {
        check_range("r", r, r >= 0.0, "squeezing must be non-negative")?;
        check_range("r", r, r <= R_MAX, "squeezing above 10 is not resolvable")?;
        Ok(TwbParams { r })
    }

    pub fn from_lambda(lambda: f64) -> Result<Self> {
        check_range("lambda", lambda, (0.0..1.0).contains(&lambda), "need 0 <= lambda < 1")?;
        TwbParams::new(lambda.atanh())
    }

    pub fn r(&self) -> f64 {
        self.r
    }

    pub fn lambda(&self) -> f64 {
        self.r.tanh()
    }

    /// Mean total photon number `2 sinh^2 r`.
    pub fn energy(&self) -> f64 {
        2.0 * self.r.sinh().powi(2)
    }

    pub(crate) fn cosh2r(&self) -> Dd {
        Dd::new(2.0 * self.r).cosh()
    }

    pub(crate) fn sinh2r(&self) -> Dd {
        Dd::new(2.0 * self.r).sinh()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianForm2 {
    f: Dd,
    g: Dd,
    h: Dd,
}

impl GaussianForm2 {
    pub fn new(f: f64, g: f64, h: f64) -> Result<Self> {
        Self::from_dd(Dd::new(f), Dd::new(g), Dd::new(h))
    }

    pub(crate) fn from_dd(f: Dd, g: Dd, h: Dd) -> Result<Self> {
        let form = GaussianForm2 { f, g, h };
        if !(f.is_finite() && g.is_finite() && h.is_finite()) {
            return Err(Error::NonFinite(format!("form ({f:?}, {g:?}, {h:?})")));
        }
        if f <= 0.0 || g <= 0.0 || form.delta_dd() <= 0.0 {
            return Err(Error::Unphysical(format!(
                "F = {}, G = {}, H = {} (need F, G > 0 and FG > H^2)",
                f.to_f64(),
                g.to_f64(),
                h.to_f64()
            )));
        }
        Ok(form)
    }

    pub fn f(&self) -> f64 {
        self.f.to_f64()
    }
    pub fn g(&self) -> f64 {
        self.g.to_f64()
    }
    pub fn h(&self) -> f64 {
        self.h.to_f64()
    }
    pub fn delta(&self) -> f64 {
        self.delta_dd().to_f64()
    }

    pub(crate) fn fd(&self) -> Dd {
        self.f
    }
    pub(crate) fn gd(&self) -> Dd {
        self.g
    }
    pub(crate) fn hd(&self) -> Dd {
        self.h
    }
    pub(crate) fn delta_dd(&self) -> Dd {
        self.f * self.g - self.h.sqr()
    }

    /// Exponent `-F|a|^2 - G|b|^2 + 2H Re(a b)`.
    pub(crate) fn exponent(&self, a: Complex64, b: Complex64) -> Dd {
        let (a2, b2, ab) = quadratic_invariants(a, b);
        -(self.f * a2) - self.g * b2 + self.h * ab * 2.0
    }

    /// Normalized Wigner function.
    pub fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        (self.delta_dd() / (Dd::PI * Dd::PI) * self.exponent(a, b).exp()).to_f64()
    }

    pub fn energy(&self) -> f64 {
        ((self.f + self.g) / self.delta_dd() - 1.0).to_f64()
    }

    /// Covariance matrix in `(x1, y1, x2, y2)`.
    pub fn covariance(&self) -> Matrix4<f64> {
        let d = self.delta_dd();
        let a = (self.g / d).to_f64();
        let b = (self.f / d).to_f64();
        let c = (self.h / d).to_f64();
        Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        )
    }

    /// Inverse of [`covariance`](Self::covariance); only accepts the
    /// phase-insensitive structure that a form can represent.
    pub fn from_covariance(cov: &Matrix4<f64>) -> Result<Self> {
        let a = cov[(0, 0)];
        let b = cov[(2, 2)];
        let c = cov[(0, 2)];
        let expected = Matrix4::new(
            a, 0.0, c, 0.0, //
            0.0, a, 0.0, -c, //
            c, 0.0, b, 0.0, //
            0.0, -c, 0.0, b,
        );
        let scale = cov.abs().max().max(1.0);
        if (cov - expected).abs().max() > 1e-12 * scale {
            return Err(Error::Unphysical("covariance is not of twin-beam shape".into()));
        }
        let det = Dd::new(a) * b - Dd::new(c).sqr();
        if det <= 0.0 {
            return Err(Error::Unphysical("covariance block determinant <= 0".into()));
        }
        let f = Dd::new(b) / det;
        let g = Dd::new(a) / det;
        let h = Dd::new(c) / det;
        Self::from_dd(f, g, h)
    }
}

pub(crate) fn quadratic_invariants(a: Complex64, b: Complex64) -> (Dd, Dd, Dd) {
    let (ar, ai, br, bi) = (Dd::new(a.re), Dd::new(a.im), Dd::new(b.re), Dd::new(b.im));
    (ar * ar + ai * ai, br * br + bi * bi, ar * br - ai * bi)
}

pub fn twb_form(twb: &TwbParams) -> GaussianForm2 {
    let c = twb.cosh2r() * 2.0;
    let s = twb.sinh2r() * 2.0;
    GaussianForm2 { f: c, g: c, h: s }
}

/// Weighted sum of two-mode forms,
/// `W = (1 / (pi^2 N)) sum_k c_k exp(form_k)` with `N = sum_k c_k / Delta_k`.
///
/// A single normalized form is the one-term case `c = Delta`.
#[derive(Clone, Debug)]
pub struct GaussianSumState {
    terms: Vec<(Dd, GaussianForm2)>,
    norm: Dd,
}

impl GaussianSumState {
    pub fn from_form(form: GaussianForm2) -> Self {
        GaussianSumState { terms: vec![(form.delta_dd(), form)], norm: Dd::ONE }
    }

    pub fn from_terms(terms: Vec<(f64, GaussianForm2)>) -> Result<Self> {
        Self::from_dd_terms(terms.into_iter().map(|(c, f)| (Dd::new(c), f)).collect())
    }

    pub(crate) fn from_dd_terms(terms: Vec<(Dd, GaussianForm2)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Unphysical("empty Gaussian sum".into()));
        }
        let norm: Dd = terms.iter().map(|(c, f)| *c / f.delta_dd()).sum();
        let scale: Dd = terms.iter().map(|(c, f)| (*c / f.delta_dd()).abs()).sum();
        if !norm.is_finite() {
            return Err(Error::NonFinite("Gaussian sum normalization".into()));
        }
        if norm <= scale * 1e-28 {
            return Err(Error::ZeroProbability("Gaussian sum has no weight"));
        }
        Ok(GaussianSumState { terms, norm })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Unnormalized weight `sum_k c_k / Delta_k`; for a subtracted state
    /// this is the click probability.
    pub fn norm(&self) -> f64 {
        self.norm.to_f64()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &GaussianForm2)> {
        self.terms.iter().map(|(c, f)| (c.to_f64(), f))
    }

    pub(crate) fn dd_terms(&self) -> &[(Dd, GaussianForm2)] {
        &self.terms
    }

    pub(crate) fn norm_dd(&self) -> Dd {
        self.norm
    }

    /// `(1 / N) sum_k c_k phi(form_k)` evaluated in double-double.
    pub(crate) fn average(&self, mut phi: impl FnMut(&GaussianForm2) -> Dd) -> Dd {
        let s: Dd = self.terms.iter().map(|(c, f)| *c * phi(f)).sum();
        s / self.norm
    }

    pub fn wigner(&self, a: Complex64, b: Complex64) -> f64 {
        let s = self.average(|f| f.exponent(a, b).exp());
        (s / (Dd::PI * Dd::PI)).to_f64()
    }

    /// Expectation of the two-mode displaced parity, `(pi^2 / 4) W`.
    pub fn displaced_parity(&self, a: Complex64, b: Complex64) -> f64 {
        (self.average(|f| f.exponent(a, b).exp()) * 0.25).to_f64()
    }

    pub fn energy(&self) -> f64 {
        self.average(|f| {
            let d = f.delta_dd();
            (f.f + f.g) / d.sqr() - d.recip()
        })
        .to_f64()
    }
}

/// Single-mode form `exp(-F|z|^2 - G (z^2 + z*^2))`, normalized by
/// `sqrt(F^2 - 4G^2) / pi`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GaussianForm1 {
    f: Dd,
    g: Dd,
}

impl GaussianForm1 {
    pub fn new(f: f64, g: f64) -> Result<Self> {
        Self::from_dd(Dd::new(f), Dd::new(g))
    }

    pub(crate) fn from_dd(f: Dd, g: Dd) -> Result<Self> {
        let form = GaussianForm1 { f, g };
        if !(f.is_finite() && g.is_finite()) {
            return Err(Error::NonFinite("single-mode form".into()));
        }
        if f <= 0.0 || form.det_dd() <= 0.0 {
            return Err(Error::Unphysical(format!(
                "F = {}, G = {} (need F > 0 and F^2 > 4G^2)",
                f.to_f64(),
                g.to_f64()
            )));
        }
        Ok(form)
    }

    pub fn f(&self) -> f64 {
        self.f.to_f64()
    }
    pub fn g(&self) -> f64 {
        self.g.to_f64()
    }

    pub(crate) fn det_dd(&self) -> Dd {
        self.f.sqr() - self.g.sqr() * 4.0
    }

    /// Exponent coefficients along `x` and `y`: `u = F + 2G`, `v = F - 2G`.
    pub(crate) fn principal(&self) -> (Dd, Dd) {
        (self.f + self.g * 2.0, self.f - self.g * 2.0)
    }

    pub(crate) fn exponent(&self, z: Complex64) -> Dd {
        let (x, y) = (Dd::new(z.re), Dd::new(z.im));
        let m2 = x * x + y * y;
        let re2 = (x * x - y * y) * 2.0;
        -(self.f * m2) - self.g * re2
    }

    pub fn wigner(&self, z: Complex64) -> f64 {
        (self.det_dd().sqrt() / Dd::PI * self.exponent(z).exp()).to_f64()
    }

    pub fn energy(&self) -> f64 {
        (self.f / self.det_dd() - 0.5).to_f64()
    }
}

/// Squeezed vacuum with the antisqueezed `x` quadrature.
pub fn squeezed_vacuum_form(r: f64) -> Result<GaussianForm1> {
    check_range("r", r, r >= 0.0, "squeezing must be non-negative")?;
    let two_r = Dd::new(2.0 * r);
    GaussianForm1::from_dd(two_r.cosh() * 2.0, -two_r.sinh())
}

/// `W = (1 / (pi N)) sum_k c_k exp(form_k)` with `N = sum_k c_k / sqrt(F_k^2 - 4G_k^2)`.
#[derive(Clone, Debug)]
pub struct SingleModeSumState {
    terms: Vec<(Dd, GaussianForm1)>,
    norm: Dd,
}

impl SingleModeSumState {
    pub fn from_form(form: GaussianForm1) -> Self {
        SingleModeSumState { terms: vec![(form.det_dd().sqrt(), form)], norm: Dd::ONE }
    }

    pub(crate) fn from_dd_terms(terms: Vec<(Dd, GaussianForm1)>) -> Result<Self> {
        let norm: Dd = terms.iter().map(|(c, f)| *c / f.det_dd().sqrt()).sum();
        let scale: Dd = terms.iter().map(|(c, f)| (*c / f.det_dd().sqrt()).abs()).sum();
        if !norm.is_finite() {
            return Err(Error::NonFinite("single-mode normalization".into()));
        }
        if norm <= scale * 1e-28 {
            return Err(Error::ZeroProbability("single-mode sum has no weight"));
        }
        Ok(SingleModeSumState { terms, norm })
    }

    pub fn norm(&self) -> f64 {
        self.norm.to_f64()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (f64, &GaussianForm1)> {
        self.terms.iter().map(|(c, f)| (c.to_f64(), f))
    }

    fn average(&self, mut phi: impl FnMut(&GaussianForm1) -> Dd) -> Dd {
        let s: Dd = self.terms.iter().map(|(c, f)| *c * phi(f)).sum();
        s / self.norm
    }

    pub fn wigner(&self, z: Complex64) -> f64 {
        (self.average(|f| f.exponent(z).exp()) / Dd::PI).to_f64()
    }

    pub fn energy(&self) -> f64 {
        self.average(|f| {
            let det = f.det_dd();
            f.f / (det * det.sqrt()) - det.sqrt().recip() * 0.5
        })
        .to_f64()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn twb_delta_is_four() {
        for &r in &[0.0, 0.3, 1.2, 3.0] {
            let form = twb_form(&TwbParams::new(r).unwrap());
            assert_relative_eq!(form.delta(), 4.0, max_relative = 1e-13);
        }
    }

    #[test]
    fn twb_energy_is_two_sinh_squared() {
        for &r in &[0.0, 0.2, 0.7, 1.5] {
            let p = TwbParams::new(r).unwrap();
            assert_relative_eq!(twb_form(&p).energy(), p.energy(), epsilon = 1e-13, max_relative = 1e-12);
        }
    }

    #[test]
    fn lambda_roundtrip() {
        let p = TwbParams::from_lambda(0.6).unwrap();
        assert!((p.lambda() - 0.6).abs() < 2e-16);
        assert!(TwbParams::from_lambda(1.0).is_err());
        assert!(TwbParams::new(-0.1).is_err());
    }

    #[test]
    fn unphysical_forms_rejected() {
        assert!(GaussianForm2::new(1.0, 1.0, 1.0).is_err());
        assert!(GaussianForm2::new(-1.0, 1.0, 0.0).is_err());
        assert!(GaussianForm1::new(1.0, 0.5).is_err());
    }

    #[test]
    fn vacuum_wigner_at_origin() {
        let vac = twb_form(&TwbParams::new(0.0).unwrap());
        let w = vac.wigner(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert_relative_eq!(w, 4.0 / (std::f64::consts::PI.powi(2)), max_relative = 1e-14);
    }

    #[test]
    fn covariance_roundtrip() {
        let form = twb_form(&TwbParams::new(0.8).unwrap());
        let cov = form.covariance();
        // vacuum-normalized: x1 variance cosh(2r) / 2
        assert_relative_eq!(cov[(0, 0)], (1.6f64).cosh() / 2.0, max_relative = 1e-13);
        let back = GaussianForm2::from_covariance(&cov).unwrap();
        assert_relative_eq!(back.f(), form.f(), max_relative = 1e-12);
        assert_relative_eq!(back.h(), form.h(), max_relative = 1e-12);
    }

    #[test]
    fn squeezed_vacuum_energy() {
        for &r in &[0.0, 0.4, 1.1] {
            let e = squeezed_vacuum_form(r).unwrap().energy();
            assert_relative_eq!(e, (r as f64).sinh().powi(2), epsilon = 1e-14, max_relative = 1e-12);
        }
    }
}
