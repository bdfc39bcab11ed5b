//! Symmetric Gaussian noise acting on both modes of a twin beam.
//!
//! The master equation `(Gamma/2) sum_j (1+N) L[a_j] + N L[a_j^dag]` keeps
//! the twin-beam shape, so the state after time `t` is again a form with
//! `F = G`. In covariance language it is `dS/dt = -Gamma (S - S_inf)` with
//! `S_inf = (1/2 + N) I`.

use nalgebra::Matrix4;
use serde::Serialize;

use crate::dd::Dd;
use crate::error::{check_range, Error, Result};
use crate::gaussian::{twb_form, GaussianForm2, TwbParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ChannelParams {
    gamma_t: f64,
    n_th: f64,
}

impl ChannelParams {
    pub fn new(gamma_t: f64, n_th: f64) -> Result<Self> {
        check_range("gamma_t", gamma_t, gamma_t >= 0.0, "must be non-negative")?;
        check_range("n_th", n_th, n_th >= 0.0, "must be non-negative")?;
        Ok(ChannelParams { gamma_t, n_th })
    }

    pub fn ideal() -> Self {
        ChannelParams { gamma_t: 0.0, n_th: 0.0 }
    }

    pub fn gamma_t(&self) -> f64 {
        self.gamma_t
    }

    pub fn n_th(&self) -> f64 {
        self.n_th
    }

    pub fn is_ideal(&self) -> bool {
        self.gamma_t == 0.0
    }

    fn decay(&self) -> Dd {
        Dd::new(-self.gamma_t).exp()
    }
}

/// `(A_t, B_t)`: covariance-like entries of the evolved twin beam, in units
/// where the vacuum has `A = 1`.
fn evolved_ab(twb: &TwbParams, ch: &ChannelParams) -> (Dd, Dd) {
    let g = ch.decay();
    let a = twb.cosh2r() * g + (Dd::ONE - g) * (1.0 + 2.0 * ch.n_th);
    let b = twb.sinh2r() * g;
    (a, b)
}

pub fn evolve_twb(twb: &TwbParams, ch: &ChannelParams) -> GaussianForm2 {
    if ch.is_ideal() {
        return twb_form(twb);
    }
    let (a, b) = evolved_ab(twb, ch);
    let d = a.sqr() - b.sqr();
    let f = a / d * 2.0;
    let h = b / d * 2.0;
    GaussianForm2::from_dd(f, f, h).expect("noisy twin beam stays physical")
}

/// The pair `(A~, B~)` with `F = G = 2 A~` and `H = 2 B~`.
#[derive(Clone, Copy, Debug)]
pub struct TwinBeamPair {
    a: Dd,
    b: Dd,
}

impl TwinBeamPair {
    pub fn a_tilde(&self) -> f64 {
        self.a.to_f64()
    }

    pub fn b_tilde(&self) -> f64 {
        self.b.to_f64()
    }

    pub(crate) fn dd(&self) -> (Dd, Dd) {
        (self.a, self.b)
    }

    pub fn form(&self) -> GaussianForm2 {
        GaussianForm2::from_dd(self.a * 2.0, self.a * 2.0, self.b * 2.0)
            .expect("pair built from a physical form")
    }
}

pub fn noisy_substitution(form: &GaussianForm2) -> Result<TwinBeamPair> {
    let (f, g) = (form.fd(), form.gd());
    if (f - g).abs() > f.abs() * 1e-15 {
        return Err(Error::Unphysical(format!(
            "twin-beam substitution needs F = G, got {} and {}",
            form.f(),
            form.g()
        )));
    }
    Ok(TwinBeamPair { a: f * 0.5, b: form.hd() * 0.5 })
}

/// Shorthand for `noisy_substitution(evolve_twb(..))`.
pub fn noisy_twb_pair(twb: &TwbParams, ch: &ChannelParams) -> TwinBeamPair {
    noisy_substitution(&evolve_twb(twb, ch)).expect("evolved twin beam is symmetric")
}

/// General covariance evolution `S_t = e^{-Gamma t} S_0 + (1 - e^{-Gamma t}) S_inf`.
pub fn evolve_covariance(cov: &Matrix4<f64>, ch: &ChannelParams) -> Matrix4<f64> {
    let g = (-ch.gamma_t).exp();
    cov * g + Matrix4::identity() * ((1.0 - g) * (0.5 + ch.n_th))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn ideal_channel_is_identity() {
        let twb = TwbParams::new(0.7).unwrap();
        let a = evolve_twb(&twb, &ChannelParams::ideal());
        let b = twb_form(&twb);
        assert_eq!(a, b);
    }

    #[test]
    fn long_time_limit_is_thermal_product() {
        let twb = TwbParams::new(1.1).unwrap();
        let ch = ChannelParams::new(60.0, 0.3).unwrap();
        let form = evolve_twb(&twb, &ch);
        // thermal state with N photons: F = 2 / (1 + 2N)
        assert_relative_eq!(form.f(), 2.0 / 1.6, max_relative = 1e-12);
        assert!(form.h().abs() < 1e-20);
    }

    #[test]
    fn substitution_rejects_asymmetric_forms() {
        let form = GaussianForm2::new(2.0, 3.0, 1.0).unwrap();
        assert!(noisy_substitution(&form).is_err());
    }

    #[test]
    fn pair_reproduces_form() {
        let twb = TwbParams::new(0.4).unwrap();
        let ch = ChannelParams::new(0.2, 0.1).unwrap();
        let form = evolve_twb(&twb, &ch);
        let back = noisy_substitution(&form).unwrap().form();
        assert_relative_eq!(back.f(), form.f(), max_relative = 1e-15);
        assert_relative_eq!(back.h(), form.h(), max_relative = 1e-15);
    }

    #[test]
    fn negative_parameters_rejected() {
        assert!(ChannelParams::new(-0.1, 0.0).is_err());
        assert!(ChannelParams::new(0.1, -1.0).is_err());
        assert!(ChannelParams::new(f64::NAN, 0.0).is_err());
    }
}
