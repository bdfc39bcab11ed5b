//! Inconclusive photon subtraction: each mode meets a beam splitter of
//! transmissivity `T` whose reflected port feeds an on/off detector of
//! efficiency `eps`; the state is kept when both detectors click.
//!
//! A click is `1 - (1 - eps)^n`, so each subtraction is a difference of two
//! Gaussian operations and the two-mode result is a four-term sum.

use num_complex::Complex64;
use serde::Serialize;

use crate::channel::TwinBeamPair;
use crate::dd::Dd;
use crate::error::{check_range, Error, Result};
use crate::fock::FockState2;
use crate::gaussian::{GaussianForm1, GaussianForm2, GaussianSumState, SingleModeSumState, TwbParams};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct IpsParams {
    t: f64,
    eps: f64,
}

impl IpsParams {
    pub fn new(t: f64, eps: f64) -> Result<Self> {
        check_range("T", t, t > 0.0 && t <= 1.0, "transmissivity must lie in (0, 1]")?;
        check_range("eps", eps, eps > 0.0 && eps <= 1.0, "efficiency must lie in (0, 1]")?;
        Ok(IpsParams { t, eps })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    fn require_reflectivity(&self) -> Result<()> {
        if self.t >= 1.0 {
            return Err(Error::ZeroProbability("T = 1 reflects nothing toward the detectors"));
        }
        Ok(())
    }
}

/// Sign in front of the subtraction correction to the cross term. Only the
/// physical sign is reachable from outside the oracle negative control.
#[doc(hidden)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CrossSign {
    Physical,
    Flipped,
}

#[derive(Clone, Copy, Debug)]
struct Term {
    weight: Dd,
    f: Dd,
    g: Dd,
    h: Dd,
}

/// Per-term coefficients of the subtracted twin beam, computed once per
/// input pair and subtraction setting.
#[derive(Clone, Debug)]
pub struct IpsCoefficients {
    terms: [Term; 4],
    probability: Dd,
}

impl IpsCoefficients {
    pub fn compute(input: &TwinBeamPair, ips: &IpsParams) -> Result<Self> {
        Self::compute_with_sign(input, ips, CrossSign::Physical)
    }

    #[doc(hidden)]
    pub fn compute_with_sign(input: &TwinBeamPair, ips: &IpsParams, sign: CrossSign) -> Result<Self> {
        ips.require_reflectivity()?;
        let (at, bt) = input.dd();
        let t = Dd::new(ips.t);
        let s2 = Dd::ONE - t;
        let eps = Dd::new(ips.eps);
        let two_minus = Dd::new(2.0) - eps;

        let a = (at * s2 + t) * 2.0;
        let b = (at * t + s2) * 2.0;
        let q = eps * 2.0 / two_minus;
        let xs = [a, a + q, a, a + q];
        let ys = [a, a, a + q, a + q];
        let c_off = -(Dd::new(2.0) / two_minus);
        let raw = [Dd::ONE, c_off, c_off, c_off.sqr()];

        let one_a = Dd::ONE - at;
        let b2 = bt.sqr();
        let det_factor = (at.sqr() - b2) * 16.0;

        let mut terms = [Term { weight: Dd::ZERO, f: Dd::ZERO, g: Dd::ZERO, h: Dd::ZERO }; 4];
        for k in 0..4 {
            let (x, y) = (xs[k], ys[k]);
            let den = x * y - b2 * s2.sqr() * 4.0;
            let n = t * s2 * 4.0 / den;
            let mixed = b2 * one_a * s2 * 4.0;
            let fk = n * (x * b2 + mixed + y * one_a.sqr());
            let gk = n * (x * one_a.sqr() + mixed + y * b2);
            let hk = n * ((x + y) * bt * one_a + bt * (b2 + one_a.sqr()) * s2 * 2.0);
            let cross = bt * t * 2.0;
            let h = match sign {
                CrossSign::Physical => cross + hk,
                CrossSign::Flipped => cross - hk,
            };
            terms[k] = Term { weight: raw[k] * det_factor / den, f: b - fk, g: b - gk, h };
        }

        let probability: Dd =
            terms.iter().map(|t| t.weight / (t.f * t.g - t.h.sqr())).sum();
        let scale: Dd =
            terms.iter().map(|t| (t.weight / (t.f * t.g - t.h.sqr())).abs()).sum();
        if !probability.is_finite() || probability <= scale * 1e-28 {
            return Err(Error::ZeroProbability("no photon reaches the detectors"));
        }
        Ok(IpsCoefficients { terms, probability })
    }

    /// Joint click probability.
    pub fn probability(&self) -> f64 {
        self.probability.to_f64()
    }

    /// `(C_k, F_k, G_k, H_k)` rounded to `f64`.
    pub fn term(&self, k: usize) -> [f64; 4] {
        let t = &self.terms[k];
        [t.weight.to_f64(), t.f.to_f64(), t.g.to_f64(), t.h.to_f64()]
    }

    pub fn state(&self) -> Result<GaussianSumState> {
        let mut out = Vec::with_capacity(4);
        for t in &self.terms {
            out.push((t.weight, GaussianForm2::from_dd(t.f, t.g, t.h)?));
        }
        GaussianSumState::from_dd_terms(out)
    }
}

pub fn ips_two_mode(input: &TwinBeamPair, ips: &IpsParams) -> Result<GaussianSumState> {
    IpsCoefficients::compute(input, ips)?.state()
}

/// Single-mode subtraction: the transmitted state minus its no-click part.
pub fn ips_single_mode(form: &GaussianForm1, ips: &IpsParams) -> Result<SingleModeSumState> {
    ips.require_reflectivity()?;
    let t = Dd::new(ips.t);
    let s2 = Dd::ONE - t;
    let eps = Dd::new(ips.eps);
    let (up, um) = form.principal();

    // principal exponents after mixing with vacuum
    let transmitted = |u: Dd| u / (t * 2.0 + s2 * u);
    // ... and after additionally projecting the reflected port on no-click
    let conditioned = |u: Dd| {
        (eps * s2 * 2.0 + (Dd::new(2.0) - eps * s2) * u)
            / ((t * 4.0 + s2 * (eps * 2.0 + (Dd::new(2.0) - eps) * u)) * 2.0)
    };
    let (tp, tm) = (transmitted(up), transmitted(um));
    let (vp, vm) = (conditioned(up), conditioned(um));
    let first = GaussianForm1::from_dd(tp + tm, (tp - tm) * 0.5)?;
    let second = GaussianForm1::from_dd((vp + vm) * 2.0, vp - vm)?;

    // no-click probability: reflected covariance plus the detector width
    let sigma_m = (Dd::new(2.0) - eps) / (eps * 2.0);
    let reflected = |u: Dd| s2 / u + t * 0.5 + sigma_m;
    let no_click = (eps * (reflected(up) * reflected(um)).sqrt()).recip();

    let terms = vec![
        (first.det_dd().sqrt(), first),
        (-(no_click * second.det_dd().sqrt()), second),
    ];
    SingleModeSumState::from_dd_terms(terms)
}

fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

/// Subtracted ideal twin beam written directly in the Fock basis,
/// normalized by the closed-form click probability.
pub fn ips_fock_matrix(twb: &TwbParams, ips: &IpsParams, cutoff: usize) -> Result<FockState2> {
    ips.require_reflectivity()?;
    let pair = crate::channel::noisy_twb_pair(twb, &crate::channel::ChannelParams::ideal());
    let p11 = IpsCoefficients::compute(&pair, ips)?.probability();

    let lam = twb.lambda();
    let t = ips.t;
    let ratio = (1.0 - t) / t;
    let click: Vec<f64> = (0..=cutoff).map(|h| 1.0 - (1.0 - ips.eps).powi(h as i32)).collect();
    let lt_pow: Vec<f64> = (0..=cutoff).map(|n| (lam * t).powi(n as i32)).collect();
    let ratio_pow: Vec<f64> = (0..=cutoff).map(|h| ratio.powi(h as i32)).collect();
    let norm = 1.0 - lam * lam;

    let mut rho = FockState2::zeros(cutoff);
    for h in 1..=cutoff {
        for k in 1..=cutoff {
            let w = click[h] * click[k] * ratio_pow[h] * ratio_pow[k] * norm;
            if w == 0.0 {
                continue;
            }
            let lo = h.max(k);
            let amp: Vec<f64> = (0..=cutoff)
                .map(|n| {
                    if n < lo {
                        0.0
                    } else {
                        lt_pow[n] * (binomial(n, h) * binomial(n, k)).sqrt()
                    }
                })
                .collect();
            for n in lo..=cutoff {
                for m in lo..=cutoff {
                    let v = w * amp[n] * amp[m];
                    rho.add_to(n - h, n - k, m - h, m - k, Complex64::new(v, 0.0));
                }
            }
        }
    }
    let trace = rho.trace();
    if trace < (1.0 - 1e-10) * p11 {
        return Err(Error::CutoffTooSmall { cutoff, trace, expected: p11 });
    }
    rho.scale(1.0 / p11);
    Ok(rho)
}
