//! Coherent-state teleportation fidelity with a twin-beam-like resource.
//!
//! With unit gain the output is the input convolved with the distribution
//! of `zeta = w - v*`, and for a coherent input the fidelity is
//! `E[exp(-|zeta|^2)]`. For a form this integral equals
//! `Delta / (Delta + F + G - 2H)`.

use serde::Serialize;

use crate::channel::{evolve_twb, noisy_twb_pair, ChannelParams};
use crate::dd::Dd;
use crate::error::{Error, Result};
use crate::gaussian::{twb_form, GaussianForm2, GaussianSumState, TwbParams};
use crate::ips::{ips_two_mode, IpsParams};

fn term_fidelity(f: &GaussianForm2) -> Dd {
    (f.delta_dd() + f.fd() + f.gd() - f.hd() * 2.0).recip()
}

pub fn fidelity_gaussian(form: &GaussianForm2) -> f64 {
    (form.delta_dd() * term_fidelity(form)).to_f64()
}

/// Fidelity of any Gaussian sum, including subtracted states.
pub fn fidelity_ips(state: &GaussianSumState) -> f64 {
    state.average(term_fidelity).to_f64()
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct FidelityReport {
    pub f_twb_ideal: f64,
    pub f_twb_noisy: f64,
    pub f_ips: f64,
    /// `(f_ips - f_twb_noisy) / f_twb_noisy`.
    pub r_f: f64,
    /// `(f_ips - f_twb_ideal) / f_twb_ideal`.
    pub r_f_id: f64,
}

pub fn relative_improvements(
    twb: &TwbParams,
    ips: &IpsParams,
    ch: &ChannelParams,
) -> Result<FidelityReport> {
    let f_twb_ideal = fidelity_gaussian(&twb_form(twb));
    let f_twb_noisy = fidelity_gaussian(&evolve_twb(twb, ch));
    let f_ips = fidelity_ips(&ips_two_mode(&noisy_twb_pair(twb, ch), ips)?);
    Ok(FidelityReport {
        f_twb_ideal,
        f_twb_noisy,
        f_ips,
        r_f: (f_ips - f_twb_noisy) / f_twb_noisy,
        r_f_id: (f_ips - f_twb_ideal) / f_twb_ideal,
    })
}

/// Squeezing of the twin beam carrying `energy` photons in total.
pub fn twb_for_energy(energy: f64) -> Result<TwbParams> {
    if !(energy >= 0.0 && energy.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "energy",
            value: energy,
            reason: "must be non-negative",
        });
    }
    TwbParams::new((energy / 2.0).sqrt().asinh())
}

/// Squeezing of the twin beam whose subtracted version carries `energy`
/// photons, found by bisection (the subtracted energy grows with `r`).
pub fn ips_twb_for_energy(energy: f64, ips: &IpsParams, ch: &ChannelParams) -> Result<TwbParams> {
    let e_of = |r: f64| -> Result<f64> {
        let twb = TwbParams::new(r)?;
        Ok(ips_two_mode(&noisy_twb_pair(&twb, ch), ips)?.energy())
    };
    if !(energy > 0.0 && energy.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "energy",
            value: energy,
            reason: "must be positive",
        });
    }
    let (mut lo, mut hi) = (1e-6, 1.0);
    while e_of(hi)? < energy {
        hi *= 2.0;
        if hi > 20.0 {
            return Err(Error::InvalidParameter {
                name: "energy",
                value: energy,
                reason: "beyond reachable squeezing",
            });
        }
    }
    if e_of(lo)? > energy {
        return Err(Error::InvalidParameter {
            name: "energy",
            value: energy,
            reason: "below the smallest reachable energy",
        });
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if e_of(mid)? < energy {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-14 {
            break;
        }
    }
    TwbParams::new(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct EnergyComparison {
    pub energy: f64,
    pub r_twb: f64,
    pub r_ips: f64,
    pub f_twb: f64,
    pub f_ips: f64,
}

/// Twin beam and subtracted state compared at equal total energy.
pub fn fixed_energy_comparison(
    energy: f64,
    ips: &IpsParams,
    ch: &ChannelParams,
) -> Result<EnergyComparison> {
    let twb = twb_for_energy(energy)?;
    let seed = ips_twb_for_energy(energy, ips, ch)?;
    let f_twb = fidelity_gaussian(&evolve_twb(&twb, ch));
    let f_ips = fidelity_ips(&ips_two_mode(&noisy_twb_pair(&seed, ch), ips)?);
    Ok(EnergyComparison { energy, r_twb: twb.r(), r_ips: seed.r(), f_twb, f_ips })
}
