//! Parameter points, objectives, grid sweeps and local refinement.

mod grid;
mod optimize;

use serde::Serialize;

use crate::bell::{bell_dp, bell_hd, bell_onoff, bell_ps, BellTest, DetectorParams};
use crate::channel::{evolve_twb, noisy_twb_pair, ChannelParams};
use crate::error::{Error, Result};
use crate::gaussian::{GaussianSumState, TwbParams};
use crate::ips::{ips_two_mode, IpsParams};
use crate::teleport::{fidelity_gaussian, fidelity_ips, relative_improvements};

pub use grid::{grid_eval, grid_map, grid_sweep, GridAxis, GridPoint, GridRow, SweepSpec, SweepTable};
pub use optimize::{refine_max, Bound, OptimumReport, RefineOptions};

/// Largest transmissivity a sweep evaluates; `T = 1` subtracts nothing.
pub const T_CAP: f64 = 1.0 - 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum Param {
    R,
    Lambda,
    T,
    Eps,
    GammaT,
    Nth,
    Eta,
    Dark,
    EtaH,
    J,
}

impl Param {
    pub const ALL: [Param; 10] = [
        Param::R,
        Param::Lambda,
        Param::T,
        Param::Eps,
        Param::GammaT,
        Param::Nth,
        Param::Eta,
        Param::Dark,
        Param::EtaH,
        Param::J,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Param::R => "r",
            Param::Lambda => "lambda",
            Param::T => "T",
            Param::Eps => "eps",
            Param::GammaT => "gamma_t",
            Param::Nth => "nth",
            Param::Eta => "eta",
            Param::Dark => "dark",
            Param::EtaH => "eta_h",
            Param::J => "J",
        }
    }

    pub fn parse(s: &str) -> Result<Param> {
        Param::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s || p.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown parameter `{s}`")))
    }
}

/// Every physical knob of one evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Point {
    pub r: f64,
    pub t: f64,
    pub eps: f64,
    pub gamma_t: f64,
    pub nth: f64,
    pub eta: f64,
    pub dark: f64,
    pub eta_h: f64,
    pub j: f64,
}

impl Default for Point {
    fn default() -> Self {
        Point {
            r: 0.5,
            t: 0.9999,
            eps: 1.0,
            gamma_t: 0.0,
            nth: 0.0,
            eta: 1.0,
            dark: 0.0,
            eta_h: 1.0,
            j: 0.16,
        }
    }
}

impl Point {
    pub fn get(&self, p: Param) -> f64 {
        match p {
            Param::R => self.r,
            Param::Lambda => self.r.tanh(),
            Param::T => self.t,
            Param::Eps => self.eps,
            Param::GammaT => self.gamma_t,
            Param::Nth => self.nth,
            Param::Eta => self.eta,
            Param::Dark => self.dark,
            Param::EtaH => self.eta_h,
            Param::J => self.j,
        }
    }

    pub fn set(&mut self, p: Param, v: f64) {
        match p {
            Param::R => self.r = v,
            Param::Lambda => self.r = v.atanh(),
            Param::T => self.t = v,
            Param::Eps => self.eps = v,
            Param::GammaT => self.gamma_t = v,
            Param::Nth => self.nth = v,
            Param::Eta => self.eta = v,
            Param::Dark => self.dark = v,
            Param::EtaH => self.eta_h = v,
            Param::J => self.j = v,
        }
    }

    /// Applies the transmissivity cap; returns whether it bit.
    pub fn cap(&mut self) -> bool {
        if self.t > T_CAP {
            self.t = T_CAP;
            true
        } else {
            false
        }
    }

    pub fn twb(&self) -> Result<TwbParams> {
        TwbParams::new(self.r)
    }

    pub fn channel(&self) -> Result<ChannelParams> {
        ChannelParams::new(self.gamma_t, self.nth)
    }

    pub fn ips(&self) -> Result<IpsParams> {
        IpsParams::new(self.t, self.eps)
    }

    pub fn detector(&self) -> Result<DetectorParams> {
        DetectorParams::new(self.eta, self.dark)
    }

    pub fn state(&self, kind: StateKind) -> Result<GaussianSumState> {
        let twb = self.twb()?;
        let ch = self.channel()?;
        match kind {
            StateKind::Twb => Ok(GaussianSumState::from_form(evolve_twb(&twb, &ch))),
            StateKind::Ips => ips_two_mode(&noisy_twb_pair(&twb, &ch), &self.ips()?),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StateKind {
    Twb,
    Ips,
}

impl StateKind {
    pub fn name(&self) -> &'static str {
        match self {
            StateKind::Twb => "twb",
            StateKind::Ips => "ips",
        }
    }

    pub fn parse(s: &str) -> Result<StateKind> {
        match s {
            "twb" => Ok(StateKind::Twb),
            "ips" => Ok(StateKind::Ips),
            _ => Err(Error::Config(format!("unknown state `{s}` (twb | ips)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Objective {
    Bell(BellTest, StateKind),
    Fidelity(StateKind),
    Energy(StateKind),
    /// Subtracted fidelity relative to the noisy twin beam.
    RelativeFidelity,
    /// Subtracted fidelity relative to the noiseless twin beam.
    RelativeFidelityIdeal,
    ClickProbability,
}

impl Objective {
    pub fn name(&self) -> String {
        match self {
            Objective::Bell(t, s) => format!("bell_{}_{}", t.name(), s.name()),
            Objective::Fidelity(s) => format!("fidelity_{}", s.name()),
            Objective::Energy(s) => format!("energy_{}", s.name()),
            Objective::RelativeFidelity => "r_f".into(),
            Objective::RelativeFidelityIdeal => "r_f_id".into(),
            Objective::ClickProbability => "p11".into(),
        }
    }

    /// Inverse of [`Objective::name`].
    pub fn parse(s: &str) -> Result<Objective> {
        let mut all = vec![Objective::RelativeFidelity, Objective::RelativeFidelityIdeal, Objective::ClickProbability];
        for kind in [StateKind::Twb, StateKind::Ips] {
            all.push(Objective::Fidelity(kind));
            all.push(Objective::Energy(kind));
            for test in [BellTest::Dp, BellTest::Hd, BellTest::Ps, BellTest::OnOff] {
                all.push(Objective::Bell(test, kind));
            }
        }
        all.into_iter().find(|o| o.name() == s).ok_or_else(|| {
            Error::Config(format!("unknown objective `{s}` (e.g. bell_onoff_ips, fidelity_twb, r_f, p11)"))
        })
    }

    pub fn evaluate(&self, p: &Point) -> Result<f64> {
        match *self {
            Objective::Bell(test, kind) => {
                let state = p.state(kind)?;
                let res = match test {
                    BellTest::Dp => bell_dp(&state, p.j)?,
                    BellTest::Hd => bell_hd(&state, p.eta_h)?,
                    BellTest::Ps => bell_ps(&state)?,
                    BellTest::OnOff => bell_onoff(&state, p.j, &p.detector()?)?,
                };
                Ok(res.value)
            }
            Objective::Fidelity(StateKind::Twb) => {
                Ok(fidelity_gaussian(&evolve_twb(&p.twb()?, &p.channel()?)))
            }
            Objective::Fidelity(StateKind::Ips) => Ok(fidelity_ips(&p.state(StateKind::Ips)?)),
            Objective::Energy(kind) => Ok(p.state(kind)?.energy()),
            Objective::RelativeFidelity => {
                Ok(relative_improvements(&p.twb()?, &p.ips()?, &p.channel()?)?.r_f)
            }
            Objective::RelativeFidelityIdeal => {
                Ok(relative_improvements(&p.twb()?, &p.ips()?, &p.channel()?)?.r_f_id)
            }
            Objective::ClickProbability => Ok(p.state(StateKind::Ips)?.norm()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn param_names_roundtrip() {
        for p in Param::ALL {
            assert_eq!(Param::parse(p.name()).unwrap(), p);
        }
        assert!(Param::parse("bogus").is_err());
    }

    #[test]
    fn objective_names_roundtrip() {
        for name in ["bell_dp_twb", "bell_onoff_ips", "fidelity_ips", "energy_twb", "r_f", "r_f_id", "p11"] {
            assert_eq!(Objective::parse(name).unwrap().name(), name);
        }
        assert!(Objective::parse("bell_xx_twb").is_err());
    }

    #[test]
    fn lambda_sets_r() {
        let mut p = Point::default();
        p.set(Param::Lambda, 0.5);
        assert!((p.r - 0.5f64.atanh()).abs() < 1e-16);
        assert!((p.get(Param::Lambda) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn cap_applies_only_above_limit() {
        let mut p = Point { t: 1.0, ..Point::default() };
        assert!(p.cap());
        assert_eq!(p.t, T_CAP);
        let mut q = Point { t: 0.9, ..Point::default() };
        assert!(!q.cap());
    }
}
