//! Run configuration: a TOML file, command-line flags on top.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use twinbeam::bell::{AngleSettings, BellTest};
use twinbeam::sweep::{GridAxis, Param, Point, StateKind};
use twinbeam::{ChannelParams, DetectorParams, IpsParams, TwbParams};

use crate::error::{CliError, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Fidelity,
    Bell,
    Energy,
    Sweep,
    OracleCheck,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Fidelity => "fidelity",
            Command::Bell => "bell",
            Command::Energy => "energy",
            Command::Sweep => "sweep",
            Command::OracleCheck => "oracle-check",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Everything a run can be told, all optional; see [`RunConfig::resolve`]
/// for defaults.
#[derive(Clone, Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Option<Command>,
    /// free text, echoed in the output header
    pub description: Option<String>,
    pub r: Option<f64>,
    pub lambda: Option<f64>,
    #[serde(rename = "T")]
    pub t: Option<f64>,
    pub eps: Option<f64>,
    pub gamma_t: Option<f64>,
    pub nth: Option<f64>,
    pub eta: Option<f64>,
    pub dark: Option<f64>,
    pub eta_h: Option<f64>,
    #[serde(rename = "J")]
    pub j: Option<f64>,
    /// `[a1, a2, b1, b2]` for the homodyne and pseudospin tests
    pub angles: Option<[f64; 4]>,
    pub test: Option<String>,
    pub state: Option<String>,
    #[serde(default)]
    pub grid: Vec<String>,
    /// one curve per entry; each entry overrides parameters (and `state`)
    #[serde(default)]
    pub series: Vec<BTreeMap<String, toml::Value>>,
    pub single_mode: Option<bool>,
    pub vs_energy: Option<bool>,
    pub objective: Option<String>,
    /// refinement bounds, `name=lo:hi[:log]`
    #[serde(default)]
    pub refine: Vec<String>,
    /// oracle points as `[r, T, eps]`
    pub points: Option<Vec<[f64; 3]>>,
    pub fidelity_samples: Option<usize>,
    pub skip_fidelity: Option<bool>,
    pub memory_budget_mb: Option<usize>,
    pub inject_sign_error: Option<bool>,
    pub seed: Option<u64>,
    pub cutoff: Option<usize>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub plot: Option<PathBuf>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::parse(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.message().to_string()))
    }

    /// `over` wins wherever it says something.
    pub fn merge(self, over: RunConfig) -> RunConfig {
        let (r, lambda) = if over.r.is_some() || over.lambda.is_some() {
            (over.r, over.lambda)
        } else {
            (self.r, self.lambda)
        };
        let pick_vec = |a: Vec<String>, b: Vec<String>| if b.is_empty() { a } else { b };
        RunConfig {
            command: over.command.or(self.command),
            description: over.description.or(self.description),
            r,
            lambda,
            t: over.t.or(self.t),
            eps: over.eps.or(self.eps),
            gamma_t: over.gamma_t.or(self.gamma_t),
            nth: over.nth.or(self.nth),
            eta: over.eta.or(self.eta),
            dark: over.dark.or(self.dark),
            eta_h: over.eta_h.or(self.eta_h),
            j: over.j.or(self.j),
            angles: over.angles.or(self.angles),
            test: over.test.or(self.test),
            state: over.state.or(self.state),
            grid: pick_vec(self.grid, over.grid),
            series: if over.series.is_empty() { self.series } else { over.series },
            single_mode: over.single_mode.or(self.single_mode),
            vs_energy: over.vs_energy.or(self.vs_energy),
            objective: over.objective.or(self.objective),
            refine: pick_vec(self.refine, over.refine),
            points: over.points.or(self.points),
            fidelity_samples: over.fidelity_samples.or(self.fidelity_samples),
            skip_fidelity: over.skip_fidelity.or(self.skip_fidelity),
            memory_budget_mb: over.memory_budget_mb.or(self.memory_budget_mb),
            inject_sign_error: over.inject_sign_error.or(self.inject_sign_error),
            seed: over.seed.or(self.seed),
            cutoff: over.cutoff.or(self.cutoff),
            out: over.out.or(self.out),
            format: over.format.or(self.format),
            plot: over.plot.or(self.plot),
        }
    }

    pub fn resolve(&self) -> Result<Settings> {
        let command = self.command.ok_or_else(|| CliError::Config("no command given".into()))?;
        if self.r.is_some() && self.lambda.is_some() {
            return Err(CliError::Config("r and lambda are mutually exclusive".into()));
        }
        let d = Point::default();
        let mut base = Point {
            r: d.r,
            t: self.t.unwrap_or(0.9),
            eps: self.eps.unwrap_or(d.eps),
            gamma_t: self.gamma_t.unwrap_or(d.gamma_t),
            nth: self.nth.unwrap_or(d.nth),
            eta: self.eta.unwrap_or(d.eta),
            dark: self.dark.unwrap_or(d.dark),
            eta_h: self.eta_h.unwrap_or(d.eta_h),
            j: self.j.unwrap_or(d.j),
        };
        if let Some(r) = self.r {
            base.set(Param::R, r);
        }
        if let Some(l) = self.lambda {
            check_lambda(l)?;
            base.set(Param::Lambda, l);
        }
        let state = match &self.state {
            Some(s) => StateKind::parse(s)?,
            None => StateKind::Ips,
        };
        let test = match &self.test {
            Some(s) => Some(
                BellTest::parse(s).ok_or_else(|| CliError::Config(format!("test: unknown `{s}` (dp, hd, ps, onoff)")))?,
            ),
            None => None,
        };
        let axes = self.grid.iter().map(|g| GridAxis::parse(g)).collect::<twinbeam::Result<Vec<_>>>()?;
        let mut names = std::collections::HashSet::new();
        for a in &axes {
            let key = if a.param == Param::Lambda { Param::R } else { a.param };
            if !names.insert(key) {
                return Err(CliError::Config(format!("grid: {} swept twice", a.param.name())));
            }
        }

        let mut series_keys: Vec<String> = Vec::new();
        let mut series = Vec::new();
        let entries = if self.series.is_empty() { vec![BTreeMap::new()] } else { self.series.clone() };
        for (i, entry) in entries.iter().enumerate() {
            let mut point = base;
            let mut kind = state;
            let mut labels = BTreeMap::new();
            if entry.contains_key("r") && entry.contains_key("lambda") {
                return Err(CliError::Config(format!("series[{i}]: r and lambda are mutually exclusive")));
            }
            for (key, value) in entry {
                if !series_keys.contains(key) {
                    series_keys.push(key.clone());
                }
                if key == "state" {
                    let s = value
                        .as_str()
                        .ok_or_else(|| CliError::Config(format!("series[{i}].state must be a string")))?;
                    kind = StateKind::parse(s)?;
                    labels.insert(key.clone(), s.to_string());
                    continue;
                }
                let param = Param::parse(key).map_err(|_| CliError::Config(format!("series[{i}]: unknown key `{key}`")))?;
                let v = value
                    .as_float()
                    .or_else(|| value.as_integer().map(|n| n as f64))
                    .ok_or_else(|| CliError::Config(format!("series[{i}].{key} must be a number")))?;
                if param == Param::Lambda {
                    check_lambda(v)?;
                }
                point.set(param, v);
            }
            series.push(Series { point, state: kind, labels });
        }

        let mut t_capped = base.cap();
        for s in &mut series {
            t_capped |= s.point.cap();
            validate(&s.point)?;
        }
        let angles = self.angles.map(|[a1, a2, b1, b2]| AngleSettings { a: [a1, a2], b: [b1, b2] });
        if let Some(a) = &angles {
            if a.a.iter().chain(&a.b).any(|x| !x.is_finite()) {
                return Err(CliError::Config("angles must be finite".into()));
            }
        }
        let mut refine = Vec::new();
        for spec in &self.refine {
            refine.push(parse_bound(spec)?);
        }
        let points = self.points.clone().unwrap_or_default();
        for p in &points {
            TwbParams::new(p[0])?;
            IpsParams::new(p[1], p[2])?;
        }
        if self.fidelity_samples == Some(0) {
            return Err(CliError::Config("fidelity_samples must be positive".into()));
        }
        if self.memory_budget_mb == Some(0) {
            return Err(CliError::Config("memory_budget_mb must be positive".into()));
        }
        Ok(Settings {
            command,
            config: self.clone(),
            base,
            state,
            test,
            angles,
            axes,
            series,
            series_keys,
            t_capped,
            single_mode: self.single_mode.unwrap_or(false),
            vs_energy: self.vs_energy.unwrap_or(false),
            objective: self.objective.clone(),
            refine,
            points,
            seed: self.seed.unwrap_or(2024),
            cutoff: self.cutoff,
            format: self.format.unwrap_or(match command {
                Command::OracleCheck => Format::Json,
                _ => Format::Csv,
            }),
            out: self.out.clone(),
            plot: self.plot.clone(),
        })
    }
}

fn check_lambda(l: f64) -> Result<()> {
    if (0.0..1.0).contains(&l) {
        Ok(())
    } else {
        Err(CliError::Config(format!("invalid parameter lambda = {l}: must lie in [0, 1)")))
    }
}

fn validate(p: &Point) -> Result<()> {
    TwbParams::new(p.r)?;
    ChannelParams::new(p.gamma_t, p.nth)?;
    IpsParams::new(p.t, p.eps)?;
    DetectorParams::new(p.eta, p.dark)?;
    if !(p.eta_h > 0.0 && p.eta_h <= 1.0) {
        return Err(CliError::Config(format!("invalid parameter eta_h = {}: must lie in (0, 1]", p.eta_h)));
    }
    if !(p.j >= 0.0 && p.j.is_finite()) {
        return Err(CliError::Config(format!("invalid parameter J = {}: must be non-negative", p.j)));
    }
    Ok(())
}

/// `name=lo:hi` or `name=lo:hi:log`.
pub fn parse_bound(spec: &str) -> Result<twinbeam::sweep::Bound> {
    let bad = || CliError::Config(format!("refine bound `{spec}` is not name=lo:hi[:log]"));
    let (name, range) = spec.split_once('=').ok_or_else(bad)?;
    let parts: Vec<&str> = range.split(':').map(str::trim).collect();
    let (lo, hi, log) = match parts.as_slice() {
        [lo, hi] => (lo, hi, false),
        [lo, hi, "log"] => (lo, hi, true),
        _ => return Err(bad()),
    };
    let lo: f64 = lo.parse().map_err(|_| bad())?;
    let hi: f64 = hi.parse().map_err(|_| bad())?;
    Ok(twinbeam::sweep::Bound::new(Param::parse(name.trim())?, lo, hi, log)?)
}

/// One curve: the base point with its overrides applied.
#[derive(Clone, Debug)]
pub struct Series {
    pub point: Point,
    pub state: StateKind,
    /// non-numeric overrides, by key
    pub labels: BTreeMap<String, String>,
}

/// A validated run.
#[derive(Clone, Debug)]
pub struct Settings {
    pub command: Command,
    pub config: RunConfig,
    /// parameters before series overrides
    pub base: Point,
    pub state: StateKind,
    pub test: Option<BellTest>,
    pub angles: Option<AngleSettings>,
    pub axes: Vec<GridAxis>,
    pub series: Vec<Series>,
    /// override keys in first-seen order; each becomes a leading column
    pub series_keys: Vec<String>,
    /// some base or series transmissivity was capped
    pub t_capped: bool,
    pub single_mode: bool,
    pub vs_energy: bool,
    pub objective: Option<String>,
    pub refine: Vec<twinbeam::sweep::Bound>,
    pub points: Vec<[f64; 3]>,
    pub seed: u64,
    pub cutoff: Option<usize>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub plot: Option<PathBuf>,
}
