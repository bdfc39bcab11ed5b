//! Command-line flags, mapped onto [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::config::{Command, Format, RunConfig};
use crate::error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "twinbeam", version, about = "Twin-beam and photon-subtracted states: teleportation and Bell tests")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Sub,
}

#[derive(Debug, Subcommand)]
pub enum Sub {
    /// Teleportation fidelity curves
    Fidelity(Flags),
    /// Bell parameter curves for one test
    Bell(Flags),
    /// Mean photon numbers before and after subtraction
    Energy(Flags),
    /// Grid sweep of one objective, with optional local refinement
    Sweep(Flags),
    /// Compare closed forms against the Fock-space oracle
    OracleCheck(Flags),
    /// Run the command named inside a config file
    Run {
        #[arg(value_name = "CONFIG")]
        file: PathBuf,
        #[command(flatten)]
        flags: Flags,
    },
}

#[derive(Debug, Default, Args)]
pub struct Flags {
    /// TOML run configuration; flags override it
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, conflicts_with = "lambda", allow_negative_numbers = true)]
    pub r: Option<f64>,
    /// tanh r
    #[arg(long, allow_negative_numbers = true)]
    pub lambda: Option<f64>,
    /// subtraction beam-splitter transmissivity
    #[arg(long = "T", allow_negative_numbers = true)]
    pub t: Option<f64>,
    /// subtraction detector efficiency
    #[arg(long, allow_negative_numbers = true)]
    pub eps: Option<f64>,
    #[arg(long = "gamma-t", allow_negative_numbers = true)]
    pub gamma_t: Option<f64>,
    /// thermal photons of the channel
    #[arg(long, allow_negative_numbers = true)]
    pub nth: Option<f64>,
    /// on/off detector efficiency of the Bell test
    #[arg(long, allow_negative_numbers = true)]
    pub eta: Option<f64>,
    /// mean dark counts of the on/off detectors
    #[arg(long, allow_negative_numbers = true)]
    pub dark: Option<f64>,
    /// homodyne efficiency
    #[arg(long = "eta-h", allow_negative_numbers = true)]
    pub eta_h: Option<f64>,
    /// displacement amplitude of the parity and on/off tests
    #[arg(long = "J", allow_negative_numbers = true)]
    pub j: Option<f64>,
    /// four measurement angles a1 a2 b1 b2
    #[arg(long, num_args = 4, value_names = ["A1", "A2", "B1", "B2"], allow_negative_numbers = true)]
    pub angles: Option<Vec<f64>>,
    #[arg(long, value_parser = ["dp", "hd", "ps", "onoff"])]
    pub test: Option<String>,
    #[arg(long, value_parser = ["twb", "ips"])]
    pub state: Option<String>,
    /// swept axis, `name=lo:hi:steps[:log]`; repeat for a product grid
    #[arg(long)]
    pub grid: Vec<String>,
    /// single-mode squeezed vacuum input (energy)
    #[arg(long)]
    pub single_mode: bool,
    /// report photon numbers next to fidelities (fidelity)
    #[arg(long)]
    pub vs_energy: bool,
    /// sweep objective, e.g. bell_onoff_ips, fidelity_twb, r_f
    #[arg(long)]
    pub objective: Option<String>,
    /// refinement bound `name=lo:hi[:log]`; repeat per free parameter
    #[arg(long)]
    pub refine: Vec<String>,
    /// oracle point `r,T,eps`; repeat
    #[arg(long, value_parser = parse_point)]
    pub point: Vec<[f64; 3]>,
    #[arg(long)]
    pub fidelity_samples: Option<usize>,
    /// leave out the Monte-Carlo fidelity comparison
    #[arg(long)]
    pub skip_fidelity: bool,
    #[arg(long)]
    pub memory_budget_mb: Option<usize>,
    /// flip the subtraction cross-term sign (negative control)
    #[arg(long, hide = true)]
    pub inject_sign_error: bool,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub cutoff: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// write a gnuplot script for the output
    #[arg(long)]
    pub plot: Option<PathBuf>,
}

fn parse_point(s: &str) -> std::result::Result<[f64; 3], String> {
    let v: Vec<f64> = s
        .split(',')
        .map(|x| x.trim().parse::<f64>())
        .collect::<std::result::Result<_, _>>()
        .map_err(|e| format!("{e} in `{s}`"))?;
    <[f64; 3]>::try_from(v).map_err(|_| format!("expected r,T,eps, got `{s}`"))
}

impl Flags {
    fn to_config(&self) -> Result<RunConfig> {
        let angles = match &self.angles {
            Some(v) => Some([v[0], v[1], v[2], v[3]]),
            None => None,
        };
        let points = (!self.point.is_empty()).then(|| self.point.clone());
        let flag = |b: bool| b.then_some(true);
        Ok(RunConfig {
            r: self.r,
            lambda: self.lambda,
            t: self.t,
            eps: self.eps,
            gamma_t: self.gamma_t,
            nth: self.nth,
            eta: self.eta,
            dark: self.dark,
            eta_h: self.eta_h,
            j: self.j,
            angles,
            test: self.test.clone(),
            state: self.state.clone(),
            grid: self.grid.clone(),
            single_mode: flag(self.single_mode),
            vs_energy: flag(self.vs_energy),
            objective: self.objective.clone(),
            refine: self.refine.clone(),
            points,
            fidelity_samples: self.fidelity_samples,
            skip_fidelity: flag(self.skip_fidelity),
            memory_budget_mb: self.memory_budget_mb,
            inject_sign_error: flag(self.inject_sign_error),
            seed: self.seed,
            cutoff: self.cutoff,
            out: self.out.clone(),
            format: self.format,
            plot: self.plot.clone(),
            ..RunConfig::default()
        })
    }
}

impl Cli {
    /// The merged configuration: file first, then flags.
    pub fn into_config(self) -> Result<RunConfig> {
        let (command, flags, file) = match self.command {
            Sub::Fidelity(f) => (Some(Command::Fidelity), f, None),
            Sub::Bell(f) => (Some(Command::Bell), f, None),
            Sub::Energy(f) => (Some(Command::Energy), f, None),
            Sub::Sweep(f) => (Some(Command::Sweep), f, None),
            Sub::OracleCheck(f) => (Some(Command::OracleCheck), f, None),
            Sub::Run { file, flags } => (None, flags, Some(file)),
        };
        if file.is_some() && flags.config.is_some() {
            return Err(CliError::Config("run takes its config as the positional argument".into()));
        }
        let base = match file.as_ref().or(flags.config.as_ref()) {
            Some(path) => RunConfig::load(path)?,
            None => RunConfig::default(),
        };
        if let (Some(want), Some(have)) = (command, base.command) {
            if want != have {
                return Err(CliError::Config(format!(
                    "config is for `{}`, not `{}`",
                    have.name(),
                    want.name()
                )));
            }
        }
        let mut over = flags.to_config()?;
        over.command = command;
        Ok(base.merge(over))
    }
}
