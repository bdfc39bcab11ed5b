//! The subcommands, each producing a rendered document.

use std::path::PathBuf;
use std::time::Instant;

use serde_json::json;
use twinbeam::bell::{bell_dp_with, bell_hd_with, bell_onoff, bell_ps_with, AngleSettings, BellTest, CLASSICAL};
use twinbeam::ips::CrossSign;
use twinbeam::sweep::{
    grid_eval, grid_sweep, refine_max, GridAxis, Objective, Param, Point, RefineOptions, StateKind, SweepSpec, T_CAP,
};
use twinbeam::{
    evolve_twb, fidelity_gaussian, fidelity_ips, ips_single_mode, relative_improvements, squeezed_vacuum_form,
    DisplacementSettings,
};
use twinbeam_oracle::check::{CheckGrid, CheckOptions, CheckPoint};
use twinbeam_oracle::{run_checks, OracleConfig};

use crate::config::{Command, Format, Settings};
use crate::error::{CliError, Result};
use crate::format::{sig12, Cell, Table};

/// What a command produced.
#[derive(Debug)]
pub struct Rendered {
    pub body: String,
    /// extra files to write next to the main output
    pub side: Vec<(PathBuf, String)>,
    /// gnuplot stub columns: x column and value columns (1-based)
    pub plot: Option<(usize, Vec<usize>)>,
    pub columns: Vec<String>,
    /// set when the command ran but its verdict is a failure
    pub failure: Option<CliError>,
}

pub fn execute(s: &Settings) -> Result<Rendered> {
    match s.command {
        Command::Fidelity => render(s, fidelity(s)?),
        Command::Bell => render(s, bell(s)?),
        Command::Energy => render(s, energy(s)?),
        Command::Sweep => sweep(s),
        Command::OracleCheck => oracle_check(s),
    }
}

fn render(s: &Settings, t: Table) -> Result<Rendered> {
    let body = match s.format {
        Format::Csv => t.to_csv(),
        Format::Json => t.to_json(),
    };
    let x = s.series_keys.len() + 1;
    let values = ((x + 1)..t.columns.len()).collect();
    Ok(Rendered { body, side: vec![], plot: Some((x, values)), columns: t.columns.clone(), failure: None })
}

fn effective_axes(s: &Settings, default: &str) -> Result<Vec<GridAxis>> {
    if s.axes.is_empty() {
        Ok(vec![GridAxis::parse(default)?])
    } else {
        Ok(s.axes.clone())
    }
}

fn metadata(s: &Settings, axes: &[GridAxis]) -> Vec<(String, String)> {
    let b = &s.base;
    let mut m: Vec<(String, String)> = vec![("command".into(), s.command.name().into())];
    if let Some(d) = &s.config.description {
        m.push(("description".into(), d.clone()));
    }
    for p in Param::ALL {
        m.push((p.name().into(), sig12(b.get(p))));
    }
    m.push(("state".into(), s.state.name().into()));
    if let Some(t) = s.test {
        m.push(("test".into(), t.name().into()));
    }
    if let Some(a) = &s.angles {
        let v: Vec<String> = a.a.iter().chain(&a.b).map(|x| sig12(*x)).collect();
        m.push(("angles".into(), v.join(" ")));
    }
    for (i, a) in axes.iter().enumerate() {
        let kind = if a.log { ":log" } else { "" };
        m.push((format!("grid.{i}"), format!("{}={}:{}:{}{kind}", a.param.name(), sig12(a.lo), sig12(a.hi), a.steps)));
    }
    for (i, entry) in s.config.series.iter().enumerate() {
        let parts: Vec<String> = entry.iter().map(|(k, v)| format!("{k}={v}")).collect();
        m.push((format!("series.{i}"), parts.join(" ")));
    }
    m.push(("t_cap".into(), sig12(T_CAP)));
    m.push(("seed".into(), s.seed.to_string()));
    if let Some(c) = s.cutoff {
        m.push(("cutoff".into(), c.to_string()));
    }
    m.push(("version".into(), env!("CARGO_PKG_VERSION").into()));
    m
}

type Values = Vec<std::result::Result<Cell, String>>;

/// One row per grid point per series, leading with the series overrides and
/// the grid coordinates, trailing with a `note` column for failures.
fn curves<F>(s: &Settings, axes: &[GridAxis], with_lambda: bool, names: &[&str], eval: F) -> Table
where
    F: Fn(&Point, StateKind) -> Values + Sync,
{
    let mut columns: Vec<String> = s.series_keys.clone();
    columns.extend(axes.iter().map(|a| a.param.name().to_string()));
    let add_lambda = with_lambda && !axes.iter().any(|a| a.param == Param::Lambda);
    if add_lambda {
        columns.push("lambda".into());
    }
    columns.extend(names.iter().map(|n| n.to_string()));
    columns.push("note".into());

    let mut rows = Vec::new();
    let mut capped = s.t_capped;
    for series in &s.series {
        let lead: Vec<Cell> = s
            .series_keys
            .iter()
            .map(|k| match series.labels.get(k) {
                Some(l) => Cell::Text(l.clone()),
                None if k == "state" => Cell::Text(series.state.name().into()),
                None => Cell::Num(series.point.get(Param::parse(k).expect("validated key"))),
            })
            .collect();
        for g in grid_eval(&series.point, axes, |p| eval(p, series.state)) {
            capped |= g.t_capped;
            let mut row = lead.clone();
            row.extend(g.coords.iter().map(|&c| Cell::Num(c)));
            if add_lambda {
                row.push(Cell::Num(g.point.get(Param::Lambda)));
            }
            let mut note = String::new();
            for v in g.value {
                match v {
                    Ok(c) => row.push(c),
                    Err(e) => {
                        if note.is_empty() {
                            note = e;
                        }
                        row.push(Cell::Num(f64::NAN));
                    }
                }
            }
            row.push(Cell::Text(note));
            rows.push(row);
        }
    }
    let mut meta = metadata(s, axes);
    meta.push(("t_capped".into(), capped.to_string()));
    if capped {
        log::info!("transmissivity capped at {T_CAP} for some rows");
    }
    Table { meta, columns, rows, report: None }
}

fn num(r: twinbeam::Result<f64>) -> std::result::Result<Cell, String> {
    r.map(Cell::Num).map_err(|e| e.to_string())
}

fn fidelity(s: &Settings) -> Result<Table> {
    let axes = effective_axes(s, "lambda=0:0.99:100")?;
    if s.vs_energy {
        return Ok(curves(s, &axes, true, &["n_twb", "f_twb", "n_ips", "f_ips"], |p, _| {
            let twb = p.twb().and_then(|t| Ok(evolve_twb(&t, &p.channel()?)));
            let ips = p.state(StateKind::Ips);
            vec![
                num(twb.as_ref().map(|f| f.energy()).map_err(Clone::clone)),
                num(twb.as_ref().map(fidelity_gaussian).map_err(Clone::clone)),
                num(ips.as_ref().map(|st| st.energy()).map_err(Clone::clone)),
                num(ips.as_ref().map(fidelity_ips).map_err(Clone::clone)),
            ]
        }));
    }
    Ok(curves(s, &axes, true, &["f_twb", "f_ips", "r_f", "r_f_id"], |p, _| {
        let f_twb = p.twb().and_then(|t| Ok(fidelity_gaussian(&evolve_twb(&t, &p.channel()?))));
        let rep = (|| relative_improvements(&p.twb()?, &p.ips()?, &p.channel()?))();
        vec![
            num(f_twb),
            num(rep.clone().map(|r| r.f_ips)),
            num(rep.clone().map(|r| r.r_f)),
            num(rep.map(|r| r.r_f_id)),
        ]
    }))
}

fn bell_value(p: &Point, kind: StateKind, test: BellTest, angles: Option<AngleSettings>) -> twinbeam::Result<f64> {
    let state = p.state(kind)?;
    let res = match test {
        BellTest::Dp => bell_dp_with(&state, &DisplacementSettings::parity(p.j)?)?,
        BellTest::Hd => bell_hd_with(&state, &angles.unwrap_or_else(AngleSettings::homodyne), p.eta_h)?,
        BellTest::Ps => bell_ps_with(&state, &angles.unwrap_or_else(AngleSettings::pseudospin))?,
        BellTest::OnOff => bell_onoff(&state, p.j, &p.detector()?)?,
    };
    Ok(res.value)
}

fn bell(s: &Settings) -> Result<Table> {
    let test = s.test.ok_or_else(|| CliError::Config("bell needs a test (dp, hd, ps, onoff)".into()))?;
    let axes = effective_axes(s, "r=0:3:61")?;
    Ok(curves(s, &axes, false, &["B", "violated"], |p, kind| match bell_value(p, kind, test, s.angles) {
        Ok(b) => vec![Ok(Cell::Num(b)), Ok(Cell::Bool(b.abs() > CLASSICAL))],
        Err(e) => vec![Err(e.to_string()), Ok(Cell::Text(String::new()))],
    }))
}

fn energy(s: &Settings) -> Result<Table> {
    let axes = effective_axes(s, "lambda=0:0.99:100")?;
    if s.single_mode {
        let noisy = s.series.iter().any(|x| x.point.gamma_t != 0.0 || x.point.nth != 0.0)
            || axes.iter().any(|a| matches!(a.param, Param::GammaT | Param::Nth));
        if noisy {
            return Err(CliError::Config("single_mode: the single-mode energies take no channel (gamma_t, nth)".into()));
        }
        return Ok(curves(s, &axes, true, &["e_s", "e_1"], |p, _| {
            let form = squeezed_vacuum_form(p.r);
            let sub = form.clone().and_then(|f| ips_single_mode(&f, &p.ips()?));
            vec![num(form.map(|f| f.energy())), num(sub.map(|st| st.energy()))]
        }));
    }
    Ok(curves(s, &axes, true, &["e_s", "e_ips"], |p, _| {
        let input = p.state(StateKind::Twb).map(|st| st.energy());
        vec![num(input), num(p.state(StateKind::Ips).map(|st| st.energy()))]
    }))
}

fn sweep(s: &Settings) -> Result<Rendered> {
    let name = s.objective.as_deref().ok_or_else(|| CliError::Config("sweep needs an objective".into()))?;
    let objective = Objective::parse(name)?;
    if !s.config.series.is_empty() {
        return Err(CliError::Config("sweep takes no series; run one sweep per curve".into()));
    }
    let spec = SweepSpec { base: s.base, axes: s.axes.clone(), objective };
    let started = Instant::now();
    let table = grid_sweep(&spec)?;
    let mut columns = table.columns.clone();
    columns.push("note".into());
    let rows: Vec<Vec<Cell>> = table
        .rows
        .iter()
        .map(|r| {
            let mut row: Vec<Cell> = r.coords.iter().map(|&c| Cell::Num(c)).collect();
            match &r.values {
                Ok(v) => {
                    row.push(Cell::Num(v[0]));
                    row.push(Cell::Text(String::new()));
                }
                Err(e) => {
                    row.push(Cell::Num(f64::NAN));
                    row.push(Cell::Text(e.clone()));
                }
            }
            row
        })
        .collect();
    let mut meta = metadata(s, &s.axes);
    meta.push(("objective".into(), objective.name()));
    meta.push(("t_capped".into(), (s.t_capped || table.any_capped()).to_string()));

    let report = if s.refine.is_empty() {
        None
    } else {
        let best = table
            .best()
            .ok_or_else(|| CliError::Numerical("no grid point evaluated successfully".into()))?;
        let grid_best = best.values.as_ref().expect("best rows succeeded")[0];
        let rep = refine_max(&objective, &best.point, &s.refine, &RefineOptions::default())?;
        let bounds: Vec<String> = s.config.refine.clone();
        Some(json!({
            "report": rep,
            "grid_best": grid_best,
            "grid_points": table.rows.len(),
            "grid_steps": s.axes.iter().map(|a| a.steps).collect::<Vec<_>>(),
            "refine_bounds": bounds,
            "t_capped": rep.t_capped || table.any_capped() || s.t_capped,
        }))
    };
    log::info!("sweep finished in {:.3} s", started.elapsed().as_secs_f64());

    let out = Table { meta, columns, rows, report };
    let mut side = vec![];
    let body = match s.format {
        Format::Json => out.to_json(),
        Format::Csv => {
            let mut body = Table { report: None, ..out.clone() }.to_csv();
            if let Some(rep) = &out.report {
                let text = serde_json::to_string_pretty(rep).expect("reports serialize") + "\n";
                match &s.out {
                    Some(path) => side.push((path.with_extension("optimum.json"), text)),
                    None => body.push_str(&format!("# optimum={}\n", serde_json::to_string(rep).expect("reports serialize"))),
                }
            }
            body
        }
    };
    let n = s.axes.len();
    Ok(Rendered { body, side, plot: Some((1, vec![n + 1])), columns: out.columns, failure: None })
}

fn oracle_check(s: &Settings) -> Result<Rendered> {
    if s.format == Format::Csv {
        return Err(CliError::Config("format: oracle-check writes JSON only".into()));
    }
    let grid = if s.points.is_empty() {
        CheckGrid::default()
    } else {
        CheckGrid { points: s.points.iter().map(|p| CheckPoint { r: p[0], t: p[1], eps: p[2] }).collect() }
    };
    let defaults = CheckOptions::default();
    let mut config = OracleConfig::default();
    if let Some(mb) = s.config.memory_budget_mb {
        config.memory_budget = mb << 20;
    }
    let opts = CheckOptions {
        fidelity_samples: s.config.fidelity_samples.unwrap_or(defaults.fidelity_samples),
        fidelity: !s.config.skip_fidelity.unwrap_or(false),
        seed: s.seed,
        cutoff: s.cutoff,
        config,
        sign: if s.config.inject_sign_error.unwrap_or(false) { CrossSign::Flipped } else { CrossSign::Physical },
        ..defaults
    };
    let reports = run_checks(&grid, &opts)?;
    let failed = reports.iter().filter(|r| !r.pass).count();
    for r in reports.iter().filter(|r| !r.pass) {
        log::error!(
            "{} at r={} T={} eps={}: closed {} vs oracle {} (converged: {})",
            r.quantity, r.r, r.t, r.eps, r.closed_form, r.oracle, r.converged
        );
    }
    let body = serde_json::to_string_pretty(&reports).expect("reports serialize") + "\n";
    let failure = (failed > 0).then_some(CliError::OracleMismatch { failed, total: reports.len() });
    Ok(Rendered { body, side: vec![], plot: None, columns: vec![], failure })
}
