//! Closed form versus oracle comparison suite.

use num_complex::Complex64;
use serde::Serialize;
use twinbeam::bell::{no_click_a, no_click_b, no_click_both};
use twinbeam::ips::CrossSign;
use twinbeam::{
    fidelity_ips, noisy_twb_pair, ChannelParams, DetectorParams, DisplacementSettings, FockState2,
    GaussianSumState, IpsCoefficients, IpsParams, TwbParams,
};

use crate::measure::{energy, expect_onoff, expect_parity_displaced};
use crate::quadrature::QuadratureGrid;
use crate::states::{apply_ips, build_twb, recommended_cutoff};
use crate::teleport::{self, bell_density, fidelity_from_density};
use crate::{OracleConfig, OracleError, Result};

/// Largest change under cutoff doubling accepted as converged.
pub const CONVERGENCE: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CheckPoint {
    pub r: f64,
    pub t: f64,
    pub eps: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckGrid {
    pub points: Vec<CheckPoint>,
}

impl Default for CheckGrid {
    fn default() -> Self {
        let mut points = Vec::new();
        for r in [0.2, 0.39, 0.5, 0.6] {
            for t in [0.8, 0.9, 0.9999] {
                for eps in [0.5, 1.0] {
                    points.push(CheckPoint { r, t, eps });
                }
            }
        }
        CheckGrid { points }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct CheckOptions {
    pub tolerance: f64,
    pub fidelity_tolerance: f64,
    pub fidelity_samples: usize,
    /// skip the (slow) teleportation comparison
    pub fidelity: bool,
    pub seed: u64,
    pub parity_j: f64,
    pub onoff_j: f64,
    pub detector: DetectorParams,
    /// fixed cutoff instead of the heuristic
    pub cutoff: Option<usize>,
    pub config: OracleConfig,
    #[doc(hidden)]
    pub sign: CrossSign,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            tolerance: 1e-6,
            fidelity_tolerance: 2e-3,
            fidelity_samples: 1_000_000,
            fidelity: true,
            seed: 2024,
            parity_j: 1.6e-3,
            onoff_j: 0.16,
            detector: DetectorParams::ideal(),
            cutoff: None,
            config: OracleConfig::default(),
            sign: CrossSign::Physical,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OracleReport {
    pub quantity: String,
    pub r: f64,
    pub t: f64,
    pub eps: f64,
    pub closed_form: f64,
    pub oracle: f64,
    pub abs_dev: f64,
    pub rel_dev: f64,
    pub tolerance: f64,
    /// tolerance applies to `rel_dev` rather than `abs_dev`
    pub relative: bool,
    pub cutoff: usize,
    pub converged: bool,
    pub pass: bool,
}

struct Quantity {
    name: String,
    closed: f64,
    relative: bool,
    oracle: Box<dyn Fn(&FockState2, f64) -> f64>,
}

fn local_quantities(state: &GaussianSumState, p11: f64, opts: &CheckOptions) -> Result<Vec<Quantity>> {
    let zero = Complex64::new(0.0, 0.0);
    let mut out = vec![
        Quantity { name: "p11".into(), closed: p11, relative: true, oracle: Box::new(|_, p| p) },
        Quantity { name: "energy".into(), closed: state.energy(), relative: false, oracle: Box::new(|s, _| energy(s)) },
        Quantity {
            name: "wigner_00".into(),
            closed: state.wigner(zero, zero),
            relative: false,
            oracle: Box::new(move |s, _| crate::measure::wigner(s, zero, zero)),
        },
    ];
    let dp = DisplacementSettings::parity(opts.parity_j)?;
    for i in 0..2 {
        for j in 0..2 {
            let (a, b) = (dp.alpha[i], dp.beta[j]);
            out.push(Quantity {
                name: format!("parity_{i}{j}"),
                closed: state.displaced_parity(a, b),
                relative: false,
                oracle: Box::new(move |s, _| expect_parity_displaced(s, a, b)),
            });
        }
    }
    let oo = DisplacementSettings::onoff(opts.onoff_j)?;
    let det = opts.detector;
    let (eta, dark) = (det.eta(), det.dark());
    for i in 0..2 {
        for j in 0..2 {
            let (a, b) = (oo.alpha[i], oo.beta[j]);
            out.push(Quantity {
                name: format!("no_click_{i}{j}"),
                closed: no_click_both(state, a, b, &det),
                relative: false,
                oracle: Box::new(move |s, _| expect_onoff(s, a, b, eta, dark).p_none),
            });
        }
    }
    let (a0, b0) = (oo.alpha[0], oo.beta[0]);
    out.push(Quantity {
        name: "no_click_a".into(),
        closed: no_click_a(state, a0, &det),
        relative: false,
        oracle: Box::new(move |s, _| expect_onoff(s, a0, zero, eta, dark).p_a_silent),
    });
    out.push(Quantity {
        name: "no_click_b".into(),
        closed: no_click_b(state, b0, &det),
        relative: false,
        oracle: Box::new(move |s, _| expect_onoff(s, zero, b0, eta, dark).p_b_silent),
    });
    Ok(out)
}

fn subtracted(twb: &TwbParams, ips: &IpsParams, cutoff: usize, cfg: &OracleConfig) -> Result<(FockState2, f64)> {
    let (s, p) = apply_ips(&build_twb(twb, cutoff, cfg)?, ips);
    if p <= 0.0 {
        return Err(OracleError::Truncation { cutoff, trace: p });
    }
    Ok((s, p))
}

fn report(q: &str, pt: &CheckPoint, closed: f64, oracle: f64, tol: f64, relative: bool, cutoff: usize, converged: bool) -> OracleReport {
    let abs_dev = (closed - oracle).abs();
    let rel_dev = abs_dev / oracle.abs().max(f64::MIN_POSITIVE);
    let dev = if relative { rel_dev } else { abs_dev };
    OracleReport {
        quantity: q.to_string(),
        r: pt.r,
        t: pt.t,
        eps: pt.eps,
        closed_form: closed,
        oracle,
        abs_dev,
        rel_dev,
        tolerance: tol,
        relative,
        cutoff,
        converged,
        pass: converged && dev <= tol,
    }
}

/// All comparisons at one `(r, T, eps)` point.
pub fn check_point(pt: &CheckPoint, opts: &CheckOptions) -> Result<Vec<OracleReport>> {
    let twb = TwbParams::new(pt.r)?;
    let ips = IpsParams::new(pt.t, pt.eps)?;
    let coeffs = IpsCoefficients::compute_with_sign(
        &noisy_twb_pair(&twb, &ChannelParams::ideal()),
        &ips,
        opts.sign,
    )?;
    let closed = coeffs.state()?;
    let quantities = local_quantities(&closed, coeffs.probability(), opts)?;

    // doubling test, raising the cutoff once when it fails
    let mut cutoff = opts.cutoff.unwrap_or_else(|| recommended_cutoff(&twb, &ips));
    let evaluate = |c: usize| -> Result<(FockState2, Vec<f64>)> {
        let (s, p) = subtracted(&twb, &ips, c, &opts.config)?;
        let v = quantities.iter().map(|q| (q.oracle)(&s, p)).collect();
        Ok((s, v))
    };
    let (mut state, mut values) = evaluate(cutoff)?;
    let (mut fine_state, mut fine) = evaluate(2 * cutoff)?;
    let change = |a: &[f64], b: &[f64]| -> Vec<bool> {
        quantities
            .iter()
            .zip(a.iter().zip(b))
            .map(|(q, (x, y))| {
                let d = (x - y).abs();
                if q.relative { d <= CONVERGENCE * y.abs() } else { d <= CONVERGENCE }
            })
            .collect()
    };
    let mut converged = change(&values, &fine);
    if converged.iter().any(|c| !c) && opts.cutoff.is_none() {
        log::warn!("oracle not converged at cutoff {cutoff} for {pt:?}; raising");
        cutoff *= 2;
        state = fine_state;
        values = fine;
        (fine_state, fine) = evaluate(2 * cutoff)?;
        converged = change(&values, &fine);
    }
    let mut out: Vec<OracleReport> = quantities
        .iter()
        .zip(values.iter().zip(&converged))
        .map(|(q, (&v, &c))| report(&q.name, pt, q.closed, v, opts.tolerance, q.relative, cutoff, c))
        .collect();

    if opts.fidelity {
        // same doubling rule, applied to the deterministic quadrature of the
        // fidelity; the simulated protocol then runs on the coarse state
        let grid = QuadratureGrid::default();
        let density = bell_density(&state, grid);
        let fine_f = bell_density(&fine_state, grid).expectation(teleport::kernel);
        drop(fine_state);
        let ok = (density.expectation(teleport::kernel) - fine_f).abs() < CONVERGENCE;
        let closed_f = fidelity_ips(&closed);
        let mc = fidelity_from_density(&density, opts.fidelity_samples, opts.seed);
        out.push(report("fidelity_mc", pt, closed_f, mc, opts.fidelity_tolerance, false, cutoff, ok));
    }
    Ok(out)
}

pub fn run_checks(grid: &CheckGrid, opts: &CheckOptions) -> Result<Vec<OracleReport>> {
    let mut out = Vec::new();
    for pt in &grid.points {
        out.extend(check_point(pt, opts)?);
    }
    Ok(out)
}
