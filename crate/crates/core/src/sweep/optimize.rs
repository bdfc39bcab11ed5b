//! Bounded Nelder-Mead maximization.
//!
//! Free parameters are mapped to the unit cube (logarithmically where
//! asked) and vertices are clamped to it. The search stops once the simplex
//! fits in a cube of side `tol` around its best vertex.

use serde::Serialize;

use super::{Objective, Param, Point};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Bound {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub log: bool,
}

impl Bound {
    pub fn new(param: Param, lo: f64, hi: f64, log: bool) -> Result<Self> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || (log && lo <= 0.0) {
            return Err(Error::Config(format!(
                "empty or invalid bound for {}: {lo}..{hi}",
                param.name()
            )));
        }
        Ok(Bound { param, lo, hi, log })
    }

    fn to_unit(&self, v: f64) -> f64 {
        let u = if self.log {
            (v.ln() - self.lo.ln()) / (self.hi.ln() - self.lo.ln())
        } else {
            (v - self.lo) / (self.hi - self.lo)
        };
        u.clamp(0.0, 1.0)
    }

    fn from_unit(&self, u: f64) -> f64 {
        let u = u.clamp(0.0, 1.0);
        if self.log {
            (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp()
        } else {
            self.lo + u * (self.hi - self.lo)
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct RefineOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub initial_step: f64,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions { tol: 1e-6, max_iter: 500, initial_step: 0.05 }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct OptimumReport {
    pub objective: String,
    pub point: Point,
    pub params: Vec<(String, f64)>,
    pub value: f64,
    pub start_value: f64,
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub t_capped: bool,
}

struct Evaluator<'a> {
    objective: &'a Objective,
    base: Point,
    free: &'a [Bound],
    evaluations: usize,
    t_capped: bool,
}

impl Evaluator<'_> {
    fn point(&self, u: &[f64]) -> Point {
        let mut p = self.base;
        for (b, &x) in self.free.iter().zip(u) {
            p.set(b.param, b.from_unit(x));
        }
        p
    }

    fn eval(&mut self, u: &[f64]) -> Result<f64> {
        let mut p = self.point(u);
        self.t_capped |= p.cap();
        self.evaluations += 1;
        let v = self
            .objective
            .evaluate(&p)
            .map_err(|e| Error::NonFinite(format!("objective failed at {p:?}: {e}")))?;
        if !v.is_finite() {
            return Err(Error::NonFinite(format!("objective {v} at {p:?}")));
        }
        Ok(v)
    }
}

/// Maximizes `objective` over the `free` parameters starting at `start`.
/// The returned value is never below the starting value.
pub fn refine_max(
    objective: &Objective,
    start: &Point,
    free: &[Bound],
    opts: &RefineOptions,
) -> Result<OptimumReport> {
    if free.is_empty() {
        return Err(Error::Config("refinement needs at least one free parameter".into()));
    }
    let n = free.len();
    let mut ev = Evaluator { objective, base: *start, free, evaluations: 0, t_capped: false };
    let u0: Vec<f64> = free.iter().map(|b| b.to_unit(start.get(b.param))).collect();

    // vertices carry the negated objective; the search minimizes
    let mut simplex: Vec<(Vec<f64>, f64)> = Vec::with_capacity(n + 1);
    let f0 = ev.eval(&u0)?;
    simplex.push((u0.clone(), -f0));
    for i in 0..n {
        let mut u = u0.clone();
        u[i] = if u[i] + opts.initial_step <= 1.0 { u[i] + opts.initial_step } else { u[i] - opts.initial_step };
        let f = ev.eval(&u)?;
        simplex.push((u, -f));
    }

    let cost = |ev: &mut Evaluator, u: &[f64]| ev.eval(u).map(|v| -v);
    let clamp = |v: Vec<f64>| -> Vec<f64> { v.into_iter().map(|x| x.clamp(0.0, 1.0)).collect() };
    let mut iterations = 0;
    let mut converged = false;
    while iterations < opts.max_iter {
        simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
        let best = simplex[0].0.clone();
        let diameter = simplex[1..]
            .iter()
            .flat_map(|(u, _)| u.iter().zip(&best).map(|(a, b)| (a - b).abs()))
            .fold(0.0, f64::max);
        if diameter < opts.tol {
            converged = true;
            break;
        }
        iterations += 1;

        let centroid: Vec<f64> = (0..n)
            .map(|k| simplex[..n].iter().map(|(u, _)| u[k]).sum::<f64>() / n as f64)
            .collect();
        let worst = simplex[n].clone();
        let along = |t: f64| -> Vec<f64> {
            clamp(centroid.iter().zip(&worst.0).map(|(c, w)| c + t * (c - w)).collect())
        };

        let xr = along(1.0);
        let fr = cost(&mut ev, &xr)?;
        if fr < simplex[0].1 {
            let xe = along(2.0);
            let fe = cost(&mut ev, &xe)?;
            simplex[n] = if fe < fr { (xe, fe) } else { (xr, fr) };
        } else if fr < simplex[n - 1].1 {
            simplex[n] = (xr, fr);
        } else {
            let (xc, fc) = if fr < worst.1 {
                let x = along(0.5);
                let f = cost(&mut ev, &x)?;
                (x, f)
            } else {
                let x = along(-0.5);
                let f = cost(&mut ev, &x)?;
                (x, f)
            };
            if fc < worst.1.min(fr) {
                simplex[n] = (xc, fc);
            } else {
                for i in 1..=n {
                    let u: Vec<f64> =
                        simplex[i].0.iter().zip(&best).map(|(x, b)| b + 0.5 * (x - b)).collect();
                    let f = cost(&mut ev, &u)?;
                    simplex[i] = (u, f);
                }
            }
        }
    }
    simplex.sort_by(|a, b| a.1.total_cmp(&b.1));
    let (u_best, f_best) = simplex.swap_remove(0);
    let (u_best, value) = if -f_best > f0 { (u_best, -f_best) } else { (u0, f0) };
    let mut point = ev.point(&u_best);
    point.cap();
    Ok(OptimumReport {
        objective: objective.name(),
        params: free.iter().map(|b| (b.param.name().to_string(), point.get(b.param))).collect(),
        point,
        value,
        start_value: f0,
        iterations,
        evaluations: ev.evaluations,
        converged,
        t_capped: ev.t_capped,
    })
}
