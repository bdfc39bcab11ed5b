use rayon::prelude::*;
use serde::Serialize;

use super::{Objective, Param, Point};
use crate::error::{Error, Result};

/// One swept parameter: `steps` values from `lo` to `hi` inclusive.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GridAxis {
    pub param: Param,
    pub lo: f64,
    pub hi: f64,
    pub steps: usize,
    pub log: bool,
}

impl GridAxis {
    pub fn linear(param: Param, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let axis = GridAxis { param, lo, hi, steps, log: false };
        axis.validate()?;
        Ok(axis)
    }

    pub fn logarithmic(param: Param, lo: f64, hi: f64, steps: usize) -> Result<Self> {
        let axis = GridAxis { param, lo, hi, steps, log: true };
        axis.validate()?;
        Ok(axis)
    }

    /// Parses `name=lo:hi:steps` or `name=lo:hi:steps:log`.
    pub fn parse(spec: &str) -> Result<Self> {
        let bad = || Error::Config(format!("grid `{spec}` is not name=lo:hi:steps[:log]"));
        let (name, range) = spec.split_once('=').ok_or_else(bad)?;
        let parts: Vec<&str> = range.split(':').collect();
        if parts.len() != 3 && parts.len() != 4 {
            return Err(bad());
        }
        let lo: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let hi: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let steps: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|s| s.trim()) {
            None | Some("lin") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        let axis = GridAxis { param: Param::parse(name.trim())?, lo, hi, steps, log };
        axis.validate()?;
        Ok(axis)
    }

    fn validate(&self) -> Result<()> {
        let name = self.param.name();
        if self.steps == 0 || !(self.lo <= self.hi) || !self.lo.is_finite() || !self.hi.is_finite() {
            return Err(Error::Config(format!(
                "empty range for {name}: {}..{} in {} steps",
                self.lo, self.hi, self.steps
            )));
        }
        if self.log && self.lo <= 0.0 {
            return Err(Error::Config(format!("log grid for {name} needs lo > 0")));
        }
        if self.steps == 1 && self.lo != self.hi {
            return Err(Error::Config(format!("one step cannot span {name} = {}..{}", self.lo, self.hi)));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        if self.steps == 1 {
            return vec![self.lo];
        }
        let n = (self.steps - 1) as f64;
        (0..self.steps)
            .map(|i| {
                let u = i as f64 / n;
                if i + 1 == self.steps {
                    self.hi
                } else if self.log {
                    (self.lo.ln() + u * (self.hi.ln() - self.lo.ln())).exp()
                } else {
                    self.lo + u * (self.hi - self.lo)
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GridRow {
    pub coords: Vec<f64>,
    pub point: Point,
    pub t_capped: bool,
    /// Row values, or the error message of a failed evaluation.
    pub values: std::result::Result<Vec<f64>, String>,
}

/// One grid point with its coordinates, in grid order.
#[derive(Clone, Debug)]
pub struct GridPoint<T> {
    pub coords: Vec<f64>,
    pub point: Point,
    pub t_capped: bool,
    pub value: T,
}

/// Evaluates `f` on the Cartesian product of `axes` (last axis fastest).
/// Points run in parallel; the output order is fixed by the grid.
pub fn grid_eval<T, F>(base: &Point, axes: &[GridAxis], f: F) -> Vec<GridPoint<T>>
where
    T: Send,
    F: Fn(&Point) -> T + Sync,
{
    let values: Vec<Vec<f64>> = axes.iter().map(|a| a.values()).collect();
    let total: usize = values.iter().map(|v| v.len()).product();
    let coords_of = |mut idx: usize| -> Vec<f64> {
        let mut c = vec![0.0; axes.len()];
        for (k, v) in values.iter().enumerate().rev() {
            c[k] = v[idx % v.len()];
            idx /= v.len();
        }
        c
    };
    (0..total)
        .into_par_iter()
        .map(|idx| {
            let coords = coords_of(idx);
            let mut point = *base;
            for (axis, &v) in axes.iter().zip(&coords) {
                point.set(axis.param, v);
            }
            let t_capped = point.cap();
            let value = f(&point);
            GridPoint { coords, point, t_capped, value }
        })
        .collect()
}

/// [`grid_eval`] for vector-valued objectives. A failed point becomes an
/// error row, a non-finite value aborts the sweep.
pub fn grid_map<F>(base: &Point, axes: &[GridAxis], f: F) -> Result<Vec<GridRow>>
where
    F: Fn(&Point) -> Result<Vec<f64>> + Sync,
{
    grid_eval(base, axes, f)
        .into_iter()
        .map(|g| {
            let values = match g.value {
                Ok(v) => {
                    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                        return Err(Error::NonFinite(format!("value {bad} at {:?}", g.point)));
                    }
                    Ok(v)
                }
                Err(e) => Err(e.to_string()),
            };
            Ok(GridRow { coords: g.coords, point: g.point, t_capped: g.t_capped, values })
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepSpec {
    pub base: Point,
    pub axes: Vec<GridAxis>,
    pub objective: Objective,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<GridRow>,
}

impl SweepTable {
    pub fn any_capped(&self) -> bool {
        self.rows.iter().any(|r| r.t_capped)
    }

    /// Best successful row of the single objective column.
    pub fn best(&self) -> Option<&GridRow> {
        self.rows
            .iter()
            .filter_map(|r| r.values.as_ref().ok().map(|v| (r, v[0])))
            .fold(None, |acc: Option<(&GridRow, f64)>, (r, v)| match acc {
                Some((_, best)) if best >= v => acc,
                _ => Some((r, v)),
            })
            .map(|(r, _)| r)
    }
}

pub fn grid_sweep(spec: &SweepSpec) -> Result<SweepTable> {
    if spec.axes.is_empty() {
        return Err(Error::Config("sweep needs at least one grid axis".into()));
    }
    let rows = grid_map(&spec.base, &spec.axes, |p| Ok(vec![spec.objective.evaluate(p)?]))?;
    let mut columns: Vec<String> = spec.axes.iter().map(|a| a.param.name().to_string()).collect();
    columns.push(spec.objective.name());
    Ok(SweepTable { columns, rows })
}
