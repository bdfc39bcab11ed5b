//! Joint quadrature distributions on a grid, and sampling from them.
//!
//! The density matrix is diagonalized block by block (blocks are the
//! connected components of its nonzero pattern), and each eigenvector is
//! expanded on the grid as a two-variable wavefunction.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use twinbeam::FockState2;

use crate::special::hermite_functions;

/// Midpoint grid `[-L, L]^2` with `cells` cells per axis; the origin is a
/// cell boundary so sign binning is exact.
#[derive(Clone, Copy, Debug)]
pub struct QuadratureGrid {
    pub half_width: f64,
    pub cells: usize,
}

impl Default for QuadratureGrid {
    fn default() -> Self {
        QuadratureGrid { half_width: 8.0, cells: 400 }
    }
}

impl QuadratureGrid {
    pub fn step(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn center(&self, i: usize) -> f64 {
        -self.half_width + (i as f64 + 0.5) * self.step()
    }
}

/// `rho = sum_i w_i |e_i><e_i|`, each `e_i` stored as an amplitude matrix
/// `E[(j, k)] = <j, k|e_i>`.
#[derive(Clone, Debug)]
pub struct Spectrum {
    pub weights: Vec<f64>,
    pub vectors: Vec<DMatrix<Complex64>>,
    /// most negative eigenvalue encountered (dropped)
    pub min_eigenvalue: f64,
}

fn find(parent: &mut [usize], mut i: usize) -> usize {
    while parent[i] != i {
        parent[i] = parent[parent[i]];
        i = parent[i];
    }
    i
}

/// Eigen-decomposition dropping eigenvalues whose combined weight is below
/// `tail * trace`.
pub fn spectrum(state: &FockState2, tail: f64) -> Spectrum {
    let rho = state.matrix();
    let d = state.dim();
    let mut parent: Vec<usize> = (0..d).collect();
    for i in 0..d {
        for j in (i + 1)..d {
            if rho[(i, j)].norm_sqr() > 0.0 {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a] = b;
                }
            }
        }
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..d {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(i);
    }

    let side = state.cutoff() + 1;
    let mut pairs: Vec<(f64, DMatrix<Complex64>)> = Vec::new();
    let mut min_eigenvalue = 0.0f64;
    for idx in groups.values() {
        if idx.iter().all(|&i| rho[(i, i)].re == 0.0) {
            continue;
        }
        let block = DMatrix::from_fn(idx.len(), idx.len(), |a, b| rho[(idx[a], idx[b])]);
        let eig = SymmetricEigen::new(block);
        for (k, &w) in eig.eigenvalues.iter().enumerate() {
            if w <= 0.0 {
                min_eigenvalue = min_eigenvalue.min(w);
                continue;
            }
            let mut e = DMatrix::zeros(side, side);
            for (a, &i) in idx.iter().enumerate() {
                e[(i / side, i % side)] = eig.eigenvectors[(a, k)];
            }
            pairs.push((w, e));
        }
    }
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    let total: f64 = pairs.iter().map(|p| p.0).sum();
    let mut keep = pairs.len();
    let mut dropped = 0.0;
    while keep > 1 && dropped + pairs[keep - 1].0 < tail * total {
        dropped += pairs[keep - 1].0;
        keep -= 1;
    }
    pairs.truncate(keep);
    let (weights, vectors) = pairs.into_iter().unzip();
    Spectrum { weights, vectors, min_eigenvalue }
}

/// `psi_n(x)` at every grid centre, one row per cell.
fn hermite_table(n: usize, grid: &QuadratureGrid) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(grid.cells, n + 1);
    for i in 0..grid.cells {
        for (k, v) in hermite_functions(n, grid.center(i)).into_iter().enumerate() {
            out[(i, k)] = v;
        }
    }
    out
}

#[derive(Clone, Debug)]
pub struct JointDensity {
    pub grid: QuadratureGrid,
    /// cell-centre density, index `i * cells + j` for `(x_i, y_j)`
    pub values: Vec<f64>,
}

impl JointDensity {
    /// Density of `x_theta` on the first mode and `x_phi` on the second.
    pub fn from_spectrum(spec: &Spectrum, theta: f64, phi: f64, grid: QuadratureGrid) -> Self {
        let n = grid.cells;
        let mut values = vec![0.0; n * n];
        let Some(first) = spec.vectors.first() else {
            return JointDensity { grid, values };
        };
        // <x_theta|n> = exp(-i n theta) psi_n(x); the phases are folded into
        // the amplitudes so the grid products stay real
        let (ja, jb) = (first.nrows(), first.ncols());
        let ta = hermite_table(ja - 1, &grid);
        let tb = hermite_table(jb - 1, &grid).transpose();
        for (w, e) in spec.weights.iter().zip(&spec.vectors) {
            let mut re = DMatrix::<f64>::zeros(ja, jb);
            let mut im = DMatrix::<f64>::zeros(ja, jb);
            for j in 0..ja {
                for k in 0..jb {
                    let z = e[(j, k)] * Complex64::from_polar(1.0, -(j as f64) * theta - (k as f64) * phi);
                    re[(j, k)] = z.re;
                    im[(j, k)] = z.im;
                }
            }
            let fr = &ta * re * &tb;
            let fi = &ta * im * &tb;
            for i in 0..n {
                for j in 0..n {
                    values[i * n + j] += w * (fr[(i, j)].powi(2) + fi[(i, j)].powi(2));
                }
            }
        }
        JointDensity { grid, values }
    }

    pub fn mass(&self) -> f64 {
        let h = self.grid.step();
        self.values.iter().sum::<f64>() * h * h
    }

    /// Midpoint-rule expectation of `f`, normalized by the grid mass.
    pub fn expectation(&self, f: impl Fn(f64, f64) -> f64) -> f64 {
        let n = self.grid.cells;
        let mut acc = 0.0;
        for i in 0..n {
            let x = self.grid.center(i);
            for j in 0..n {
                acc += self.values[i * n + j] * f(x, self.grid.center(j));
            }
        }
        let h = self.grid.step();
        acc * h * h / self.mass()
    }

    /// Draws a cell by its mass, then a uniform point inside it.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<(f64, f64)> {
        let n = self.grid.cells;
        let mut cdf = Vec::with_capacity(n * n);
        let mut acc = 0.0;
        for v in &self.values {
            acc += v.max(0.0);
            cdf.push(acc);
        }
        let h = self.grid.step();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..count)
            .map(|_| {
                let u = rng.gen::<f64>() * acc;
                let idx = cdf.partition_point(|&c| c <= u).min(n * n - 1);
                let (i, j) = (idx / n, idx % n);
                let x = self.grid.center(i) + (rng.gen::<f64>() - 0.5) * h;
                let y = self.grid.center(j) + (rng.gen::<f64>() - 0.5) * h;
                (x, y)
            })
            .collect()
    }
}

/// Spectral tail dropped before building grid densities.
pub const SPECTRAL_TAIL: f64 = 1e-13;

/// Joint density of `x_theta` on mode `a` and `x_phi` on mode `b`.
pub fn joint_quadrature_density(state: &FockState2, theta: f64, phi: f64, grid: QuadratureGrid) -> JointDensity {
    JointDensity::from_spectrum(&spectrum(state, SPECTRAL_TAIL), theta, phi, grid)
}

pub fn sample_quadratures(state: &FockState2, theta: f64, phi: f64, n: usize, seed: u64) -> Vec<(f64, f64)> {
    joint_quadrature_density(state, theta, phi, QuadratureGrid::default()).sample(n, seed)
}

/// Sign-binned correlation from samples, with homodyne efficiency `eta_h`
/// modelled as Gaussian noise of variance `(1 - eta_h) / (2 eta_h)` added
/// to each rescaled outcome.
pub fn sign_correlation(samples: &[(f64, f64)], eta_h: f64, seed: u64) -> f64 {
    let sd = ((1.0 - eta_h) / (2.0 * eta_h)).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let noise = Normal::new(0.0, sd).expect("finite noise width");
    let mut acc = 0i64;
    for &(x, y) in samples {
        let (x, y) = if sd > 0.0 { (x + noise.sample(&mut rng), y + noise.sample(&mut rng)) } else { (x, y) };
        acc += (x.signum() * y.signum()) as i64;
    }
    acc as f64 / samples.len() as f64
}

pub fn homodyne_correlation_mc(
    state: &FockState2,
    theta: f64,
    phi: f64,
    eta_h: f64,
    n: usize,
    seed: u64,
) -> f64 {
    sign_correlation(&sample_quadratures(state, theta, phi, n, seed), eta_h, seed)
}
