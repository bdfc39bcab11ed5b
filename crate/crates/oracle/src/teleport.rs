//! Teleportation fidelity for a coherent input, computed from the Bell
//! measurement statistics of the shared resource.
//!
//! With a 50:50 mixer `c = (b - a) / sqrt 2`, `d = (a + b) / sqrt 2`, the
//! fidelity for any coherent input equals `E[exp(-(x_c^2 + p_d^2))]` under the
//! joint distribution of `x_c` and `p_d`.

use nalgebra::DMatrix;
use num_complex::Complex64;
use twinbeam::FockState2;

use crate::quadrature::{spectrum, JointDensity, QuadratureGrid, Spectrum, SPECTRAL_TAIL};
use crate::special::{binomial, ln_factorials};

/// Rewrites each eigenvector in the `(c, d)` modes. With
/// `a^dag = (d^dag - c^dag) / sqrt 2` and `b^dag = (c^dag + d^dag) / sqrt 2`,
/// `|n_a, n_b>` spreads over `|j, k>` with `j + k = n_a + n_b`.
pub fn mix(spec: &Spectrum) -> Spectrum {
    let Some(first) = spec.vectors.first() else {
        return spec.clone();
    };
    let c = first.nrows() - 1;
    let top = 2 * c;
    let lf = ln_factorials(top);
    let vectors = spec
        .vectors
        .iter()
        .map(|e| {
            let mut out = DMatrix::<Complex64>::zeros(top + 1, top + 1);
            for na in 0..=c {
                for nb in 0..=c {
                    let v = e[(na, nb)];
                    if v == Complex64::new(0.0, 0.0) {
                        continue;
                    }
                    let t = na + nb;
                    let base = -0.5 * (lf[na] + lf[nb] + t as f64 * std::f64::consts::LN_2);
                    for i in 0..=na {
                        for l in 0..=nb {
                            let (j, k) = (i + l, t - i - l);
                            let mag = binomial(na, i) * binomial(nb, l) * (base + 0.5 * (lf[j] + lf[k])).exp();
                            let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
                            out[(j, k)] += v * (sign * mag);
                        }
                    }
                }
            }
            out
        })
        .collect();
    Spectrum { weights: spec.weights.clone(), vectors, min_eigenvalue: spec.min_eigenvalue }
}

/// Joint density of `x_c` and `p_d`.
pub fn bell_density(state: &FockState2, grid: QuadratureGrid) -> JointDensity {
    let spec = mix(&spectrum(state, SPECTRAL_TAIL));
    JointDensity::from_spectrum(&spec, 0.0, std::f64::consts::FRAC_PI_2, grid)
}

/// Fidelity integrand over the Bell outcomes `(x_c, p_d)`.
pub fn kernel(x: f64, p: f64) -> f64 {
    (-(x * x + p * p)).exp()
}

/// Deterministic midpoint quadrature of the fidelity.
pub fn fidelity_quadrature(state: &FockState2, grid: QuadratureGrid) -> f64 {
    bell_density(state, grid).expectation(kernel)
}

/// Fidelity estimated from `n` simulated Bell-measurement outcomes.
pub fn fidelity_monte_carlo(state: &FockState2, n: usize, seed: u64) -> f64 {
    fidelity_from_density(&bell_density(state, QuadratureGrid::default()), n, seed)
}

pub fn fidelity_from_density(density: &JointDensity, n: usize, seed: u64) -> f64 {
    density.sample(n, seed).iter().map(|&(x, p)| kernel(x, p)).sum::<f64>() / n as f64
}
