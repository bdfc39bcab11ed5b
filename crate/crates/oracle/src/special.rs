//! Fock-basis matrix elements.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub(crate) fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

pub(crate) fn binomial(n: usize, k: usize) -> f64 {
    let k = k.min(n - k);
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `<m| D(alpha) |n>` for `m < rows`, `n < cols`, via associated Laguerre
/// polynomials.
pub fn displacement_matrix(alpha: Complex64, rows: usize, cols: usize) -> DMatrix<Complex64> {
    let mut d = DMatrix::zeros(rows, cols);
    let x = alpha.norm_sqr();
    if x == 0.0 {
        for i in 0..rows.min(cols) {
            d[(i, i)] = Complex64::new(1.0, 0.0);
        }
        return d;
    }
    let lf = ln_factorials(rows.max(cols));
    let r = alpha.norm();
    let phase = alpha / r;
    let damp = -0.5 * x;
    for m in 0..rows {
        for n in 0..cols {
            let (lo, hi) = if m >= n { (n, m) } else { (m, n) };
            let k = hi - lo;
            let lag = laguerre(lo, k as f64, x);
            let mag = (0.5 * (lf[lo] - lf[hi]) + k as f64 * r.ln() + damp).exp() * lag;
            let ph = if m >= n { phase.powu(k as u32) } else { (-phase.conj()).powu(k as u32) };
            d[(m, n)] = ph * mag;
        }
    }
    d
}

fn laguerre(n: usize, k: f64, x: f64) -> f64 {
    if n == 0 {
        return 1.0;
    }
    let mut prev = 1.0;
    let mut cur = 1.0 + k - x;
    for j in 1..n {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0 + k - x) * cur - (jf + k) * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    cur
}

/// Harmonic-oscillator eigenfunctions `psi_0..psi_n` at `x` for the
/// quadrature `(a + a^dag) / sqrt 2`.
pub fn hermite_functions(n: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let p0 = std::f64::consts::PI.powf(-0.25) * (-0.5 * x * x).exp();
    out.push(p0);
    if n == 0 {
        return out;
    }
    out.push(std::f64::consts::SQRT_2 * x * p0);
    for k in 1..n {
        let kf = k as f64;
        let next = (2.0 / (kf + 1.0)).sqrt() * x * out[k] - (kf / (kf + 1.0)).sqrt() * out[k - 1];
        out.push(next);
    }
    out
}
