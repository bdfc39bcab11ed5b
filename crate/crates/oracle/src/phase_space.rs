//! Second reference route, for noisy inputs the Fock construction cannot
//! reach: covariance matrices in real quadratures `(x1, p1, x2, p2)` with
//! vacuum variance 1/2.
//!
//! After the subtraction beam splitters, a no-click outcome `q^n` on a
//! detector mode is a Gaussian measurement (a Schur complement on the
//! covariance matrix). The double-click branch follows by
//! inclusion-exclusion over "no click on c", "no click on d", both, and
//! neither, so the conditional state is a signed sum of four Gaussians.
//!
//! Near `T = 1` the four terms cancel to `~(1 - T)^2`, so all of this runs
//! in double-double on small dense matrices.

use num_complex::Complex64;
use twinbeam::dd::Dd;

type Mat = Vec<Vec<Dd>>;

fn zeros(n: usize, m: usize) -> Mat {
    vec![vec![Dd::ZERO; m]; n]
}

/// Solves `a x = b` by Gaussian elimination with partial pivoting; returns
/// `(det a, x)`.
fn solve(a: &Mat, b: &Mat) -> (Dd, Mat) {
    let n = a.len();
    let m = b[0].len();
    let mut a = a.clone();
    let mut x = b.clone();
    let mut det = Dd::ONE;
    for col in 0..n {
        let piv = (col..n).max_by(|&i, &j| a[i][col].abs().partial_cmp(&a[j][col].abs()).unwrap()).unwrap();
        if piv != col {
            a.swap(piv, col);
            x.swap(piv, col);
            det = -det;
        }
        let p = a[col][col];
        det *= p;
        for row in (col + 1)..n {
            let f = a[row][col] / p;
            for k in col..n {
                let v = a[col][k];
                a[row][k] -= f * v;
            }
            for k in 0..m {
                let v = x[col][k];
                x[row][k] -= f * v;
            }
        }
    }
    for col in (0..n).rev() {
        for k in 0..m {
            let mut acc = x[col][k];
            for j in (col + 1)..n {
                acc -= a[col][j] * x[j][k];
            }
            x[col][k] = acc / a[col][col];
        }
    }
    (det, x)
}

/// `exp(-mu^T s^-1 mu / 2) / sqrt(det s)` for symmetric positive `s`.
fn gaussian_at(s: &Mat, mu: &[Dd]) -> Dd {
    let b: Mat = mu.iter().map(|&v| vec![v]).collect();
    let (det, x) = solve(s, &b);
    let q: Dd = mu.iter().zip(&x).map(|(&m, row)| m * row[0]).sum();
    (-(q * 0.5)).exp() / det.sqrt()
}

fn sub_block(s: &Mat, idx: &[usize]) -> Mat {
    idx.iter().map(|&i| idx.iter().map(|&j| s[i][j]).collect()).collect()
}

fn plus_diag(mut s: Mat, v: Dd) -> Mat {
    for (i, row) in s.iter_mut().enumerate() {
        row[i] += v;
    }
    s
}

/// Unnormalized signed Gaussian sum: `(weight, covariance)` pairs.
#[derive(Clone, Debug)]
pub struct PhaseSpaceState {
    terms: Vec<(Dd, Mat)>,
}

/// Twin beam after a loss/thermal channel, from the first and second
/// moments `<a^dag a>` and `<ab>` of the channel master equation.
pub fn noisy_twb_covariance(r: f64, gamma_t: f64, nth: f64) -> Vec<Vec<f64>> {
    to_f64(&noisy_twb_covariance_dd(r, gamma_t, nth))
}

fn noisy_twb_covariance_dd(r: f64, gamma_t: f64, nth: f64) -> Mat {
    let e = Dd::new(-gamma_t).exp();
    let r = Dd::new(r);
    let n = r.sinh().sqr() * e + (Dd::ONE - e) * nth;
    let c = (r * 2.0).sinh() * e * 0.5;
    let v = n + 0.5;
    let z = Dd::ZERO;
    vec![vec![v, z, c, z], vec![z, v, z, -c], vec![c, z, v, z], vec![z, -c, z, v]]
}

fn to_f64(m: &Mat) -> Vec<Vec<f64>> {
    m.iter().map(|row| row.iter().map(|v| v.to_f64()).collect()).collect()
}

/// Variance per quadrature of the Gaussian operator `q^n` (as a state,
/// up to the factor `1 / (1 - q)`).
fn no_click_variance(q: Dd) -> Dd {
    (Dd::ONE + q) / ((Dd::ONE - q) * 2.0)
}

/// Noisy twin beam followed by the double-click branch of subtraction with
/// transmissivity `t` and on/off efficiency `eps` on both modes.
pub fn subtracted_noisy_twb(r: f64, gamma_t: f64, nth: f64, t: f64, eps: f64) -> PhaseSpaceState {
    subtract(&noisy_twb_covariance_dd(r, gamma_t, nth), t, eps)
}

fn subtract(cov: &Mat, t: f64, eps: f64) -> PhaseSpaceState {
    let mut v = zeros(8, 8);
    for i in 0..4 {
        for j in 0..4 {
            v[i][j] = cov[i][j];
        }
        v[4 + i][4 + i] = Dd::new(0.5);
    }
    // a' = sqrt t a + sqrt(1-t) c, c' = -sqrt(1-t) a + sqrt t c (same for b, d)
    let (st, sr) = (Dd::new(t).sqrt(), (Dd::ONE - t).sqrt());
    let mut m = zeros(8, 8);
    for (i, j) in [(0, 4), (1, 5), (2, 6), (3, 7)] {
        m[i][i] = st;
        m[i][j] = sr;
        m[j][i] = -sr;
        m[j][j] = st;
    }
    let mv: Mat = (0..8).map(|i| (0..8).map(|k| (0..8).map(|l| m[i][l] * v[l][k]).sum()).collect()).collect();
    let v: Mat = (0..8).map(|i| (0..8).map(|j| (0..8).map(|k| mv[i][k] * m[j][k]).sum()).collect()).collect();

    let q = Dd::ONE - eps;
    let vq = no_click_variance(q);
    let keep = [0, 1, 2, 3];
    let a = sub_block(&v, &keep);
    let mut terms = Vec::with_capacity(4);
    for (meas, sign) in [(vec![], 1.0), (vec![4, 5], -1.0), (vec![6, 7], -1.0), (vec![4, 5, 6, 7], 1.0)] {
        if meas.is_empty() {
            terms.push((Dd::new(sign), a.clone()));
            continue;
        }
        let b = plus_diag(sub_block(&v, &meas), vq);
        let ct: Mat = meas.iter().map(|&i| keep.iter().map(|&j| v[i][j]).collect()).collect();
        let (det, x) = solve(&b, &ct);
        let mut sigma = a.clone();
        for i in 0..4 {
            for j in 0..4 {
                let s: Dd = (0..meas.len()).map(|k| ct[k][i] * x[k][j]).sum();
                sigma[i][j] -= s;
            }
        }
        let p = ((Dd::ONE - q).powi((meas.len() / 2) as u32) * det.sqrt()).recip();
        terms.push((p * sign, sigma));
    }
    PhaseSpaceState { terms }
}

fn quadratures(z: &[Complex64]) -> Vec<Dd> {
    let s = Dd::new(2.0).sqrt();
    z.iter().flat_map(|z| [s * z.re, s * z.im]).collect()
}

impl PhaseSpaceState {
    /// A single Gaussian state.
    pub fn from_covariance(r: f64, gamma_t: f64, nth: f64) -> Self {
        PhaseSpaceState { terms: vec![(Dd::ONE, noisy_twb_covariance_dd(r, gamma_t, nth))] }
    }

    pub fn norm(&self) -> f64 {
        self.norm_dd().to_f64()
    }

    fn norm_dd(&self) -> Dd {
        self.terms.iter().map(|t| t.0).sum()
    }

    fn average(&self, f: impl Fn(&Mat) -> Dd) -> f64 {
        (self.terms.iter().map(|(w, s)| *w * f(s)).sum::<Dd>() / self.norm_dd()).to_f64()
    }

    /// `<D(a) D(b) (-1)^n D(b)^dag D(a)^dag>`.
    pub fn displaced_parity(&self, a: Complex64, b: Complex64) -> f64 {
        let mu = quadratures(&[a, b]);
        self.average(|s| gaussian_at(s, &mu) * 0.25)
    }

    /// Both detectors silent: efficiency `eta`, mean dark count `dark`,
    /// displacements `a` and `b` applied first.
    pub fn no_click_both(&self, a: Complex64, b: Complex64, eta: f64, dark: f64) -> f64 {
        let one_d = Dd::ONE + dark;
        let q = Dd::ONE - Dd::new(eta) / one_d;
        let vq = no_click_variance(q);
        let mu = quadratures(&[a, b]);
        let pre = (one_d * (Dd::ONE - q)).sqr().recip();
        self.average(|s| pre * gaussian_at(&plus_diag(s.clone(), vq), &mu))
    }

    /// Detector on the first mode silent, second mode ignored.
    pub fn no_click_a(&self, a: Complex64, eta: f64, dark: f64) -> f64 {
        let one_d = Dd::ONE + dark;
        let q = Dd::ONE - Dd::new(eta) / one_d;
        let vq = no_click_variance(q);
        let mu = quadratures(&[a]);
        let pre = (one_d * (Dd::ONE - q)).recip();
        self.average(|s| pre * gaussian_at(&plus_diag(sub_block(s, &[0, 1]), vq), &mu))
    }

    /// Total mean photon number.
    pub fn energy(&self) -> f64 {
        self.average(|s| (s[0][0] + s[1][1] + s[2][2] + s[3][3] - 2.0) * 0.5)
    }

    /// Coherent-state teleportation fidelity, `E[exp(-(x_c^2 + p_d^2))]`
    /// with `x_c = (x_b - x_a) / sqrt 2` and `p_d = (p_a + p_b) / sqrt 2`.
    pub fn fidelity(&self) -> f64 {
        self.average(|s| {
            // 2 Var and 2 Cov of (x_c, p_d), plus the identity
            let k00 = s[0][0] + s[2][2] - s[0][2] * 2.0;
            let k11 = s[1][1] + s[3][3] + s[1][3] * 2.0;
            let k01 = s[2][1] + s[2][3] - s[0][1] - s[0][3];
            ((k00 + 1.0) * (k11 + 1.0) - k01.sqr()).sqrt().recip()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_no_click_probability() {
        // a Gaussian with r = 0 and full loss is the two-mode thermal state
        let n = 0.7;
        let s = PhaseSpaceState::from_covariance(0.0, 50.0, n);
        let z = Complex64::new(0.0, 0.0);
        let eta = 0.6;
        let want = 1.0 / (1.0 + n * eta);
        assert!((s.no_click_a(z, eta, 0.0) - want).abs() < 1e-14);
        assert!((s.no_click_both(z, z, eta, 0.0) - want * want).abs() < 1e-14);
    }

    #[test]
    fn twin_beam_fidelity_and_parity() {
        let r: f64 = 0.8;
        let s = PhaseSpaceState::from_covariance(r, 0.0, 0.0);
        assert!((s.fidelity() - (1.0 + r.tanh()) / 2.0).abs() < 1e-14);
        let z = Complex64::new(0.0, 0.0);
        assert!((s.displaced_parity(z, z) - 1.0).abs() < 1e-14);
        assert!((s.energy() - 2.0 * r.sinh().powi(2)).abs() < 1e-13);
    }
}
