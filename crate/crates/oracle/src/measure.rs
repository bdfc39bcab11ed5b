//! Expectation values of local operators on truncated two-mode states.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::Serialize;
use twinbeam::FockState2;

use crate::special::displacement_matrix;

/// `Tr[rho (A (x) B)]` for single-mode operators given on the cutoff block.
pub fn expect_product(state: &FockState2, a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let c = state.cutoff();
    let rho = state.matrix();
    let mut acc = Complex64::new(0.0, 0.0);
    for na in 0..=c {
        for nb in 0..=c {
            let i = state.index(na, nb);
            for ma in 0..=c {
                let am = a[(ma, na)];
                if am == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for mb in 0..=c {
                    acc += rho[(i, state.index(ma, mb))] * am * b[(mb, nb)];
                }
            }
        }
    }
    acc
}

fn warn_if_far(state: &FockState2, z: Complex64) {
    if z.norm_sqr() > state.cutoff() as f64 / 4.0 {
        log::warn!("displacement |{z}|^2 is large for cutoff {}", state.cutoff());
    }
}

/// Displaced parity `D(z) (-1)^n D(z)^dag = D(2z) (-1)^n` on the cutoff block.
pub fn parity_operator(z: Complex64, cutoff: usize) -> DMatrix<Complex64> {
    let mut d = displacement_matrix(2.0 * z, cutoff + 1, cutoff + 1);
    for n in (1..=cutoff).step_by(2) {
        d.column_mut(n).neg_mut();
    }
    d
}

pub fn expect_parity_displaced(state: &FockState2, alpha: Complex64, beta: Complex64) -> f64 {
    warn_if_far(state, alpha);
    warn_if_far(state, beta);
    let c = state.cutoff();
    let v = expect_product(state, &parity_operator(alpha, c), &parity_operator(beta, c));
    v.re / state.trace()
}

/// Two-mode Wigner function from the displaced parity.
pub fn wigner(state: &FockState2, alpha: Complex64, beta: Complex64) -> f64 {
    4.0 / std::f64::consts::PI.powi(2) * expect_parity_displaced(state, alpha, beta)
}

/// No-click element of an on/off detector of efficiency `eta` with mean
/// dark count `dark`, after displacing by `z`:
/// `(1 + D)^-1 D(z) (1 - eta / (1 + D))^n D(z)^dag`.
pub fn no_click_operator(z: Complex64, eta: f64, dark: f64, cutoff: usize) -> DMatrix<Complex64> {
    let eta_eff = eta / (1.0 + dark);
    let keep = 1.0 - eta_eff;
    // intermediate photon numbers beyond the cutoff still contribute; the
    // neglected tail is below keep^K / (1 - keep) <= 1e-17
    let kmax = if keep <= 0.0 {
        0
    } else {
        cutoff + ((1e-17 * (1.0 - keep)).ln() / keep.ln()).ceil() as usize
    };
    let d = displacement_matrix(z, cutoff + 1, kmax + 1);
    let mut out = DMatrix::zeros(cutoff + 1, cutoff + 1);
    for k in 0..=kmax {
        let w = if k == 0 { 1.0 } else { keep.powi(k as i32) };
        if w == 0.0 {
            continue;
        }
        let col = d.column(k);
        for m in 0..=cutoff {
            for n in 0..=cutoff {
                out[(m, n)] += col[m] * col[n].conj() * w;
            }
        }
    }
    out / Complex64::new(1.0 + dark, 0.0)
}

/// Joint and marginal no-click probabilities.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct OnOffTable {
    /// neither clicks
    pub p_none: f64,
    /// `a` silent, any outcome on `b`
    pub p_a_silent: f64,
    /// `b` silent, any outcome on `a`
    pub p_b_silent: f64,
}

impl OnOffTable {
    pub fn p_both_click(&self) -> f64 {
        1.0 - self.p_a_silent - self.p_b_silent + self.p_none
    }
}

pub fn expect_onoff(state: &FockState2, alpha: Complex64, beta: Complex64, eta: f64, dark: f64) -> OnOffTable {
    warn_if_far(state, alpha);
    warn_if_far(state, beta);
    let c = state.cutoff();
    let qa = no_click_operator(alpha, eta, dark, c);
    let qb = no_click_operator(beta, eta, dark, c);
    let id = DMatrix::identity(c + 1, c + 1);
    let tr = state.trace();
    OnOffTable {
        p_none: expect_product(state, &qa, &qb).re / tr,
        p_a_silent: expect_product(state, &qa, &id).re / tr,
        p_b_silent: expect_product(state, &id, &qb).re / tr,
    }
}

pub fn energy(state: &FockState2) -> f64 {
    let (a, b) = state.mean_photons();
    (a + b) / state.trace()
}
