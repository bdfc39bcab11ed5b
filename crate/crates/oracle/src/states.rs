//! State preparation in a truncated Fock space.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use twinbeam::{FockState2, IpsParams, TwbParams};

use crate::special::binomial;
use crate::{OracleConfig, OracleError, Result};

/// Smallest even cutoff with `x^(2n) < 1e-14`, at least 16.
fn even_cutoff_for(x: f64) -> usize {
    if x <= 0.0 {
        return 16;
    }
    let n = (14.0 / (-2.0 * x.log10())).floor() as usize + 1;
    let n = n + (n % 2);
    n.max(16)
}

/// Cutoff for the subtracted twin beam: the heuristic on `lambda T`,
/// raised if needed so the input twin beam itself is converged.
pub fn recommended_cutoff(twb: &TwbParams, ips: &IpsParams) -> usize {
    let lam = twb.lambda();
    even_cutoff_for(lam * ips.t()).max(even_cutoff_for(lam))
}

pub(crate) fn check_budget(cutoff: usize, cfg: &OracleConfig) -> Result<()> {
    let d = (cutoff + 1) * (cutoff + 1);
    let bytes = d.saturating_mul(d).saturating_mul(std::mem::size_of::<Complex64>());
    if bytes > cfg.memory_budget {
        return Err(OracleError::Budget { cutoff, bytes, budget: cfg.memory_budget });
    }
    Ok(())
}

/// `sqrt(1 - lambda^2) sum_n lambda^n |n, n>`, truncated.
pub fn build_twb(twb: &TwbParams, cutoff: usize, cfg: &OracleConfig) -> Result<FockState2> {
    let lam = twb.lambda();
    let mut c = cutoff;
    if lam > 0.0 && lam.powi(2 * c as i32) >= 1e-14 {
        let needed = even_cutoff_for(lam);
        log::warn!("cutoff {cutoff} leaves a twin-beam tail >= 1e-14; raising to {needed}");
        c = needed;
    }
    check_budget(c, cfg)?;
    let mut rho = FockState2::zeros(c);
    let amp: Vec<f64> = (0..=c).map(|n| (1.0 - lam * lam).sqrt() * lam.powi(n as i32)).collect();
    for n in 0..=c {
        for m in 0..=c {
            rho.add_to(n, n, m, m, Complex64::new(amp[n] * amp[m], 0.0));
        }
    }
    Ok(rho)
}

/// `<n - h| K_h |n>` for a beam splitter of amplitude transmissivity
/// `sqrt T` with `h` photons reflected into an ancilla prepared in vacuum.
fn branch_amplitudes(cutoff: usize, t: f64) -> DMatrix<f64> {
    let (st, sr) = (t.sqrt(), (1.0 - t).sqrt());
    DMatrix::from_fn(cutoff + 1, cutoff + 1, |n, h| {
        if h > n {
            0.0
        } else {
            binomial(n, h).sqrt() * st.powi((n - h) as i32) * sr.powi(h as i32)
        }
    })
}

fn click_weights(cutoff: usize, eps: f64) -> Vec<f64> {
    (0..=cutoff).map(|h| 1.0 - (1.0 - eps).powi(h as i32)).collect()
}

/// Conditions both modes on a click; returns the normalized state and the
/// joint click probability.
pub fn apply_ips(state: &FockState2, ips: &IpsParams) -> (FockState2, f64) {
    let c = state.cutoff();
    let k = branch_amplitudes(c, ips.t());
    let w = click_weights(c, ips.eps());
    let mut out = FockState2::zeros(c);
    let m = state.matrix();
    let zero = Complex64::new(0.0, 0.0);
    for na in 0..=c {
        for nb in 0..=c {
            let i = state.index(na, nb);
            for ma in 0..=c {
                for mb in 0..=c {
                    let v = m[(i, state.index(ma, mb))];
                    if v == zero {
                        continue;
                    }
                    for ha in 1..=na.min(ma) {
                        let fa = w[ha] * k[(na, ha)] * k[(ma, ha)];
                        for hb in 1..=nb.min(mb) {
                            let f = fa * w[hb] * k[(nb, hb)] * k[(mb, hb)];
                            out.add_to(na - ha, nb - hb, ma - ha, mb - hb, v * f);
                        }
                    }
                }
            }
        }
    }
    let p = out.trace();
    if p > 0.0 {
        out.scale(1.0 / p);
    }
    (out, p)
}

/// Single-mode density matrix on `{|n> : n <= cutoff}`.
#[derive(Clone, Debug)]
pub struct FockState1 {
    pub rho: DMatrix<Complex64>,
}

impl FockState1 {
    pub fn pure(psi: &DVector<Complex64>) -> Self {
        FockState1 { rho: psi * psi.adjoint() }
    }

    pub fn cutoff(&self) -> usize {
        self.rho.nrows() - 1
    }

    pub fn trace(&self) -> f64 {
        self.rho.diagonal().iter().map(|z| z.re).sum()
    }

    pub fn energy(&self) -> f64 {
        self.rho.diagonal().iter().enumerate().map(|(n, z)| n as f64 * z.re).sum::<f64>() / self.trace()
    }

    /// `<psi| rho |psi>` for a normalized vector of the same dimension.
    pub fn overlap(&self, psi: &DVector<Complex64>) -> f64 {
        (psi.adjoint() * &self.rho * psi)[(0, 0)].re / self.trace()
    }

    /// `W(z) = (2 / pi) Tr[rho D(2z) (-1)^n]`.
    pub fn wigner(&self, z: Complex64) -> f64 {
        let c = self.cutoff() + 1;
        let d = crate::special::displacement_matrix(2.0 * z, c, c);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..c {
            for n in 0..c {
                let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
                acc += self.rho[(n, m)] * d[(m, n)] * sign;
            }
        }
        2.0 / std::f64::consts::PI * acc.re / self.trace()
    }
}

/// Squeezed vacuum whose `x` quadrature is the noisy one, matching the
/// closed-form convention.
pub fn squeezed_vacuum(r: f64, cutoff: usize) -> DVector<Complex64> {
    let (lam, norm) = (r.tanh(), 1.0 / r.cosh().sqrt());
    let mut psi = DVector::zeros(cutoff + 1);
    // amplitude of |2n>: lambda^n sqrt((2n)!) / (2^n n!)
    let mut a = norm;
    for n in 0..=cutoff / 2 {
        psi[2 * n] = Complex64::new(a, 0.0);
        let nf = n as f64;
        a *= lam * ((2.0 * nf + 1.0) * (2.0 * nf + 2.0)).sqrt() / (2.0 * (nf + 1.0));
    }
    psi
}

/// `a |psi>` on the truncated space.
pub fn annihilate(psi: &DVector<Complex64>) -> DVector<Complex64> {
    let c = psi.len();
    DVector::from_fn(c, |n, _| if n + 1 < c { psi[n + 1] * ((n + 1) as f64).sqrt() } else { Complex64::new(0.0, 0.0) })
}

pub fn apply_ips_single(state: &FockState1, ips: &IpsParams) -> (FockState1, f64) {
    let c = state.cutoff();
    let k = branch_amplitudes(c, ips.t());
    let w = click_weights(c, ips.eps());
    let mut out = DMatrix::zeros(c + 1, c + 1);
    for n in 0..=c {
        for m in 0..=c {
            let v = state.rho[(n, m)];
            for h in 1..=n.min(m) {
                out[(n - h, m - h)] += v * (w[h] * k[(n, h)] * k[(m, h)]);
            }
        }
    }
    let p: f64 = out.diagonal().iter().map(|z: &Complex64| z.re).sum();
    if p > 0.0 {
        out /= Complex64::new(p, 0.0);
    }
    (FockState1 { rho: out }, p)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cutoff_heuristic() {
        assert_eq!(even_cutoff_for(0.0), 16);
        let n = even_cutoff_for(0.5);
        assert!(0.5f64.powi(2 * n as i32) < 1e-14);
        assert!(0.5f64.powi(2 * (n as i32 - 2)) >= 1e-14);
        assert_eq!(n % 2, 0);
    }

    #[test]
    fn twb_is_normalized_and_raised() {
        let twb = TwbParams::new(0.9).unwrap();
        let rho = build_twb(&twb, 4, &OracleConfig::default()).unwrap();
        assert!(rho.cutoff() > 4);
        assert!((rho.trace() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn budget_is_enforced() {
        let cfg = OracleConfig { memory_budget: 1 << 20, ..OracleConfig::default() };
        let twb = TwbParams::new(0.3).unwrap();
        assert!(matches!(build_twb(&twb, 40, &cfg), Err(OracleError::Budget { .. })));
    }

    #[test]
    fn squeezed_vacuum_has_noisy_x() {
        let r = 0.4;
        let psi = squeezed_vacuum(r, 80);
        let a = annihilate(&psi);
        let aa = annihilate(&a);
        let n: f64 = a.iter().map(|z| z.norm_sqr()).sum();
        let a2: Complex64 = psi.iter().zip(aa.iter()).map(|(p, q)| p.conj() * q).sum();
        // <x^2> = (2<n> + 1 + 2 Re<a^2>) / 2 should equal e^{2r} / 2
        let x2 = (2.0 * n + 1.0 + 2.0 * a2.re) / 2.0;
        assert!((x2 - (2.0 * r).exp() / 2.0).abs() < 1e-12);
    }
}
