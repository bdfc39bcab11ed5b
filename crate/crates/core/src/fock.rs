//! Dense truncated Fock-space density matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;

/// Two-mode density matrix on `{|na, nb> : na, nb <= cutoff}`, stored with
/// row index `na * (cutoff + 1) + nb`.
#[derive(Clone, Debug)]
pub struct FockState2 {
    cutoff: usize,
    rho: DMatrix<Complex64>,
}

impl FockState2 {
    pub fn zeros(cutoff: usize) -> Self {
        let d = (cutoff + 1) * (cutoff + 1);
        FockState2 { cutoff, rho: DMatrix::zeros(d, d) }
    }

    pub fn from_matrix(cutoff: usize, rho: DMatrix<Complex64>) -> Self {
        let d = (cutoff + 1) * (cutoff + 1);
        assert_eq!(rho.shape(), (d, d), "matrix does not match cutoff {cutoff}");
        FockState2 { cutoff, rho }
    }

    pub fn cutoff(&self) -> usize {
        self.cutoff
    }

    pub fn dim(&self) -> usize {
        (self.cutoff + 1) * (self.cutoff + 1)
    }

    #[inline]
    pub fn index(&self, na: usize, nb: usize) -> usize {
        na * (self.cutoff + 1) + nb
    }

    pub fn get(&self, na: usize, nb: usize, ma: usize, mb: usize) -> Complex64 {
        self.rho[(self.index(na, nb), self.index(ma, mb))]
    }

    pub fn add_to(&mut self, na: usize, nb: usize, ma: usize, mb: usize, v: Complex64) {
        let (i, j) = (self.index(na, nb), self.index(ma, mb));
        self.rho[(i, j)] += v;
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.rho
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.rho[(i, i)].re).sum()
    }

    pub fn scale(&mut self, s: f64) {
        self.rho *= Complex64::new(s, 0.0);
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.rho - self.rho.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        let herm = (&self.rho + self.rho.adjoint()) * Complex64::new(0.5, 0.0);
        herm.symmetric_eigenvalues().iter().cloned().fold(f64::INFINITY, f64::min)
    }

    /// Mean photon numbers `(<n_a>, <n_b>)`.
    pub fn mean_photons(&self) -> (f64, f64) {
        let mut na_sum = 0.0;
        let mut nb_sum = 0.0;
        for na in 0..=self.cutoff {
            for nb in 0..=self.cutoff {
                let p = self.get(na, nb, na, nb).re;
                na_sum += na as f64 * p;
                nb_sum += nb as f64 * p;
            }
        }
        (na_sum, nb_sum)
    }

    /// Same state in a larger truncation, padded with zeros.
    pub fn embed(&self, cutoff: usize) -> FockState2 {
        assert!(cutoff >= self.cutoff);
        let mut out = FockState2::zeros(cutoff);
        let c = self.cutoff;
        for na in 0..=c {
            for nb in 0..=c {
                let i = self.index(na, nb);
                let oi = out.index(na, nb);
                for ma in 0..=c {
                    for mb in 0..=c {
                        let v = self.rho[(i, self.index(ma, mb))];
                        if v != Complex64::new(0.0, 0.0) {
                            let oj = out.index(ma, mb);
                            out.rho[(oi, oj)] = v;
                        }
                    }
                }
            }
        }
        out
    }

    /// Entrywise l1 distance; bounds the trace distance from above, so it
    /// bounds the change of any observable with operator norm at most one.
    pub fn l1_distance(&self, other: &FockState2) -> f64 {
        let c = self.cutoff.max(other.cutoff);
        let a = if self.cutoff == c { self.clone() } else { self.embed(c) };
        let b = if other.cutoff == c { other.clone() } else { other.embed(c) };
        a.rho.iter().zip(b.rho.iter()).map(|(x, y)| (x - y).norm()).sum()
    }
}
