//! Dense complex Hermitian matrices sized for state spaces of a few levels.
//!
//! The eigensolver is a cyclic complex Jacobi iteration. For the dimensions
//! this crate targets (n <= 16) it converges to near machine precision in a
//! handful of sweeps, comfortably inside the 1e-10 accuracy the feasibility
//! tests rely on.

use num_complex::Complex64;

use crate::error::{Error, Result};

const HERMITICITY_TOL: f64 = 1e-12;

/// An `n x n` complex Hermitian matrix, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct Hermitian {
    dim: usize,
    data: Vec<Complex64>,
}

impl Hermitian {
    /// Builds from row-major complex entries, checking Hermiticity to 1e-12.
    pub fn from_entries(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                got: entries.len(),
            });
        }
        let mut residual: f64 = 0.0;
        for i in 0..dim {
            for j in i..dim {
                let delta = (entries[i * dim + j] - entries[j * dim + i].conj()).norm();
                residual = residual.max(delta);
            }
        }
        if residual > HERMITICITY_TOL {
            return Err(Error::NotHermitian { residual });
        }
        let mut m = Self { dim, data: entries };
        // Symmetrize away the sub-tolerance asymmetry so later arithmetic is exact.
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(m.data[i * dim + i].re, 0.0);
            for j in (i + 1)..dim {
                let avg = (m.data[i * dim + j] + m.data[j * dim + i].conj()) * 0.5;
                m.data[i * dim + j] = avg;
                m.data[j * dim + i] = avg.conj();
            }
        }
        Ok(m)
    }

    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_diagonal(diag: &[f64]) -> Self {
        let dim = diag.len();
        let mut m = Self::zeros(dim);
        for (i, &d) in diag.iter().enumerate() {
            m.data[i * dim + i] = Complex64::new(d, 0.0);
        }
        m
    }

    /// Maximally mixed state `I / n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let mut m = Self::identity(dim);
        m.scale_mut(1.0 / dim as f64);
        m
    }

    /// Rank-1 projector `v v^H / <v, v>`.
    pub fn projector(v: &[Complex64]) -> Result<Self> {
        let dim = v.len();
        let norm_sq: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if norm_sq <= 0.0 {
            return Err(Error::InvalidParameter(
                "cannot project onto the zero vector".into(),
            ));
        }
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = v[i] * v[j].conj() / norm_sq;
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Largest deviation from Hermitian symmetry across entries. Zero for
    /// matrices built through the validating constructors; entries written
    /// with [`Hermitian::set`] are the caller's responsibility and can be
    /// re-checked here.
    pub fn hermiticity_residual(&self) -> f64 {
        let mut residual: f64 = 0.0;
        for i in 0..self.dim {
            residual = residual.max(self.data[i * self.dim + i].im.abs());
            for j in (i + 1)..self.dim {
                residual = residual
                    .max((self.data[i * self.dim + j] - self.data[j * self.dim + i].conj()).norm());
            }
        }
        residual
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.data[i * self.dim + j] = value;
    }

    /// Trace; real by Hermiticity.
    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn scale_mut(&mut self, factor: f64) {
        for z in &mut self.data {
            *z *= factor;
        }
    }

    pub fn scaled(&self, factor: f64) -> Self {
        let mut m = self.clone();
        m.scale_mut(factor);
        m
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_dim(other)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a - b)
            .collect();
        Ok(Self {
            dim: self.dim,
            data,
        })
    }

    /// Adds `factor * other` in place.
    pub fn axpy_mut(&mut self, factor: f64, other: &Self) -> Result<()> {
        self.check_dim(other)?;
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += factor * b;
        }
        Ok(())
    }

    /// `Tr(self * other)`; real for a Hermitian pair.
    pub fn trace_product(&self, other: &Self) -> Result<f64> {
        self.check_dim(other)?;
        let n = self.dim;
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..n {
            for k in 0..n {
                acc += self.data[i * n + k] * other.data[k * n + i];
            }
        }
        Ok(acc.re)
    }

    /// Distance in Frobenius norm.
    pub fn distance(&self, other: &Self) -> Result<f64> {
        Ok(self.sub(other)?.frobenius_norm())
    }

    fn check_dim(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(())
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues()[0]
    }

    /// Full spectral decomposition: ascending eigenvalues plus the matching
    /// orthonormal eigenvectors (column `k` of the returned matrix pairs with
    /// eigenvalue `k`).
    pub fn eigen(&self) -> (Vec<f64>, Vec<Vec<Complex64>>) {
        let n = self.dim;
        if n == 0 {
            return (Vec::new(), Vec::new());
        }
        if n == 1 {
            return (vec![self.data[0].re], vec![vec![Complex64::new(1.0, 0.0)]]);
        }

        let mut a = self.data.clone();
        // v holds the accumulated unitary, row-major; columns are eigenvectors.
        let mut v = vec![Complex64::new(0.0, 0.0); n * n];
        for i in 0..n {
            v[i * n + i] = Complex64::new(1.0, 0.0);
        }

        let scale = self.frobenius_norm().max(1.0);
        let target = 1e-15 * scale;
        let max_sweeps = 60;

        for _ in 0..max_sweeps {
            let mut off: f64 = 0.0;
            for p in 0..n {
                for q in (p + 1)..n {
                    off += a[p * n + q].norm_sqr();
                }
            }
            if off.sqrt() <= target {
                break;
            }

            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[p * n + q];
                    let r = apq.norm();
                    if r <= 1e-300 {
                        continue;
                    }
                    let phase = apq / r;
                    let alpha = a[p * n + p].re;
                    let gamma = a[q * n + q].re;

                    let tau = (gamma - alpha) / (2.0 * r);
                    let t = if tau >= 0.0 {
                        1.0 / (tau + (1.0 + tau * tau).sqrt())
                    } else {
                        -1.0 / (-tau + (1.0 + tau * tau).sqrt())
                    };
                    let c = 1.0 / (1.0 + t * t).sqrt();
                    let s = t * c;

                    // Unitary: column p <- c*col_p - s*conj(phase)*col_q,
                    //          column q <- s*phase*col_p + c*col_q  (applied as A <- U^H A U).
                    for i in 0..n {
                        let aip = a[i * n + p];
                        let aiq = a[i * n + q];
                        a[i * n + p] = c * aip - s * phase.conj() * aiq;
                        a[i * n + q] = s * phase * aip + c * aiq;
                    }
                    for j in 0..n {
                        let apj = a[p * n + j];
                        let aqj = a[q * n + j];
                        a[p * n + j] = c * apj - s * phase * aqj;
                        a[q * n + j] = s * phase.conj() * apj + c * aqj;
                    }
                    for i in 0..n {
                        let vip = v[i * n + p];
                        let viq = v[i * n + q];
                        v[i * n + p] = c * vip - s * phase.conj() * viq;
                        v[i * n + q] = s * phase * vip + c * viq;
                    }

                    a[p * n + q] = Complex64::new(0.0, 0.0);
                    a[q * n + p] = Complex64::new(0.0, 0.0);
                    a[p * n + p] = Complex64::new(a[p * n + p].re, 0.0);
                    a[q * n + q] = Complex64::new(a[q * n + q].re, 0.0);
                }
            }
        }

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[i * n + i].re.total_cmp(&a[j * n + j].re));

        let values: Vec<f64> = order.iter().map(|&k| a[k * n + k].re).collect();
        let vectors: Vec<Vec<Complex64>> = order
            .iter()
            .map(|&k| (0..n).map(|i| v[i * n + k]).collect())
            .collect();
        (values, vectors)
    }
}
