//! Cholesky factorization and Gaussian sampling from covariance or precision factors.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;
use crate::rng::RngStream;

/// Symmetry and pivot tolerance.
pub const SPD_TOLERANCE: f64 = 1e-12;

/// Lower-triangular `L` with `L·Lᵀ = S` and a strictly positive diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct CholeskyFactor {
    dim: usize,
    lower: Vec<f64>,
}

impl CholeskyFactor {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.lower[i * self.dim + j]
    }

    pub fn lower(&self) -> SampleMatrix {
        SampleMatrix::new(self.dim, self.dim, self.lower.clone()).expect("factor entries are finite")
    }

    /// `L·Lᵀ`, the matrix this factor came from.
    pub fn reconstruct(&self) -> SampleMatrix {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let s: f64 = (0..=j).map(|k| self.get(i, k) * self.get(j, k)).sum();
                out[i * d + j] = s;
                out[j * d + i] = s;
            }
        }
        SampleMatrix::new(d, d, out).expect("finite product")
    }

    pub fn smallest_pivot(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).fold(f64::INFINITY, f64::min)
    }

    /// `y = L·z`
    fn lower_mul(&self, z: &[f64], out: &mut [f64]) {
        for (i, y) in out.iter_mut().enumerate().take(self.dim) {
            let row = &self.lower[i * self.dim..i * self.dim + i + 1];
            *y = row.iter().zip(z).map(|(l, z)| l * z).sum();
        }
    }

    /// Solves `Lᵀ·x = z` by back substitution.
    #[allow(clippy::needless_range_loop)]
    fn upper_solve(&self, z: &[f64], out: &mut [f64]) {
        let d = self.dim;
        for i in (0..d).rev() {
            let mut s = z[i];
            for k in i + 1..d {
                s -= self.get(k, i) * out[k];
            }
            out[i] = s / self.get(i, i);
        }
    }
}

/// Factors a symmetric positive-definite matrix.
pub fn cholesky(s: &SampleMatrix) -> Result<CholeskyFactor> {
    let d = s.rows();
    if s.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: s.cols(),
        });
    }
    for i in 0..d {
        for j in 0..i {
            let (a, b) = (s.get(i, j), s.get(j, i));
            if (a - b).abs() > SPD_TOLERANCE * a.abs().max(b.abs()).max(1.0) {
                return Err(Error::NotSymmetric { row: i, col: j });
            }
        }
    }

    let mut lower = vec![0.0; d * d];
    for j in 0..d {
        let mut pivot = s.get(j, j);
        for k in 0..j {
            pivot -= lower[j * d + k] * lower[j * d + k];
        }
        if !(pivot > SPD_TOLERANCE * s.get(j, j).abs()) {
            return Err(Error::NotPositiveDefinite { index: j, pivot });
        }
        let diag = pivot.sqrt();
        lower[j * d + j] = diag;
        for i in j + 1..d {
            let mut v = s.get(i, j);
            for k in 0..j {
                v -= lower[i * d + k] * lower[j * d + k];
            }
            lower[i * d + j] = v / diag;
        }
    }
    Ok(CholeskyFactor { dim: d, lower })
}

/// `count` draws of `mean + L·z` with `z` standard normal.
pub fn sample_mvn(mean: &[f64], chol: &CholeskyFactor, count: usize, rng: RngStream) -> Result<SampleMatrix> {
    let d = chol.dim();
    if mean.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: mean.len(),
        });
    }
    let mut gen = rng.rng();
    let mut z = vec![0.0; d];
    let mut data = vec![0.0; count * d];
    for row in data.chunks_exact_mut(d) {
        z.iter_mut().for_each(|v| *v = gen.sample(StandardNormal));
        chol.lower_mul(&z, row);
        row.iter_mut().zip(mean).for_each(|(v, mu)| *v += mu);
    }
    SampleMatrix::new(count, d, data)
}

/// `count` draws from `N(0, Q⁻¹)` given the Cholesky factor of the precision `Q`.
///
/// Each row solves `Lᵀ·x = z`; no inverse is formed.
pub fn sample_precision_mvn(precision_chol: &CholeskyFactor, count: usize, rng: RngStream) -> Result<SampleMatrix> {
    let d = precision_chol.dim();
    for i in 0..d {
        let value = precision_chol.get(i, i);
        if value < SPD_TOLERANCE {
            return Err(Error::SingularFactor { index: i, value });
        }
    }
    let mut gen = rng.rng();
    let mut z = vec![0.0; d];
    let mut data = vec![0.0; count * d];
    for row in data.chunks_exact_mut(d) {
        z.iter_mut().for_each(|v| *v = gen.sample(StandardNormal));
        precision_chol.upper_solve(&z, row);
    }
    SampleMatrix::new(count, d, data)
}
