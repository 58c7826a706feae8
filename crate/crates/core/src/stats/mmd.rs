//! Unbiased squared MMD with a Gaussian kernel `k(x, y) = exp(−‖x − y‖² / (2σ²))`.
//!
//! ```text
//! MMD²ᵤ = Σ_{i≠j∈1} k / (n(n−1)) + Σ_{i≠j∈0} k / (m(m−1)) − 2 Σ_{i∈1, j∈0} k / (nm)
//! ```
//!
//! The median heuristic sets `σ` to the median Euclidean distance over all
//! pairs of the pooled sample, which does not change under relabeling; a
//! permutation test can therefore build the pooled kernel matrix once
//! ([`MmdKernel`]) and only re-sum it per labeling.

use crate::error::{Error, Result};
use crate::matrix::SampleMatrix;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Bandwidth {
    MedianHeuristic,
    Fixed(f64),
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

/// Median pairwise Euclidean distance (mean of the middle two for an even count).
pub fn median_heuristic(pooled: &SampleMatrix) -> Result<f64> {
    let rows = pooled.rows();
    if rows < 2 {
        return Err(Error::EmptyInput);
    }
    let mut dists = Vec::with_capacity(rows * (rows - 1) / 2);
    for i in 0..rows {
        for j in i + 1..rows {
            dists.push(sq_dist(pooled.row(i), pooled.row(j)).sqrt());
        }
    }
    let mid = dists.len() / 2;
    let (_, &mut upper, _) = dists.select_nth_unstable_by(mid, f64::total_cmp);
    let median = if dists.len() % 2 == 1 {
        upper
    } else {
        let lower = dists[..mid].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    };
    if median <= 0.0 {
        return Err(Error::DegenerateBandwidth);
    }
    Ok(median)
}

/// Gaussian kernel matrix of a pooled sample.
#[derive(Debug, Clone)]
pub struct MmdKernel {
    rows: usize,
    sigma: f64,
    values: Vec<f64>,
}

impl MmdKernel {
    pub fn new(pooled: &SampleMatrix, bandwidth: Bandwidth) -> Result<Self> {
        let sigma = match bandwidth {
            Bandwidth::MedianHeuristic => median_heuristic(pooled)?,
            Bandwidth::Fixed(s) if s > 0.0 && s.is_finite() => s,
            Bandwidth::Fixed(_) => return Err(Error::invalid("mmd_bandwidth", "must be positive")),
        };
        let rows = pooled.rows();
        let scale = -1.0 / (2.0 * sigma * sigma);
        let mut values = vec![1.0; rows * rows];
        for i in 0..rows {
            for j in i + 1..rows {
                let k = (scale * sq_dist(pooled.row(i), pooled.row(j))).exp();
                values[i * rows + j] = k;
                values[j * rows + i] = k;
            }
        }
        Ok(MmdKernel { rows, sigma, values })
    }

    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// MMD²ᵤ between the rows labeled 1 and those labeled 0.
    pub fn statistic(&self, labels: &[u8]) -> Result<f64> {
        if labels.len() != self.rows {
            return Err(Error::LengthMismatch {
                expected: self.rows,
                found: labels.len(),
            });
        }
        let n = labels.iter().filter(|&&y| y == 1).count();
        let m = self.rows - n;
        if n < 2 || m < 2 {
            return Err(Error::invalid("sample", "each sample needs at least two rows"));
        }
        // sums over unordered pairs
        let (mut within1, mut within0, mut cross) = (0.0, 0.0, 0.0);
        for i in 0..self.rows {
            let row = &self.values[i * self.rows..(i + 1) * self.rows];
            for j in i + 1..self.rows {
                match (labels[i], labels[j]) {
                    (1, 1) => within1 += row[j],
                    (0, 0) => within0 += row[j],
                    _ => cross += row[j],
                }
            }
        }
        let (n, m) = (n as f64, m as f64);
        Ok(2.0 * within1 / (n * (n - 1.0)) + 2.0 * within0 / (m * (m - 1.0)) - 2.0 * cross / (n * m))
    }
}

/// MMD²ᵤ between two samples; the median heuristic uses the pooled rows.
pub fn statistic_mmd(sample1: &SampleMatrix, sample0: &SampleMatrix, bandwidth: Bandwidth) -> Result<f64> {
    let pooled = sample1.vstack(sample0)?;
    let mut labels = vec![1u8; sample1.rows()];
    labels.resize(pooled.rows(), 0);
    MmdKernel::new(&pooled, bandwidth)?.statistic(&labels)
}
