//! Dense observation tables and labeled pooled samples.

use crate::error::{Error, Result};

/// Dense row-major table of finite reals; each row is one observation.
///
/// Also used for the small square matrices (covariances, precisions) the
/// generators factor.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl SampleMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::EmptyMatrix { rows, cols });
        }
        if data.len() != rows * cols {
            return Err(Error::ShapeMismatch {
                rows,
                cols,
                len: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite {
                row: pos / cols,
                col: pos % cols,
            });
        }
        Ok(SampleMatrix { rows, cols, data })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            let row = row.as_ref();
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        SampleMatrix::new(rows.len(), cols, data)
    }

    pub fn identity(d: usize) -> Result<Self> {
        let mut data = vec![0.0; d * d];
        for i in 0..d {
            data[i * d + i] = 1.0;
        }
        SampleMatrix::new(d, d, data)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.data.chunks_exact(self.cols)
    }

    /// Rows picked by index, in the given order.
    pub fn select_rows(&self, indices: &[usize]) -> Result<Self> {
        let mut data = Vec::with_capacity(indices.len() * self.cols);
        for &i in indices {
            data.extend_from_slice(self.row(i));
        }
        SampleMatrix::new(indices.len(), self.cols, data)
    }

    /// Stacks `self` on top of `other`.
    pub fn vstack(&self, other: &SampleMatrix) -> Result<Self> {
        if self.cols != other.cols {
            return Err(Error::DimensionMismatch {
                expected: self.cols,
                found: other.cols,
            });
        }
        let mut data = Vec::with_capacity(self.data.len() + other.data.len());
        data.extend_from_slice(&self.data);
        data.extend_from_slice(&other.data);
        SampleMatrix::new(self.rows + other.rows, self.cols, data)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        SampleMatrix::new(self.rows, self.cols, self.data.iter().map(|&v| f(v)).collect())
    }

    pub fn column_means(&self) -> Vec<f64> {
        let mut means = vec![0.0; self.cols];
        for row in self.iter_rows() {
            for (m, v) in means.iter_mut().zip(row) {
                *m += v;
            }
        }
        means.iter_mut().for_each(|m| *m /= self.rows as f64);
        means
    }

    /// Sample covariance with divisor `rows - 1` (`rows` when there is a single row).
    pub fn covariance(&self) -> Vec<f64> {
        let d = self.cols;
        let means = self.column_means();
        let mut cov = vec![0.0; d * d];
        for row in self.iter_rows() {
            for i in 0..d {
                let di = row[i] - means[i];
                for j in i..d {
                    cov[i * d + j] += di * (row[j] - means[j]);
                }
            }
        }
        let denom = (self.rows.max(2) - 1) as f64;
        for i in 0..d {
            for j in i..d {
                let v = cov[i * d + j] / denom;
                cov[i * d + j] = v;
                cov[j * d + i] = v;
            }
        }
        cov
    }
}

/// Pooled sample with class labels: label 1 marks the first sample, 0 the second.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    features: SampleMatrix,
    labels: Vec<u8>,
    n: usize,
    m: usize,
}

impl LabeledDataset {
    /// Builds a dataset, requiring at least two rows of each class.
    pub fn new(features: SampleMatrix, labels: Vec<u8>) -> Result<Self> {
        let (n, m) = class_counts(&features, &labels)?;
        if n < 2 || m < 2 {
            return Err(Error::SingleClass { n, m });
        }
        Ok(LabeledDataset { features, labels, n, m })
    }

    /// Training subsets used inside cross-validation only need one row per class.
    pub(crate) fn new_training(features: SampleMatrix, labels: Vec<u8>) -> Result<Self> {
        let (n, m) = class_counts(&features, &labels)?;
        if n == 0 || m == 0 {
            return Err(Error::SingleClassTrainingSet);
        }
        Ok(LabeledDataset { features, labels, n, m })
    }

    /// Pools two samples; rows of `sample1` get label 1 and come first.
    pub fn from_samples(sample1: &SampleMatrix, sample0: &SampleMatrix) -> Result<Self> {
        let features = sample1.vstack(sample0)?;
        let mut labels = vec![1u8; sample1.rows()];
        labels.resize(sample1.rows() + sample0.rows(), 0);
        LabeledDataset::new(features, labels)
    }

    pub fn features(&self) -> &SampleMatrix {
        &self.features
    }

    pub fn labels(&self) -> &[u8] {
        &self.labels
    }

    /// Number of label-1 rows.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of label-0 rows.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// The empirical class-1 proportion n/N.
    pub fn pi_hat(&self) -> f64 {
        self.n as f64 / self.len() as f64
    }

    /// Same features under a different labeling with the same class sizes.
    pub fn relabeled(&self, labels: Vec<u8>) -> Result<Self> {
        if labels.len() != self.labels.len() {
            return Err(Error::LengthMismatch {
                expected: self.labels.len(),
                found: labels.len(),
            });
        }
        LabeledDataset::new(self.features.clone(), labels)
    }

    pub fn class_rows(&self, label: u8) -> Result<SampleMatrix> {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.labels[i] == label).collect();
        self.features.select_rows(&idx)
    }

    pub fn subset(&self, indices: &[usize]) -> Result<Self> {
        let features = self.features.select_rows(indices)?;
        let labels = indices.iter().map(|&i| self.labels[i]).collect();
        LabeledDataset::new_training(features, labels)
    }
}

fn class_counts(features: &SampleMatrix, labels: &[u8]) -> Result<(usize, usize)> {
    if labels.len() != features.rows() {
        return Err(Error::LengthMismatch {
            expected: features.rows(),
            found: labels.len(),
        });
    }
    let mut n = 0;
    for &y in labels {
        match y {
            0 => {}
            1 => n += 1,
            other => return Err(Error::InvalidLabel(other)),
        }
    }
    Ok((n, labels.len() - n))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_and_empty() {
        assert!(matches!(
            SampleMatrix::new(1, 2, vec![1.0, f64::NAN]),
            Err(Error::NonFinite { row: 0, col: 1 })
        ));
        assert!(matches!(
            SampleMatrix::new(0, 2, vec![]),
            Err(Error::EmptyMatrix { .. })
        ));
        assert!(matches!(
            SampleMatrix::new(2, 2, vec![1.0; 3]),
            Err(Error::ShapeMismatch { .. })
        ));
    }

    #[test]
    fn dataset_counts_classes() {
        let x = SampleMatrix::from_rows(&[[0.0], [1.0], [2.0], [3.0], [4.0]]).unwrap();
        let data = LabeledDataset::new(x, vec![1, 0, 1, 0, 0]).unwrap();
        assert_eq!((data.n(), data.m(), data.len()), (2, 3, 5));
        assert!((data.pi_hat() - 0.4).abs() < 1e-15);
    }

    #[test]
    fn dataset_needs_two_of_each_class() {
        let x = SampleMatrix::from_rows(&[[0.0], [1.0], [2.0]]).unwrap();
        assert!(matches!(
            LabeledDataset::new(x.clone(), vec![1, 0, 0]),
            Err(Error::SingleClass { n: 1, m: 2 })
        ));
        assert!(matches!(
            LabeledDataset::new(x, vec![1, 2, 0]),
            Err(Error::InvalidLabel(2))
        ));
    }

    #[test]
    fn pooled_samples_put_class_one_first() {
        let a = SampleMatrix::from_rows(&[[1.0, 1.0], [2.0, 2.0]]).unwrap();
        let b = SampleMatrix::from_rows(&[[3.0, 3.0], [4.0, 4.0], [5.0, 5.0]]).unwrap();
        let data = LabeledDataset::from_samples(&a, &b).unwrap();
        assert_eq!(data.labels(), &[1, 1, 0, 0, 0]);
        assert_eq!(data.class_rows(0).unwrap(), b);
    }
}
