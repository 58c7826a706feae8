//! Test statistics.
//!
//! * [`statistic_w1`]: mean estimated log-odds over class-1 rows, centred by `log(n/m)`.
//! * [`statistic_w2`]: spread (population variance) of `p̂` over the pooled sample.
//! * [`statistic_u`] / [`statistic_v`]: the oracle counterparts of W₁ built
//!   from known densities.
//! * [`statistic_acc`]: cross-validated accuracy, the classifier-accuracy baseline.
//! * [`statistic_mmd`]: unbiased squared maximum mean discrepancy.

mod accuracy;
mod mmd;
mod oracle;

pub use accuracy::{statistic_acc, stratified_folds};
pub use mmd::{median_heuristic, statistic_mmd, Bandwidth, MmdKernel};
pub use oracle::{statistic_u, statistic_v, LogDensity, OracleModel};

use crate::classifiers::ClassifierSpec;
use crate::error::{Error, Result};

/// Which statistic a permutation test recomputes under relabeling.
#[derive(Debug, Clone, PartialEq)]
pub enum StatisticKind {
    Cpt1 { classifier: ClassifierSpec },
    Cpt2 { classifier: ClassifierSpec },
    Acc { classifier: ClassifierSpec, folds: usize },
    Mmd { bandwidth: Bandwidth },
}

impl StatisticKind {
    /// Two folds, as used by the accuracy baseline.
    pub const DEFAULT_ACC_FOLDS: usize = 2;

    pub fn tag(&self) -> &'static str {
        match self {
            StatisticKind::Cpt1 { .. } => "cpt1",
            StatisticKind::Cpt2 { .. } => "cpt2",
            StatisticKind::Acc { .. } => "acc",
            StatisticKind::Mmd { .. } => "mmd",
        }
    }

    pub fn classifier(&self) -> Option<&ClassifierSpec> {
        match self {
            StatisticKind::Cpt1 { classifier }
            | StatisticKind::Cpt2 { classifier }
            | StatisticKind::Acc { classifier, .. } => Some(classifier),
            StatisticKind::Mmd { .. } => None,
        }
    }

    /// `cpt1-forest`, `acc-knn`, `mmd`, ...
    pub fn label(&self) -> String {
        match self.classifier() {
            Some(c) => format!("{}-{}", self.tag(), c.kind.name()),
            None => self.tag().to_string(),
        }
    }

    /// The same statistic with its classifier seed replaced.
    pub fn with_classifier_seed(&self, seed: u64) -> Self {
        let mut out = self.clone();
        match &mut out {
            StatisticKind::Cpt1 { classifier }
            | StatisticKind::Cpt2 { classifier }
            | StatisticKind::Acc { classifier, .. } => classifier.seed = seed,
            StatisticKind::Mmd { .. } => {}
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(c) = self.classifier() {
            c.validate()?;
        }
        match self {
            StatisticKind::Acc { folds, .. } if *folds < 2 => {
                Err(Error::invalid("acc_folds", "cross-validation needs at least 2 folds"))
            }
            StatisticKind::Mmd {
                bandwidth: Bandwidth::Fixed(s),
            } if !(*s > 0.0 && s.is_finite()) => {
                Err(Error::invalid("mmd_bandwidth", "must be a positive finite number"))
            }
            _ => Ok(()),
        }
    }
}

/// `W₁ = (1/n) Σ log(p̂ᵢ / (1 − p̂ᵢ)) − log(n/m)` over the `n` class-1 estimates.
pub fn statistic_w1(probs: &[f64], n: usize, m: usize) -> Result<f64> {
    if probs.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            found: probs.len(),
        });
    }
    if n == 0 || m == 0 {
        return Err(Error::invalid("n, m", "both class sizes must be positive"));
    }
    let mut sum = 0.0;
    for &p in probs {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::ProbabilityOutOfRange(p));
        }
        sum += (p / (1.0 - p)).ln();
    }
    Ok(sum / n as f64 - (n as f64 / m as f64).ln())
}

/// `W₂ = (1/N) Σ (p̂ᵢ − p̄)²` with `p̄` the mean of the estimates themselves.
pub fn statistic_w2(probs: &[f64]) -> Result<f64> {
    if probs.len() < 2 {
        return Err(Error::LengthMismatch {
            expected: 2,
            found: probs.len(),
        });
    }
    if let Some(&p) = probs.iter().find(|&&p| !(0.0..=1.0).contains(&p)) {
        return Err(Error::ProbabilityOutOfRange(p));
    }
    let count = probs.len() as f64;
    let mean = probs.iter().sum::<f64>() / count;
    Ok(probs.iter().map(|p| (p - mean) * (p - mean)).sum::<f64>() / count)
}
