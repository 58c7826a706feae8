//! Two-sample testing with estimated classification probabilities.
//!
//! Pool the two samples, label the first one `1` and the second `0`, and fit
//! a probabilistic classifier. If the two distributions agree, the fitted
//! probabilities carry no information beyond the class share; if they
//! differ, the probabilities separate. The statistics in [`stats`] measure
//! that separation and [`permutation`] calibrates them by refitting on
//! relabeled data.
//!
//! ```
//! use cptest::{permutation_test, ClassifierSpec, LabeledDataset, RngStream, SampleMatrix, StatisticKind};
//!
//! let x: Vec<[f64; 1]> = (0..20).map(|i| [i as f64 / 20.0]).collect();
//! let y: Vec<[f64; 1]> = (0..20).map(|i| [i as f64 / 20.0 + 2.0]).collect();
//! let data = LabeledDataset::from_samples(
//!     &SampleMatrix::from_rows(&x).unwrap(),
//!     &SampleMatrix::from_rows(&y).unwrap(),
//! )
//! .unwrap();
//! let kind = StatisticKind::Cpt1 { classifier: ClassifierSpec::logistic(1.0) };
//! let result = permutation_test(&data, &kind, 99, 0.05, RngStream::new(7, 0)).unwrap();
//! assert!(result.reject());
//! assert_eq!(result.p_value, 0.01);
//! ```

// `!(x > 0.0)` is deliberate throughout: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bench;
pub mod classifiers;
mod error;
pub mod generators;
pub mod linalg;
mod matrix;
pub mod permutation;
mod rng;
pub mod stats;

pub use classifiers::{ClassifierKind, ClassifierSpec, Mtry, ProbEstimate, ProbabilityModel};
pub use error::{Error, Result};
pub use matrix::{LabeledDataset, SampleMatrix};
pub use permutation::{permutation_test, permutation_test_with_model, TestResult};
pub use rng::RngStream;
pub use stats::StatisticKind;

// The guide under book/ is compiled and run with the doctests.
#[cfg(doctest)]
mod book {
    #[doc = include_str!("../../../book/src/introduction.md")]
    mod introduction {}
    #[doc = include_str!("../../../book/src/probabilities.md")]
    mod probabilities {}
    #[doc = include_str!("../../../book/src/statistics.md")]
    mod statistics {}
    #[doc = include_str!("../../../book/src/permutation.md")]
    mod permutation {}
    #[doc = include_str!("../../../book/src/classifiers.md")]
    mod classifiers {}
    #[doc = include_str!("../../../book/src/scenarios.md")]
    mod scenarios {}
    #[doc = include_str!("../../../book/src/benchmarks.md")]
    mod benchmarks {}
    #[doc = include_str!("../../../book/src/cli.md")]
    mod cli {}
}
