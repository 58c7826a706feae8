//! Estimators of the classification probability `p(x) = P(Y = 1 | X = x)`.
//!
//! Three self-contained learners are provided: k-nearest neighbours,
//! L2-penalized logistic regression and a CART random forest. All of them
//! return a [`ProbEstimate`] clipped to `[ε, 1 − ε]` with `ε = 1/(2N)`, so
//! downstream log-odds stay finite.

mod forest;
mod knn;
mod logistic;

pub use forest::{forest_fit_predict, RandomForest};
pub use knn::knn_proba;
pub use logistic::{logistic_fit, logistic_fit_predict, LogisticFit};

use crate::error::{Error, Result};
use crate::matrix::{LabeledDataset, SampleMatrix};
use crate::rng::mix64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClassifierKind {
    Knn,
    Logistic,
    Forest,
}

impl ClassifierKind {
    pub fn name(self) -> &'static str {
        match self {
            ClassifierKind::Knn => "knn",
            ClassifierKind::Logistic => "logistic",
            ClassifierKind::Forest => "forest",
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "knn" => Ok(ClassifierKind::Knn),
            "logistic" => Ok(ClassifierKind::Logistic),
            "forest" => Ok(ClassifierKind::Forest),
            other => Err(Error::invalid(
                "classifier",
                format!("unknown classifier `{other}` (expected knn, logistic or forest)"),
            )),
        }
    }
}

/// Number of candidate features drawn at each split.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Mtry {
    /// `⌊√d⌋`, at least one.
    Auto,
    Fixed(usize),
}

impl Mtry {
    pub fn resolve(self, d: usize) -> Result<usize> {
        match self {
            Mtry::Auto => Ok(((d as f64).sqrt().floor() as usize).max(1)),
            Mtry::Fixed(k) if k >= 1 && k <= d => Ok(k),
            Mtry::Fixed(k) => Err(Error::invalid("forest_mtry", format!("{k} is outside 1..={d}"))),
        }
    }
}

/// Everything needed to reproduce a fit.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub knn_k: usize,
    pub logistic_l2: f64,
    pub logistic_max_iter: usize,
    pub logistic_tol: f64,
    pub forest_trees: usize,
    pub forest_mtry: Mtry,
    pub forest_min_leaf: usize,
    /// Grow each tree on a bootstrap resample (on by default).
    pub forest_bootstrap: bool,
    pub seed: u64,
}

impl Default for ClassifierSpec {
    fn default() -> Self {
        ClassifierSpec {
            kind: ClassifierKind::Forest,
            knn_k: 10,
            logistic_l2: 1.0,
            logistic_max_iter: 500,
            logistic_tol: 1e-5,
            forest_trees: 500,
            forest_mtry: Mtry::Auto,
            forest_min_leaf: 10,
            forest_bootstrap: true,
            seed: 0,
        }
    }
}

impl ClassifierSpec {
    pub fn knn(k: usize) -> Self {
        ClassifierSpec {
            kind: ClassifierKind::Knn,
            knn_k: k,
            ..Default::default()
        }
    }

    pub fn logistic(l2: f64) -> Self {
        ClassifierSpec {
            kind: ClassifierKind::Logistic,
            logistic_l2: l2,
            ..Default::default()
        }
    }

    pub fn forest(trees: usize) -> Self {
        ClassifierSpec {
            kind: ClassifierKind::Forest,
            forest_trees: trees,
            ..Default::default()
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.knn_k == 0 {
            return Err(Error::invalid("knn_k", "must be positive"));
        }
        if !(self.logistic_l2 >= 0.0) || !self.logistic_l2.is_finite() {
            return Err(Error::invalid("logistic_l2", "must be a finite value >= 0"));
        }
        if self.logistic_max_iter == 0 {
            return Err(Error::invalid("logistic_max_iter", "must be positive"));
        }
        if !(self.logistic_tol > 0.0) {
            return Err(Error::invalid("logistic_tol", "must be positive"));
        }
        if self.forest_trees == 0 {
            return Err(Error::invalid("forest_trees", "must be positive"));
        }
        if self.forest_min_leaf == 0 {
            return Err(Error::invalid("forest_min_leaf", "must be positive"));
        }
        if let Mtry::Fixed(0) = self.forest_mtry {
            return Err(Error::invalid("forest_mtry", "must be positive"));
        }
        Ok(())
    }
}

/// Estimated class-1 probabilities for a set of evaluation rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ProbEstimate {
    values: Vec<f64>,
    epsilon: f64,
    converged: bool,
}

impl ProbEstimate {
    /// Wraps values that already lie in `[epsilon, 1 - epsilon]`.
    pub fn new(values: Vec<f64>, epsilon: f64) -> Result<Self> {
        if !(0.0..0.5).contains(&epsilon) {
            return Err(Error::invalid("epsilon", "must lie in [0, 1/2)"));
        }
        if let Some(&bad) = values.iter().find(|&&p| !(p >= epsilon && p <= 1.0 - epsilon)) {
            return Err(Error::ProbabilityOutOfRange(bad));
        }
        Ok(ProbEstimate {
            values,
            epsilon,
            converged: true,
        })
    }

    /// Clips raw values into `[epsilon, 1 - epsilon]`.
    pub fn clipped(values: Vec<f64>, epsilon: f64) -> Self {
        let values = values.into_iter().map(|p| p.clamp(epsilon, 1.0 - epsilon)).collect();
        ProbEstimate {
            values,
            epsilon,
            converged: true,
        }
    }

    pub(crate) fn with_convergence(mut self, converged: bool) -> Self {
        self.converged = converged;
        self
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    /// False when an iterative fit stopped at its iteration cap.
    pub fn converged(&self) -> bool {
        self.converged
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// The default clipping constant for a training set of `n_train` rows.
pub fn default_epsilon(n_train: usize) -> f64 {
    1.0 / (2.0 * n_train as f64)
}

/// Anything that can be trained on a labeled sample and queried for `p̂`.
///
/// Implementations must be pure: equal inputs give bit-equal outputs.
pub trait ProbabilityModel: Sync {
    fn fit_predict_proba(&self, train: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate>;

    /// Short name used in reports, e.g. `forest`.
    fn name(&self) -> String;
}

impl ProbabilityModel for ClassifierSpec {
    fn fit_predict_proba(&self, train: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate> {
        fit_predict_proba(self, train, eval)
    }

    fn name(&self) -> String {
        self.kind.name().to_string()
    }
}

/// Fits the classifier described by `spec` and evaluates `p̂` on `eval`.
pub fn fit_predict_proba(spec: &ClassifierSpec, train: &LabeledDataset, eval: &SampleMatrix) -> Result<ProbEstimate> {
    spec.validate()?;
    check_inputs(train, eval)?;
    match spec.kind {
        ClassifierKind::Knn => knn_proba(spec.knn_k, train, eval),
        ClassifierKind::Logistic => logistic_fit_predict(spec, train, eval),
        ClassifierKind::Forest => forest_fit_predict(spec, train, eval),
    }
}

/// Row indices sorted by a content hash of (features, label).
///
/// Fits that walk rows in this order do not depend on how the caller
/// arranged the training set; identical rows are interchangeable.
pub(crate) fn canonical_order(train: &LabeledDataset) -> Vec<usize> {
    let x = train.features();
    let keys: Vec<u64> = (0..train.len())
        .map(|i| {
            x.row(i)
                .iter()
                .fold(mix64(u64::from(train.labels()[i])), |h, v| mix64(h ^ v.to_bits()))
        })
        .collect();
    let mut order: Vec<usize> = (0..train.len()).collect();
    order.sort_by(|&a, &b| {
        keys[a]
            .cmp(&keys[b])
            .then_with(|| {
                x.row(a)
                    .iter()
                    .zip(x.row(b))
                    .map(|(u, v)| u.total_cmp(v))
                    .find(|o| o.is_ne())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .then_with(|| train.labels()[a].cmp(&train.labels()[b]))
    });
    order
}

pub(crate) fn check_inputs(train: &LabeledDataset, eval: &SampleMatrix) -> Result<()> {
    if train.n() == 0 || train.m() == 0 {
        return Err(Error::SingleClassTrainingSet);
    }
    let d = train.features().cols();
    if eval.cols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            found: eval.cols(),
        });
    }
    Ok(())
}
