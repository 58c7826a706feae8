//! Label-permutation testing.
//!
//! A test fits on the observed labels, then draws `B` relabelings of the
//! pooled sample that keep exactly `n` ones and `m` zeros, refits from
//! scratch on each one and recomputes the statistic. The p-value is the
//! add-one estimate `(1 + #{null ≥ observed}) / (B + 1)`; the critical value
//! is the `⌈(1 − α)(B + 1)⌉`-th smallest null value, and the test rejects
//! when the observed statistic exceeds it.
//!
//! Relabeling `j` draws from `rng.substream(j)` (`j = 1..=B`; the observed
//! fit uses stream 0), so results do not depend on how the replications are
//! scheduled across threads.

use rand::seq::SliceRandom;
use rayon::prelude::*;

use crate::classifiers::ProbabilityModel;
use crate::error::{Error, Result};
use crate::matrix::LabeledDataset;
use crate::rng::RngStream;
use crate::stats::{statistic_acc, statistic_w1, statistic_w2, MmdKernel, StatisticKind};

#[derive(Debug, Clone, PartialEq)]
pub struct TestResult {
    pub statistic_kind: StatisticKind,
    pub observed: f64,
    /// Null statistics, sorted ascending.
    pub null_sample: Vec<f64>,
    pub p_value: f64,
    pub critical_value: f64,
    pub alpha: f64,
    pub num_permutations: usize,
    pub seed: u64,
    pub stream_id: u64,
}

impl TestResult {
    /// `observed > critical_value`.
    pub fn reject(&self) -> bool {
        self.observed > self.critical_value
    }
}

/// Add-one permutation p-value.
pub fn permutation_p_value(observed: f64, null_sample: &[f64]) -> f64 {
    let exceed = null_sample.iter().filter(|&&v| v >= observed).count();
    (1 + exceed) as f64 / (null_sample.len() + 1) as f64
}

/// Upper-tail critical value: the `⌈(1 − α)(B + 1)⌉`-th order statistic of the
/// ascending `null_sorted`, or `+∞` when that rank exceeds `B`.
pub fn critical_value(null_sorted: &[f64], alpha: f64) -> f64 {
    let b = null_sorted.len();
    let rank = ((1.0 - alpha) * (b + 1) as f64 - 1e-9).ceil() as usize;
    match rank {
        0 => f64::NEG_INFINITY,
        r if r > b => f64::INFINITY,
        r => null_sorted[r - 1],
    }
}

/// The statistic under a given labeling.
enum Evaluator<'a> {
    Cpt1(&'a dyn ProbabilityModel),
    Cpt2(&'a dyn ProbabilityModel),
    Acc(&'a dyn ProbabilityModel, usize),
    Mmd(MmdKernel),
}

impl Evaluator<'_> {
    fn evaluate(&self, data: &LabeledDataset, rng: RngStream) -> Result<f64> {
        match self {
            Evaluator::Cpt1(model) => {
                let probs = model.fit_predict_proba(data, data.features())?;
                let class1: Vec<f64> = probs
                    .values()
                    .iter()
                    .zip(data.labels())
                    .filter(|&(_, &y)| y == 1)
                    .map(|(&p, _)| p)
                    .collect();
                statistic_w1(&class1, data.n(), data.m())
            }
            Evaluator::Cpt2(model) => {
                let probs = model.fit_predict_proba(data, data.features())?;
                statistic_w2(probs.values())
            }
            Evaluator::Acc(model, folds) => statistic_acc(*model, data, *folds, rng),
            Evaluator::Mmd(kernel) => kernel.statistic(data.labels()),
        }
    }
}

/// Permutation test of `data` with the statistic `kind`.
pub fn permutation_test(
    data: &LabeledDataset,
    kind: &StatisticKind,
    permutations: usize,
    alpha: f64,
    rng: RngStream,
) -> Result<TestResult> {
    match kind.classifier() {
        Some(spec) => permutation_test_with_model(data, kind, spec, permutations, alpha, rng),
        None => run(data, kind, None, permutations, alpha, rng),
    }
}

/// Like [`permutation_test`], but every fit goes through `model` instead of
/// the classifier named in `kind`.
pub fn permutation_test_with_model(
    data: &LabeledDataset,
    kind: &StatisticKind,
    model: &dyn ProbabilityModel,
    permutations: usize,
    alpha: f64,
    rng: RngStream,
) -> Result<TestResult> {
    run(data, kind, Some(model), permutations, alpha, rng)
}

fn run(
    data: &LabeledDataset,
    kind: &StatisticKind,
    model: Option<&dyn ProbabilityModel>,
    permutations: usize,
    alpha: f64,
    rng: RngStream,
) -> Result<TestResult> {
    if permutations == 0 {
        return Err(Error::invalid("permutations", "need at least one relabeling"));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::invalid("alpha", "must lie in (0, 1)"));
    }
    kind.validate()?;
    let needs_model = || model.ok_or_else(|| Error::invalid("classifier", "statistic needs a classifier"));
    let evaluator = match kind {
        StatisticKind::Cpt1 { .. } => Evaluator::Cpt1(needs_model()?),
        StatisticKind::Cpt2 { .. } => Evaluator::Cpt2(needs_model()?),
        StatisticKind::Acc { folds, .. } => Evaluator::Acc(needs_model()?, *folds),
        StatisticKind::Mmd { bandwidth } => Evaluator::Mmd(MmdKernel::new(data.features(), *bandwidth)?),
    };

    let observed = evaluator.evaluate(data, rng.substream(0).substream(0))?;
    let mut null_sample = (1..=permutations as u64)
        .into_par_iter()
        .map(|j| {
            let stream = rng.substream(j);
            let mut labels = data.labels().to_vec();
            labels.shuffle(&mut stream.rng());
            let permuted = data.relabeled(labels)?;
            evaluator.evaluate(&permuted, stream.substream(0))
        })
        .collect::<Result<Vec<f64>>>()?;
    null_sample.sort_unstable_by(f64::total_cmp);

    Ok(TestResult {
        statistic_kind: kind.clone(),
        observed,
        p_value: permutation_p_value(observed, &null_sample),
        critical_value: critical_value(&null_sample, alpha),
        null_sample,
        alpha,
        num_permutations: permutations,
        seed: rng.seed(),
        stream_id: rng.stream_id(),
    })
}

/// Empirical CDF of `p_values` at each level in `grid`: one ROC point per level.
pub fn p_value_ecdf(p_values: &[f64], grid: &[f64]) -> Result<Vec<f64>> {
    if p_values.is_empty() {
        return Err(Error::EmptyInput);
    }
    if let Some(p) = p_values.iter().find(|&&p| !(p > 0.0 && p <= 1.0)) {
        return Err(Error::invalid("p_values", format!("{p} is outside (0, 1]")));
    }
    let count = p_values.len() as f64;
    Ok(grid
        .iter()
        .map(|&alpha| p_values.iter().filter(|&&p| p <= alpha).count() as f64 / count)
        .collect())
}
