//! Monte Carlo experiments: ROC curves from replicated p-values, power
//! against sample size, and the closed-form minimax reference curve.
//!
//! Replication `r` of an experiment owns the stream `root.substream(r)`:
//! its data come from child 0, its permutations from child 1 and its
//! classifier seed from child 2. Replications run in parallel and are
//! collected in index order, so results do not depend on the thread count.
//! Scenario structure that is fixed across replications (the random graph
//! of the graphical-model scenario) comes from a separate stream.

mod report;

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::{Scenario, ScenarioKind, ScenarioSpec};
use crate::permutation::{p_value_ecdf, permutation_test};
use crate::rng::RngStream;
use crate::stats::StatisticKind;

pub use report::{
    roc_svg, write_power_csv, write_pvalues_csv, write_roc_csv, write_roc_svg, POWER_HEADER, PVALUES_HEADER, ROC_HEADER,
};

/// Significance level of power curves and of the critical values carried in test results.
pub const POWER_ALPHA: f64 = 0.05;

const STRUCTURE_STREAM: u64 = u64::MAX;

/// Stream that fixes a scenario's structure for an experiment seeded with `seed`.
pub fn structure_stream(seed: u64) -> RngStream {
    RngStream::new(seed, STRUCTURE_STREAM)
}

/// Stream of the data of replication `r` in a ROC experiment seeded with `seed`.
pub fn replication_data_stream(seed: u64, r: u64) -> RngStream {
    RngStream::new(seed, 0).substream(r).substream(0)
}

/// `0.01, 0.02, …, 1.00`.
pub fn default_alpha_grid() -> Vec<f64> {
    (1..=100).map(|k| k as f64 / 100.0).collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentRecord {
    pub scenario: ScenarioSpec,
    pub statistic_kind: StatisticKind,
    pub replications: usize,
    pub num_permutations: usize,
    pub seed: u64,
    /// One p-value per replication, in replication order.
    pub p_values: Vec<f64>,
    pub alpha_grid: Vec<f64>,
    /// `(α, share of p-values ≤ α)`.
    pub roc: Vec<(f64, f64)>,
    pub runtime_seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerCurve {
    pub scenario: ScenarioSpec,
    pub statistic_kind: StatisticKind,
    /// Per-sample sizes: each point uses `n = m = size`.
    pub sample_sizes: Vec<usize>,
    pub powers: Vec<f64>,
    pub replications: usize,
    pub num_permutations: usize,
    pub seed: u64,
    pub p_values: Vec<Vec<f64>>,
    pub runtime_seconds: f64,
}

fn replicate(
    scenario: &Scenario,
    kind: &StatisticKind,
    n: usize,
    m: usize,
    replications: usize,
    permutations: usize,
    root: RngStream,
) -> Result<Vec<f64>> {
    (0..replications as u64)
        .into_par_iter()
        .map(|r| {
            let stream = root.substream(r);
            let data = scenario.draw_sized(n, m, stream.substream(0))?;
            let kind = kind.with_classifier_seed(stream.substream(2).seed());
            let result = permutation_test(&data, &kind, permutations, POWER_ALPHA, stream.substream(1))?;
            Ok(result.p_value)
        })
        .collect()
}

fn check_counts(replications: usize, permutations: usize) -> Result<()> {
    if replications == 0 {
        return Err(Error::invalid("replications", "need at least one"));
    }
    if permutations == 0 {
        return Err(Error::invalid("permutations", "need at least one"));
    }
    Ok(())
}

/// `replications` independent tests on fresh data; the ROC is the empirical
/// CDF of their p-values over `alpha_grid`.
pub fn roc_experiment(
    scenario: &ScenarioSpec,
    kind: &StatisticKind,
    replications: usize,
    permutations: usize,
    alpha_grid: &[f64],
    seed: u64,
) -> Result<ExperimentRecord> {
    check_counts(replications, permutations)?;
    kind.validate()?;
    if alpha_grid.iter().any(|a| !(0.0..=1.0).contains(a)) {
        return Err(Error::invalid("alpha_grid", "levels must lie in [0, 1]"));
    }
    let start = Instant::now();
    let prepared = scenario.prepare(structure_stream(seed))?;
    let p_values = replicate(
        &prepared,
        kind,
        scenario.n,
        scenario.m,
        replications,
        permutations,
        RngStream::new(seed, 0),
    )?;
    let powers = p_value_ecdf(&p_values, alpha_grid)?;
    Ok(ExperimentRecord {
        scenario: scenario.clone(),
        statistic_kind: kind.clone(),
        replications,
        num_permutations: permutations,
        seed,
        roc: alpha_grid.iter().copied().zip(powers).collect(),
        alpha_grid: alpha_grid.to_vec(),
        p_values,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Rejection rate at [`POWER_ALPHA`] for each per-sample size in `sizes`.
///
/// Every size shares the scenario structure; size `i` draws its replications
/// from stream `i + 1` of `seed`.
pub fn power_curve(
    scenario: &ScenarioSpec,
    kind: &StatisticKind,
    sizes: &[usize],
    replications: usize,
    permutations: usize,
    seed: u64,
) -> Result<PowerCurve> {
    check_counts(replications, permutations)?;
    kind.validate()?;
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("sizes", "must be nonempty and strictly increasing"));
    }
    if sizes[0] < 2 {
        return Err(Error::invalid("sizes", "each sample needs at least two rows"));
    }
    let start = Instant::now();
    let largest = sizes[sizes.len() - 1];
    let prepared = scenario.with_sizes(largest, largest).prepare(structure_stream(seed))?;
    let mut p_values = Vec::with_capacity(sizes.len());
    let mut powers = Vec::with_capacity(sizes.len());
    for (i, &size) in sizes.iter().enumerate() {
        let p = replicate(
            &prepared,
            kind,
            size,
            size,
            replications,
            permutations,
            RngStream::new(seed, i as u64 + 1),
        )?;
        powers.push(p_value_ecdf(&p, &[POWER_ALPHA])?[0]);
        p_values.push(p);
    }
    Ok(PowerCurve {
        scenario: scenario.clone(),
        statistic_kind: kind.clone(),
        sample_sizes: sizes.to_vec(),
        powers,
        replications,
        num_permutations: permutations,
        seed,
        p_values,
        runtime_seconds: start.elapsed().as_secs_f64(),
    })
}

/// Standard normal CDF, `Φ(x) = erfc(−x/√2) / 2`.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal quantile: Acklam's rational approximation (relative error
/// below 1.2e-9) polished by one Halley step against [`normal_cdf`].
pub fn normal_quantile(p: f64) -> f64 {
    const A: [f64; 6] = [
        -3.969_683_028_665_376e1,
        2.209_460_984_245_205e2,
        -2.759_285_104_469_687e2,
        1.383_577_518_672_69e2,
        -3.066_479_806_614_716e1,
        2.506_628_277_459_239,
    ];
    const B: [f64; 5] = [
        -5.447_609_879_822_406e1,
        1.615_858_368_580_409e2,
        -1.556_989_798_598_866e2,
        6.680_131_188_771_972e1,
        -1.328_068_155_288_572e1,
    ];
    const C: [f64; 6] = [
        -7.784_894_002_430_293e-3,
        -3.223_964_580_411_365e-1,
        -2.400_758_277_161_838,
        -2.549_732_539_343_734,
        4.374_664_141_464_968,
        2.938_163_982_698_783,
    ];
    const D: [f64; 4] = [
        7.784_695_709_041_462e-3,
        3.224_671_290_700_398e-1,
        2.445_134_137_142_996,
        3.754_408_661_907_416,
    ];
    const P_LOW: f64 = 0.024_25;
    if p.is_nan() || !(0.0..=1.0).contains(&p) {
        return f64::NAN;
    }
    if p == 0.0 {
        return f64::NEG_INFINITY;
    }
    if p == 1.0 {
        return f64::INFINITY;
    }
    let tail = |q: f64| {
        let r = (-2.0 * q.ln()).sqrt();
        (((((C[0] * r + C[1]) * r + C[2]) * r + C[3]) * r + C[4]) * r + C[5])
            / ((((D[0] * r + D[1]) * r + D[2]) * r + D[3]) * r + 1.0)
    };
    let x = if p < P_LOW {
        tail(p)
    } else if p > 1.0 - P_LOW {
        -tail(1.0 - p)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = normal_cdf(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Minimax power of a level-`alpha` test of `δ = 0` for two samples of size
/// `n` from `N(0, σ²I)` and `N(δ, σ²I)` in dimension `d`:
///
/// ```text
/// φ(α) = Φ( √d / √(d + n‖δ‖²/σ²) · z_α + (‖δ‖²/σ²) / √(8d/n² + 8‖δ‖²/(nσ²)) )
/// ```
///
/// with `z_α` the lower `α` quantile, so `φ(α) = α` when `δ = 0`. The
/// vanishing remainder of the asymptotic expansion is dropped. Arguments
/// outside the domain give `NaN`.
pub fn minimax_power(alpha: f64, d: usize, n: usize, delta_sq: f64, sigma: f64) -> f64 {
    if !(alpha > 0.0 && alpha < 1.0 && d > 0 && n > 0 && delta_sq >= 0.0 && sigma > 0.0) {
        return f64::NAN;
    }
    let (d, n) = (d as f64, n as f64);
    let snr = delta_sq / (sigma * sigma);
    let scale = (d / (d + n * snr)).sqrt();
    let drift = snr / (8.0 * d / (n * n) + 8.0 * snr / n).sqrt();
    normal_cdf(scale * normal_quantile(alpha) + drift)
}

/// `(α, φ(α))` over `alpha_grid` when the scenario is a Gaussian mean shift
/// with equal sample sizes; `None` otherwise.
pub fn minimax_reference(scenario: &ScenarioSpec, alpha_grid: &[f64]) -> Option<Vec<(f64, f64)>> {
    let (sigma, delta_sq) = match &scenario.kind {
        ScenarioKind::MeanShift { sigma, delta } => (*sigma, delta.iter().map(|v| v * v).sum()),
        ScenarioKind::Null => (1.0, 0.0),
        _ => return None,
    };
    if scenario.n != scenario.m {
        return None;
    }
    Some(
        alpha_grid
            .iter()
            .filter(|&&a| a > 0.0 && a < 1.0)
            .map(|&a| (a, minimax_power(a, scenario.d, scenario.n, delta_sq, sigma)))
            .collect(),
    )
}
