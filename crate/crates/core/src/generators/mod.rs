//! Synthetic two-sample scenarios and text ingestion.
//!
//! Every generator takes an [`RngStream`]; the first sample is drawn from
//! `rng.substream(1)` and the second from `rng.substream(2)`, so the two
//! samples are independent and each is reproducible on its own.

mod text;

use std::sync::Arc;

use rand::seq::index;
use rand::Rng;
use rand_distr::{Exp1, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, sample_mvn, sample_precision_mvn, CholeskyFactor};
use crate::matrix::{LabeledDataset, SampleMatrix};
use crate::rng::RngStream;

pub use text::{
    build_doc_term_matrix, load_corpus, load_corpus_csv, load_corpus_dirs, tokenize, DocTermMatrix, Document,
};

/// `N(0, σ²I)` versus `N(δ, σ²I)`.
pub fn gen_mean_shift(
    n: usize,
    m: usize,
    sigma: f64,
    delta: &[f64],
    rng: RngStream,
) -> Result<(SampleMatrix, SampleMatrix)> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::invalid("sigma", "must be positive"));
    }
    let d = delta.len();
    let draw = |count: usize, shift: Option<&[f64]>, stream: RngStream| {
        let mut gen = stream.rng();
        let mut data = Vec::with_capacity(count * d);
        for _ in 0..count {
            for j in 0..d {
                let z: f64 = gen.sample(StandardNormal);
                data.push(sigma * z + shift.map_or(0.0, |s| s[j]));
            }
        }
        SampleMatrix::new(count, d, data)
    };
    Ok((
        draw(n, None, rng.substream(1))?,
        draw(m, Some(delta), rng.substream(2))?,
    ))
}

/// `Σ` with the given diagonal and constant off-diagonal `rho`.
pub fn constant_offdiag_covariance(diag: &[f64], rho: f64) -> Result<SampleMatrix> {
    let d = diag.len();
    let mut data = vec![rho; d * d];
    for (i, &v) in diag.iter().enumerate() {
        data[i * d + i] = v;
    }
    SampleMatrix::new(d, d, data)
}

/// Zero-mean normals sharing a diagonal but differing in the constant off-diagonal.
pub fn gen_cov_diff(
    n: usize,
    m: usize,
    diag: &[f64],
    rho1: f64,
    rho2: f64,
    rng: RngStream,
) -> Result<(SampleMatrix, SampleMatrix)> {
    let chol1 = cholesky(&constant_offdiag_covariance(diag, rho1)?)?;
    let chol2 = cholesky(&constant_offdiag_covariance(diag, rho2)?)?;
    let zero = vec![0.0; diag.len()];
    Ok((
        sample_mvn(&zero, &chol1, n, rng.substream(1))?,
        sample_mvn(&zero, &chol2, m, rng.substream(2))?,
    ))
}

/// `1.0, 1.1, 1.2, …`: the increasing diagonal of the covariance scenario.
pub fn stepped_diagonal(d: usize) -> Vec<f64> {
    (0..d).map(|i| 1.0 + 0.1 * i as f64).collect()
}

/// A pair of Gaussian graphical models built from one random weighted graph.
///
/// `A₁` is symmetric with zero diagonal and `U(0,1)` weights; `A₂` drops each
/// edge of `A₁` (one coin per unordered pair) with probability `τ`. The
/// precisions are the graph Laplacians plus a ridge,
/// `Q_k = (D_k − A_k) + δ_k I`, so both are positive definite.
#[derive(Debug, Clone, PartialEq)]
pub struct GgmPair {
    a1: SampleMatrix,
    a2: SampleMatrix,
    q1: SampleMatrix,
    q2: SampleMatrix,
    chol1: CholeskyFactor,
    chol2: CholeskyFactor,
}

impl GgmPair {
    pub fn new(d: usize, tau: f64, delta1: f64, delta2: f64, rng: RngStream) -> Result<Self> {
        if d < 2 {
            return Err(Error::invalid("d", "a graph needs at least two nodes"));
        }
        if !(0.0..=1.0).contains(&tau) {
            return Err(Error::invalid("tau", "must lie in [0, 1]"));
        }
        if !(delta1 > 0.0 && delta2 > 0.0) {
            return Err(Error::invalid("delta1, delta2", "ridges must be positive"));
        }
        let mut gen = rng.rng();
        let mut a1 = vec![0.0; d * d];
        let mut a2 = vec![0.0; d * d];
        for i in 0..d {
            for j in i + 1..d {
                let w: f64 = gen.random();
                let dropped = gen.random::<f64>() < tau;
                a1[i * d + j] = w;
                a1[j * d + i] = w;
                if !dropped {
                    a2[i * d + j] = w;
                    a2[j * d + i] = w;
                }
            }
        }
        let laplacian = |a: &[f64], ridge: f64| {
            let mut q: Vec<f64> = a.iter().map(|v| -v).collect();
            for i in 0..d {
                q[i * d + i] = a[i * d..(i + 1) * d].iter().sum::<f64>() + ridge;
            }
            SampleMatrix::new(d, d, q)
        };
        let q1 = laplacian(&a1, delta1)?;
        let q2 = laplacian(&a2, delta2)?;
        let chol1 = cholesky(&q1)?;
        let chol2 = cholesky(&q2)?;
        Ok(GgmPair {
            a1: SampleMatrix::new(d, d, a1)?,
            a2: SampleMatrix::new(d, d, a2)?,
            q1,
            q2,
            chol1,
            chol2,
        })
    }

    pub fn dim(&self) -> usize {
        self.a1.rows()
    }

    pub fn adjacency1(&self) -> &SampleMatrix {
        &self.a1
    }

    pub fn adjacency2(&self) -> &SampleMatrix {
        &self.a2
    }

    pub fn precision1(&self) -> &SampleMatrix {
        &self.q1
    }

    pub fn precision2(&self) -> &SampleMatrix {
        &self.q2
    }

    pub fn factor1(&self) -> &CholeskyFactor {
        &self.chol1
    }

    pub fn factor2(&self) -> &CholeskyFactor {
        &self.chol2
    }

    /// `n` draws from `N(0, Q₁⁻¹)` and `m` from `N(0, Q₂⁻¹)`.
    pub fn draw(&self, n: usize, m: usize, rng: RngStream) -> Result<(SampleMatrix, SampleMatrix)> {
        Ok((
            sample_precision_mvn(&self.chol1, n, rng.substream(1))?,
            sample_precision_mvn(&self.chol2, m, rng.substream(2))?,
        ))
    }
}

/// A fresh graph pair from `rng.substream(0)`, then one draw of each sample.
pub fn gen_ggm_pair(
    d: usize,
    tau: f64,
    delta1: f64,
    delta2: f64,
    n: usize,
    m: usize,
    rng: RngStream,
) -> Result<(SampleMatrix, SampleMatrix)> {
    GgmPair::new(d, tau, delta1, delta2, rng.substream(0))?.draw(n, m, rng)
}

/// `Exp(1) × N(1, I)` versus `N(1, I)`: equal means and covariances, different marginals.
pub fn gen_marginal_diff(d: usize, n: usize, m: usize, rng: RngStream) -> Result<(SampleMatrix, SampleMatrix)> {
    if d < 2 {
        return Err(Error::invalid("d", "needs at least two coordinates"));
    }
    let draw = |count: usize, exponential_first: bool, stream: RngStream| {
        let mut gen = stream.rng();
        let mut data = Vec::with_capacity(count * d);
        for _ in 0..count {
            for j in 0..d {
                let v = if j == 0 && exponential_first {
                    gen.sample::<f64, _>(Exp1)
                } else {
                    1.0 + gen.sample::<f64, _>(StandardNormal)
                };
                data.push(v);
            }
        }
        SampleMatrix::new(count, d, data)
    };
    Ok((draw(n, true, rng.substream(1))?, draw(m, false, rng.substream(2))?))
}

/// The data-generating mechanism of a scenario.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioKind {
    /// `N(0, I)` against itself.
    Null,
    MeanShift {
        sigma: f64,
        delta: Vec<f64>,
    },
    CovDiff {
        diag: Vec<f64>,
        rho1: f64,
        rho2: f64,
    },
    Ggm {
        tau: f64,
        delta1: f64,
        delta2: f64,
    },
    MarginalDiff,
    /// Class-wise subsamples of a fixed document-term matrix.
    TextCorpus {
        corpus: Arc<DocTermMatrix>,
    },
}

impl ScenarioKind {
    pub fn name(&self) -> &'static str {
        match self {
            ScenarioKind::Null => "null",
            ScenarioKind::MeanShift { .. } => "mean-shift",
            ScenarioKind::CovDiff { .. } => "cov-diff",
            ScenarioKind::Ggm { .. } => "ggm",
            ScenarioKind::MarginalDiff => "marginal-diff",
            ScenarioKind::TextCorpus { .. } => "text",
        }
    }
}

/// A scenario with its dimension and sample sizes. `n` rows come from the
/// first distribution (label 1) and `m` from the second (label 0).
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioSpec {
    pub kind: ScenarioKind,
    pub d: usize,
    pub n: usize,
    pub m: usize,
}

impl ScenarioSpec {
    pub fn null(d: usize, n: usize, m: usize) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::Null,
            d,
            n,
            m,
        }
    }

    /// Shift `delta1` in the first coordinate only.
    pub fn sparse_shift(d: usize, n: usize, m: usize, sigma: f64, delta1: f64) -> Self {
        let mut delta = vec![0.0; d];
        if let Some(first) = delta.first_mut() {
            *first = delta1;
        }
        ScenarioSpec {
            kind: ScenarioKind::MeanShift { sigma, delta },
            d,
            n,
            m,
        }
    }

    /// The same shift `delta_each` in every coordinate.
    pub fn dense_shift(d: usize, n: usize, m: usize, sigma: f64, delta_each: f64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::MeanShift {
                sigma,
                delta: vec![delta_each; d],
            },
            d,
            n,
            m,
        }
    }

    pub fn cov_diff(d: usize, n: usize, m: usize, rho1: f64, rho2: f64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::CovDiff {
                diag: stepped_diagonal(d),
                rho1,
                rho2,
            },
            d,
            n,
            m,
        }
    }

    pub fn ggm(d: usize, n: usize, m: usize, tau: f64) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::Ggm {
                tau,
                delta1: 0.1,
                delta2: 0.1,
            },
            d,
            n,
            m,
        }
    }

    pub fn marginal_diff(d: usize, n: usize, m: usize) -> Self {
        ScenarioSpec {
            kind: ScenarioKind::MarginalDiff,
            d,
            n,
            m,
        }
    }

    pub fn text(corpus: Arc<DocTermMatrix>, n: usize, m: usize) -> Self {
        let d = corpus.vocabulary().len();
        ScenarioSpec {
            kind: ScenarioKind::TextCorpus { corpus },
            d,
            n,
            m,
        }
    }

    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn with_sizes(&self, n: usize, m: usize) -> Self {
        ScenarioSpec { n, m, ..self.clone() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.d == 0 {
            return Err(Error::invalid("d", "must be positive"));
        }
        if self.n < 2 || self.m < 2 {
            return Err(Error::invalid("n, m", "each sample needs at least two rows"));
        }
        let positive = |v: f64| v > 0.0 && v.is_finite();
        match &self.kind {
            ScenarioKind::Null => Ok(()),
            ScenarioKind::MeanShift { sigma, delta } => {
                if delta.len() != self.d {
                    Err(Error::DimensionMismatch {
                        expected: self.d,
                        found: delta.len(),
                    })
                } else if !positive(*sigma) {
                    Err(Error::invalid("sigma", "must be positive"))
                } else if delta.iter().any(|v| !v.is_finite()) {
                    Err(Error::invalid("delta", "must be finite"))
                } else {
                    Ok(())
                }
            }
            ScenarioKind::CovDiff { diag, rho1, rho2 } => {
                if diag.len() != self.d {
                    Err(Error::DimensionMismatch {
                        expected: self.d,
                        found: diag.len(),
                    })
                } else if !diag.iter().all(|&v| positive(v)) {
                    Err(Error::invalid("diag", "variances must be positive"))
                } else if !(rho1.is_finite() && rho2.is_finite()) {
                    Err(Error::invalid("rho1, rho2", "must be finite"))
                } else {
                    Ok(())
                }
            }
            ScenarioKind::Ggm { tau, delta1, delta2 } => {
                if self.d < 2 {
                    Err(Error::invalid("d", "a graph needs at least two nodes"))
                } else if !(0.0..=1.0).contains(tau) {
                    Err(Error::invalid("tau", "must lie in [0, 1]"))
                } else if !(positive(*delta1) && positive(*delta2)) {
                    Err(Error::invalid("delta1, delta2", "ridges must be positive"))
                } else {
                    Ok(())
                }
            }
            ScenarioKind::MarginalDiff if self.d < 2 => Err(Error::invalid("d", "needs at least two coordinates")),
            ScenarioKind::MarginalDiff => Ok(()),
            ScenarioKind::TextCorpus { corpus } => {
                if corpus.vocabulary().len() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: corpus.vocabulary().len(),
                        found: self.d,
                    });
                }
                let (have1, have0) = corpus.class_counts();
                if self.n > have1 || self.m > have0 {
                    return Err(Error::invalid(
                        "n, m",
                        format!("corpus has {have1} class-1 and {have0} class-0 documents"),
                    ));
                }
                Ok(())
            }
        }
    }

    /// Fixes everything that stays constant across replications (factorizations,
    /// the random graph) using `structure`.
    pub fn prepare(&self, structure: RngStream) -> Result<Scenario> {
        self.validate()?;
        let fixed = match &self.kind {
            ScenarioKind::CovDiff { diag, rho1, rho2 } => Fixed::Cov(
                cholesky(&constant_offdiag_covariance(diag, *rho1)?)?,
                cholesky(&constant_offdiag_covariance(diag, *rho2)?)?,
            ),
            ScenarioKind::Ggm { tau, delta1, delta2 } => {
                Fixed::Ggm(Box::new(GgmPair::new(self.d, *tau, *delta1, *delta2, structure)?))
            }
            _ => Fixed::None,
        };
        Ok(Scenario {
            spec: self.clone(),
            fixed,
        })
    }
}

#[derive(Debug, Clone)]
enum Fixed {
    None,
    Cov(CholeskyFactor, CholeskyFactor),
    Ggm(Box<GgmPair>),
}

/// A prepared scenario: draws fresh samples of any size.
#[derive(Debug, Clone)]
pub struct Scenario {
    spec: ScenarioSpec,
    fixed: Fixed,
}

impl Scenario {
    pub fn spec(&self) -> &ScenarioSpec {
        &self.spec
    }

    pub fn ggm(&self) -> Option<&GgmPair> {
        match &self.fixed {
            Fixed::Ggm(pair) => Some(pair),
            _ => None,
        }
    }

    /// Both samples at the spec's sizes.
    pub fn draw_samples(&self, rng: RngStream) -> Result<(SampleMatrix, SampleMatrix)> {
        self.draw_samples_sized(self.spec.n, self.spec.m, rng)
    }

    pub fn draw_samples_sized(&self, n: usize, m: usize, rng: RngStream) -> Result<(SampleMatrix, SampleMatrix)> {
        let d = self.spec.d;
        match (&self.spec.kind, &self.fixed) {
            (ScenarioKind::Null, _) => gen_mean_shift(n, m, 1.0, &vec![0.0; d], rng),
            (ScenarioKind::MeanShift { sigma, delta }, _) => gen_mean_shift(n, m, *sigma, delta, rng),
            (ScenarioKind::CovDiff { .. }, Fixed::Cov(c1, c2)) => {
                let zero = vec![0.0; d];
                Ok((
                    sample_mvn(&zero, c1, n, rng.substream(1))?,
                    sample_mvn(&zero, c2, m, rng.substream(2))?,
                ))
            }
            (ScenarioKind::Ggm { .. }, Fixed::Ggm(pair)) => pair.draw(n, m, rng),
            (ScenarioKind::MarginalDiff, _) => gen_marginal_diff(d, n, m, rng),
            (ScenarioKind::TextCorpus { corpus }, _) => corpus.subsample(n, m, rng),
            _ => unreachable!("prepare() pairs each kind with its fixed part"),
        }
    }

    /// The pooled, labeled sample at the spec's sizes.
    pub fn draw(&self, rng: RngStream) -> Result<LabeledDataset> {
        self.draw_sized(self.spec.n, self.spec.m, rng)
    }

    pub fn draw_sized(&self, n: usize, m: usize, rng: RngStream) -> Result<LabeledDataset> {
        let (s1, s0) = self.draw_samples_sized(n, m, rng)?;
        LabeledDataset::from_samples(&s1, &s0)
    }
}

impl DocTermMatrix {
    /// `n` class-1 and `m` class-0 documents, drawn without replacement.
    pub fn subsample(&self, n: usize, m: usize, rng: RngStream) -> Result<(SampleMatrix, SampleMatrix)> {
        let pick = |label: u8, count: usize, stream: RngStream| {
            let rows: Vec<usize> = (0..self.labels().len())
                .filter(|&i| self.labels()[i] == label)
                .collect();
            if count > rows.len() {
                return Err(Error::invalid(
                    "n, m",
                    format!(
                        "asked for {count} documents of class {label}, corpus has {}",
                        rows.len()
                    ),
                ));
            }
            let mut chosen: Vec<usize> = index::sample(&mut stream.rng(), rows.len(), count)
                .iter()
                .map(|k| rows[k])
                .collect();
            chosen.sort_unstable();
            self.features().select_rows(&chosen)
        };
        Ok((pick(1, n, rng.substream(1))?, pick(0, m, rng.substream(2))?))
    }
}
