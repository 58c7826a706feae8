use std::path::PathBuf;
use std::sync::Arc;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cptest::generators::{build_doc_term_matrix, load_corpus, stepped_diagonal, ScenarioKind, ScenarioSpec};
use cptest::stats::{Bandwidth, StatisticKind};
use cptest::{ClassifierKind, ClassifierSpec, Mtry};

use crate::CliError;

#[derive(Debug, Parser)]
#[command(
    name = "cptest",
    version,
    about = "Two-sample tests from estimated classification probabilities"
)]
#[command(args_override_self = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Test whether two samples share a distribution
    Test(TestArgs),
    /// ROC curves from replicated tests on simulated data
    BenchRoc(BenchRocArgs),
    /// Power against sample size on simulated data
    BenchPower(BenchPowerArgs),
    /// Write one simulated pair of samples
    Simulate(SimulateArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory
    #[arg(long, default_value = "cptest-out")]
    pub out: PathBuf,
    /// Worker threads (defaults to all cores)
    #[arg(long)]
    pub threads: Option<usize>,
    /// key=value file of default flags; flags on the command line win
    #[arg(long)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StatName {
    Cpt1,
    Cpt2,
    Acc,
    Mmd,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClassifierName {
    Knn,
    Logistic,
    Forest,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScenarioName {
    Null,
    MeanShift,
    CovDiff,
    Ggm,
    MarginalDiff,
    Text,
}

#[derive(Debug, Args)]
pub struct StatArgs {
    #[arg(long, value_enum, default_value = "forest")]
    pub classifier: ClassifierName,
    /// Neighbours for knn
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Ridge penalty for logistic
    #[arg(long, default_value_t = 1.0)]
    pub l2: f64,
    #[arg(long, default_value_t = 500)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-5)]
    pub tol: f64,
    #[arg(long, default_value_t = 500)]
    pub trees: usize,
    /// Features tried per split: `auto` (⌊√d⌋) or a count
    #[arg(long, default_value = "auto")]
    pub mtry: String,
    #[arg(long, default_value_t = 10)]
    pub min_leaf: usize,
    /// Grow every tree on the full sample
    #[arg(long)]
    pub no_bootstrap: bool,
    /// Cross-validation folds for acc
    #[arg(long, default_value_t = 2)]
    pub folds: usize,
    /// Kernel width for mmd: `median` or a positive number
    #[arg(long, default_value = "median")]
    pub bandwidth: String,
    /// Permutations B
    #[arg(long, default_value_t = 200)]
    pub permutations: usize,
    #[arg(long, default_value_t = 0.05)]
    pub alpha: f64,
}

impl StatArgs {
    pub fn classifier(&self, seed: u64) -> Result<ClassifierSpec, CliError> {
        let mtry = match self.mtry.as_str() {
            "auto" => Mtry::Auto,
            v => Mtry::Fixed(
                v.parse()
                    .map_err(|_| CliError::input(format!("--mtry expects `auto` or a count, got {v:?}")))?,
            ),
        };
        let spec = ClassifierSpec {
            kind: match self.classifier {
                ClassifierName::Knn => ClassifierKind::Knn,
                ClassifierName::Logistic => ClassifierKind::Logistic,
                ClassifierName::Forest => ClassifierKind::Forest,
            },
            knn_k: self.k,
            logistic_l2: self.l2,
            logistic_max_iter: self.max_iter,
            logistic_tol: self.tol,
            forest_trees: self.trees,
            forest_mtry: mtry,
            forest_min_leaf: self.min_leaf,
            forest_bootstrap: !self.no_bootstrap,
            seed,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn statistic(&self, name: StatName, seed: u64) -> Result<StatisticKind, CliError> {
        let kind = match name {
            StatName::Cpt1 => StatisticKind::Cpt1 {
                classifier: self.classifier(seed)?,
            },
            StatName::Cpt2 => StatisticKind::Cpt2 {
                classifier: self.classifier(seed)?,
            },
            StatName::Acc => StatisticKind::Acc {
                classifier: self.classifier(seed)?,
                folds: self.folds,
            },
            StatName::Mmd => StatisticKind::Mmd {
                bandwidth: match self.bandwidth.as_str() {
                    "median" => Bandwidth::MedianHeuristic,
                    v => Bandwidth::Fixed(v.parse().map_err(|_| {
                        CliError::input(format!("--bandwidth expects `median` or a number, got {v:?}"))
                    })?),
                },
            },
        };
        kind.validate()?;
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(CliError::input("--alpha must lie in (0, 1)"));
        }
        if self.permutations == 0 {
            return Err(CliError::input("--permutations must be positive"));
        }
        Ok(kind)
    }

    /// Flags that reproduce this configuration.
    pub fn manifest(&self) -> Vec<(&'static str, String)> {
        vec![
            ("classifier", value_name(self.classifier)),
            ("k", self.k.to_string()),
            ("l2", self.l2.to_string()),
            ("max-iter", self.max_iter.to_string()),
            ("tol", self.tol.to_string()),
            ("trees", self.trees.to_string()),
            ("mtry", self.mtry.clone()),
            ("min-leaf", self.min_leaf.to_string()),
            ("no-bootstrap", self.no_bootstrap.to_string()),
            ("folds", self.folds.to_string()),
            ("bandwidth", self.bandwidth.clone()),
            ("permutations", self.permutations.to_string()),
            ("alpha", self.alpha.to_string()),
        ]
    }
}

pub fn value_name(v: impl ValueEnum) -> String {
    v.to_possible_value()
        .expect("no skipped variants")
        .get_name()
        .to_string()
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long, value_enum, default_value = "null")]
    pub scenario: ScenarioName,
    /// Dimension d (ignored for text, which uses the vocabulary size)
    #[arg(long, default_value_t = 10)]
    pub dim: usize,
    /// Rows of the first sample
    #[arg(long, default_value_t = 100)]
    pub n: usize,
    /// Rows of the second sample (defaults to n)
    #[arg(long)]
    pub m: Option<usize>,
    /// Noise scale of the mean-shift scenario
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    /// Mean shift of the first coordinate
    #[arg(long, default_value_t = 0.0)]
    pub shift_first: f64,
    /// Mean shift of every other coordinate
    #[arg(long, default_value_t = 0.0)]
    pub shift_rest: f64,
    /// Off-diagonal covariance of the first sample
    #[arg(long, default_value_t = 0.01)]
    pub rho1: f64,
    /// Off-diagonal covariance of the second sample
    #[arg(long, default_value_t = 0.21)]
    pub rho2: f64,
    /// Probability of dropping each edge of the first graph
    #[arg(long, default_value_t = 0.65)]
    pub tau: f64,
    /// Ridge added to the first graph Laplacian
    #[arg(long, default_value_t = 0.1)]
    pub delta1: f64,
    /// Ridge added to the second graph Laplacian
    #[arg(long, default_value_t = 0.1)]
    pub delta2: f64,
    /// Labeled corpus: a `label,text` CSV or a directory with two class subdirectories
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// Minimum document frequency of a vocabulary term
    #[arg(long, default_value_t = 0.05)]
    pub min_df: f64,
    /// Terms to drop from the vocabulary
    #[arg(long, value_delimiter = ',')]
    pub remove_terms: Vec<String>,
}

impl ScenarioArgs {
    pub fn spec(&self) -> Result<ScenarioSpec, CliError> {
        let (d, n) = (self.dim, self.n);
        let m = self.m.unwrap_or(n);
        let spec = match self.scenario {
            ScenarioName::Null => ScenarioSpec::null(d, n, m),
            ScenarioName::MeanShift => {
                let mut delta = vec![self.shift_rest; d];
                if let Some(first) = delta.first_mut() {
                    *first = self.shift_first;
                }
                ScenarioSpec {
                    kind: ScenarioKind::MeanShift {
                        sigma: self.sigma,
                        delta,
                    },
                    d,
                    n,
                    m,
                }
            }
            ScenarioName::CovDiff => ScenarioSpec {
                kind: ScenarioKind::CovDiff {
                    diag: stepped_diagonal(d),
                    rho1: self.rho1,
                    rho2: self.rho2,
                },
                d,
                n,
                m,
            },
            ScenarioName::Ggm => ScenarioSpec {
                kind: ScenarioKind::Ggm {
                    tau: self.tau,
                    delta1: self.delta1,
                    delta2: self.delta2,
                },
                d,
                n,
                m,
            },
            ScenarioName::MarginalDiff => ScenarioSpec::marginal_diff(d, n, m),
            ScenarioName::Text => {
                let path = self
                    .corpus
                    .as_ref()
                    .ok_or_else(|| CliError::input("--scenario text needs --corpus"))?;
                let corpus = load_corpus(path)?;
                let dtm = build_doc_term_matrix(&corpus, self.min_df, &self.remove_terms)?;
                ScenarioSpec::text(Arc::new(dtm), n, m)
            }
        };
        spec.validate()?;
        Ok(spec)
    }

    /// Flags that reproduce this scenario; parameters of other scenarios are left out.
    pub fn manifest(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("scenario", value_name(self.scenario)),
            ("dim", self.dim.to_string()),
            ("n", self.n.to_string()),
            ("m", self.m.unwrap_or(self.n).to_string()),
        ];
        match self.scenario {
            ScenarioName::MeanShift => out.extend([
                ("sigma", self.sigma.to_string()),
                ("shift-first", self.shift_first.to_string()),
                ("shift-rest", self.shift_rest.to_string()),
            ]),
            ScenarioName::CovDiff => out.extend([("rho1", self.rho1.to_string()), ("rho2", self.rho2.to_string())]),
            ScenarioName::Ggm => out.extend([
                ("tau", self.tau.to_string()),
                ("delta1", self.delta1.to_string()),
                ("delta2", self.delta2.to_string()),
            ]),
            ScenarioName::Text => {
                let corpus = self
                    .corpus
                    .as_ref()
                    .map(|p| p.display().to_string())
                    .unwrap_or_default();
                out.extend([
                    ("corpus", corpus),
                    ("min-df", self.min_df.to_string()),
                    ("remove-terms", self.remove_terms.join(",")),
                ]);
            }
            ScenarioName::Null | ScenarioName::MarginalDiff => {}
        }
        out
    }
}

#[derive(Debug, Args)]
pub struct TestArgs {
    /// Rows of the first sample (label 1)
    #[arg(long, requires = "sample2", conflicts_with = "data")]
    pub sample1: Option<PathBuf>,
    /// Rows of the second sample (label 0)
    #[arg(long, requires = "sample1")]
    pub sample2: Option<PathBuf>,
    /// One file holding both samples and a 0/1 label column
    #[arg(long, requires = "label")]
    pub data: Option<PathBuf>,
    /// Label column of --data: a header name or a 0-based index
    #[arg(long)]
    pub label: Option<String>,
    /// Field separator: `auto`, `comma`, `tab`, `semicolon` or `whitespace`
    #[arg(long, default_value = "auto")]
    pub delimiter: String,
    #[arg(long, value_enum, default_value = "cpt1")]
    pub stat: StatName,
    #[command(flatten)]
    pub stat_args: StatArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BenchRocArgs {
    /// Statistics to compare
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cpt1,cpt2,acc,mmd")]
    pub stat: Vec<StatName>,
    /// Replications R
    #[arg(long, default_value_t = 400)]
    pub replications: usize,
    #[command(flatten)]
    pub stat_args: StatArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct BenchPowerArgs {
    #[arg(long, value_enum, value_delimiter = ',', default_value = "cpt1,cpt2,acc,mmd")]
    pub stat: Vec<StatName>,
    /// Per-sample sizes, increasing
    #[arg(long, value_delimiter = ',', default_value = "50,100,150")]
    pub sizes: Vec<usize>,
    /// Replications per size
    #[arg(long, default_value_t = 250)]
    pub reps: usize,
    #[command(flatten)]
    pub stat_args: StatArgs,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    #[command(flatten)]
    pub common: CommonArgs,
}
