//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Random forests use 100 trees here instead of the library default of 500 so
//! the whole run stays within minutes on a single core.

use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::sync::atomic::{AtomicUsize, Ordering};
use std::time::Instant;

use cptest::bench::{minimax_power, roc_experiment};
use cptest::generators::{gen_mean_shift, ScenarioSpec};
use cptest::stats::{statistic_mmd, statistic_u, statistic_w1, Bandwidth, OracleModel};
use cptest::{
    permutation_test_with_model, ClassifierSpec, LabeledDataset, ProbEstimate, ProbabilityModel, RngStream,
    SampleMatrix, StatisticKind,
};

const TREES: usize = 100;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn forest() -> ClassifierSpec {
    ClassifierSpec::forest(TREES)
}

fn type_one_calibration() -> Outcome {
    let scenario = ScenarioSpec::null(10, 50, 50);
    let kinds = [
        StatisticKind::Cpt1 { classifier: forest() },
        StatisticKind::Cpt1 {
            classifier: ClassifierSpec::knn(10),
        },
        StatisticKind::Cpt2 { classifier: forest() },
        StatisticKind::Acc {
            classifier: forest(),
            folds: StatisticKind::DEFAULT_ACC_FOLDS,
        },
        StatisticKind::Mmd {
            bandwidth: Bandwidth::MedianHeuristic,
        },
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, kind) in kinds.iter().enumerate() {
        let record = roc_experiment(&scenario, kind, 200, 99, &[0.05], 1000 + i as u64).unwrap();
        let rate = record.roc[0].1;
        pass &= (0.013..=0.105).contains(&rate);
        parts.push(format!("{}={rate:.3}", kind.label()));
    }
    outcome(
        pass,
        format!("rejection at 0.05 in [0.013, 0.105]: {}", parts.join(" ")),
    )
}

fn oracle_identity() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..50u64 {
        // sizes cycle through unbalanced and balanced designs
        let n = 5 + (i as usize * 37) % 120;
        let m = 5 + (i as usize * 53) % 90;
        // the shifted second sample is the one drawn from f
        let (_, class1) = gen_mean_shift(m, n, 1.0, &[1.0], RngStream::new(i, 2)).unwrap();
        let pi = n as f64 / (n + m) as f64;
        let oracle = OracleModel::gaussian_shift(vec![1.0], vec![0.0], 1.0, pi).unwrap();
        let probs: Vec<f64> = class1.iter_rows().map(|x| oracle.probability(x)).collect();
        let w1 = statistic_w1(&probs, n, m).unwrap();
        // log N(x; 1, 1) − log N(x; 0, 1) = x − 1/2
        let direct = class1.iter_rows().map(|x| x[0] - 0.5).sum::<f64>() / n as f64;
        worst = worst.max((w1 - direct).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |W1 - mean log f/g| over 50 datasets = {worst:.2e}"),
    )
}

fn kl_convergence() -> Outcome {
    let n = 100_000;
    let (_, class1) = gen_mean_shift(2, n, 1.0, &[1.0], RngStream::new(7, 3)).unwrap();
    let oracle = OracleModel::gaussian_shift(vec![1.0], vec![0.0], 1.0, 0.5).unwrap();
    let u = statistic_u(&oracle, &class1).unwrap();
    let ratios: Vec<f64> = class1.iter_rows().map(|x| oracle.log_f(x) - oracle.log_g(x)).collect();
    let mean = ratios.iter().sum::<f64>() / n as f64;
    let sd = (ratios.iter().map(|r| (r - mean) * (r - mean)).sum::<f64>() / (n - 1) as f64).sqrt();
    let band = 3.0 * sd / (n as f64).sqrt();
    let gap = (u - 0.5).abs();
    outcome(gap <= band, format!("U={u:.5}, |U - 0.5|={gap:.5} <= {band:.5}"))
}

fn minimax_respect() -> Outcome {
    let (d, n, sigma, delta1) = (20, 50, 2.0, 1.6);
    let replications = 200;
    let scenario = ScenarioSpec::sparse_shift(d, n, n, sigma, delta1);
    let kind = StatisticKind::Cpt1 {
        classifier: ClassifierSpec::logistic(1.0),
    };
    let grid = [0.05, 0.1, 0.2];
    let record = roc_experiment(&scenario, &kind, replications, 99, &grid, 2024).unwrap();
    let mut pass = true;
    let mut parts = Vec::new();
    for &(alpha, power) in &record.roc {
        let phi = minimax_power(alpha, d, n, delta1 * delta1, sigma);
        let ceiling = phi + 3.0 * (phi * (1.0 - phi) / replications as f64).sqrt();
        pass &= power <= ceiling;
        parts.push(format!("a={alpha}: {power:.3}<={ceiling:.3}"));
        if alpha == 0.2 {
            pass &= power >= 0.5 * phi;
            parts.push(format!("floor {:.3}", 0.5 * phi));
        }
    }
    outcome(pass, parts.join(", "))
}

fn marginal_separation() -> Outcome {
    let scenario = ScenarioSpec::marginal_diff(20, 150, 150);
    let power = |kind: StatisticKind, seed| roc_experiment(&scenario, &kind, 100, 99, &[0.05], seed).unwrap().roc[0].1;
    let cpt = power(StatisticKind::Cpt1 { classifier: forest() }, 31);
    let mmd = power(
        StatisticKind::Mmd {
            bandwidth: Bandwidth::MedianHeuristic,
        },
        32,
    );
    outcome(
        cpt - mmd >= 0.2 && mmd < 0.15,
        format!("cpt1-forest={cpt:.3}, mmd={mmd:.3}"),
    )
}

fn brute_force_mmd(x: &SampleMatrix, y: &SampleMatrix, sigma: f64) -> f64 {
    let k = |a: &[f64], b: &[f64]| {
        let d2: f64 = a.iter().zip(b).map(|(p, q)| (p - q).powi(2)).sum();
        (-d2 / (2.0 * sigma * sigma)).exp()
    };
    let (n, m) = (x.rows(), y.rows());
    let mut xx = 0.0;
    for i in 0..n {
        for j in 0..n {
            if i != j {
                xx += k(x.row(i), x.row(j));
            }
        }
    }
    let mut yy = 0.0;
    for i in 0..m {
        for j in 0..m {
            if i != j {
                yy += k(y.row(i), y.row(j));
            }
        }
    }
    let mut xy = 0.0;
    for i in 0..n {
        for j in 0..m {
            xy += k(x.row(i), y.row(j));
        }
    }
    let (n, m) = (n as f64, m as f64);
    xx / (n * (n - 1.0)) + yy / (m * (m - 1.0)) - 2.0 * xy / (n * m)
}

fn mmd_equivalence() -> Outcome {
    let mut worst: f64 = 0.0;
    for i in 0..20u64 {
        let n = 2 + (i as usize) % 4;
        let m = 2 + (i as usize * 3) % 4;
        let d = 1 + (i as usize) % 3;
        let sigma = 0.5 + 0.25 * (i % 5) as f64;
        let shift = vec![0.3; d];
        let (x, y) = gen_mean_shift(n, m, 1.0, &shift, RngStream::new(i, 6)).unwrap();
        let fast = statistic_mmd(&y, &x, Bandwidth::Fixed(sigma)).unwrap();
        worst = worst.max((fast - brute_force_mmd(&y, &x, sigma)).abs());
    }
    outcome(
        worst <= 1e-12,
        format!("max |MMD - brute force| over 20 instances = {worst:.2e}"),
    )
}

struct Spy {
    inner: ClassifierSpec,
    fits: AtomicUsize,
}

impl ProbabilityModel for Spy {
    fn fit_predict_proba(&self, train: &LabeledDataset, eval: &SampleMatrix) -> cptest::Result<ProbEstimate> {
        self.fits.fetch_add(1, Ordering::SeqCst);
        self.inner.fit_predict_proba(train, eval)
    }

    fn name(&self) -> String {
        "spy".into()
    }
}

fn fit_accounting() -> Outcome {
    let (x, y) = gen_mean_shift(20, 25, 1.0, &[0.5, 0.0], RngStream::new(9, 9)).unwrap();
    let data = LabeledDataset::from_samples(&y, &x).unwrap();
    let permutations = 49;
    let folds = 2;
    let cases = [
        (StatisticKind::Cpt1 { classifier: forest() }, 1),
        (StatisticKind::Cpt2 { classifier: forest() }, 1),
        // one cross-validated evaluation is `folds` fits
        (
            StatisticKind::Acc {
                classifier: forest(),
                folds,
            },
            folds,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for (kind, fits_per_evaluation) in cases {
        let spy = Spy {
            inner: ClassifierSpec::forest(10),
            fits: AtomicUsize::new(0),
        };
        permutation_test_with_model(&data, &kind, &spy, permutations, 0.05, RngStream::new(4, 0)).unwrap();
        let fits = spy.fits.load(Ordering::SeqCst);
        pass &= fits == (permutations + 1) * fits_per_evaluation;
        parts.push(format!("{}={fits}", kind.tag()));
    }
    outcome(
        pass,
        format!(
            "B={permutations}: fits {} (B+1 evaluations; acc evaluations are {folds}-fold)",
            parts.join(" ")
        ),
    )
}

fn run_cli(args: &[&str], out: &Path, threads: usize) -> Vec<(String, Vec<u8>)> {
    let status = Command::new(env!("CARGO_BIN_EXE_cptest"))
        .args(args)
        .arg("--threads")
        .arg(threads.to_string())
        .arg("--out")
        .arg(out)
        .output()
        .unwrap();
    assert!(status.status.success(), "{}", String::from_utf8_lossy(&status.stderr));
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|x| x == "csv"))
        .map(|p| {
            (
                p.file_name().unwrap().to_string_lossy().into_owned(),
                fs::read(&p).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn thread_determinism() -> Outcome {
    let roc = [
        "bench-roc",
        "--scenario",
        "mean-shift",
        "--dim",
        "6",
        "--n",
        "20",
        "--shift-first",
        "0.8",
        "--stat",
        "cpt1,cpt2,acc,mmd",
        "--trees",
        "25",
        "--replications",
        "16",
        "--permutations",
        "29",
        "--seed",
        "77",
    ];
    let power = [
        "bench-power",
        "--scenario",
        "ggm",
        "--dim",
        "8",
        "--sizes",
        "10,20",
        "--stat",
        "cpt1,mmd",
        "--classifier",
        "knn",
        "--reps",
        "12",
        "--permutations",
        "29",
        "--seed",
        "78",
    ];
    let mut pass = true;
    let mut compared = 0;
    for args in [&roc[..], &power[..]] {
        let reference = tempfile::tempdir().unwrap();
        let expected = run_cli(args, reference.path(), 1);
        for threads in [1, 2, 4] {
            let dir = tempfile::tempdir().unwrap();
            let got = run_cli(args, dir.path(), threads);
            pass &= got == expected;
            compared += got.len();
        }
    }
    outcome(
        pass,
        format!("{compared} CSV files from reruns at --threads 1, 2, 4 match the first run byte for byte"),
    )
}

fn main() -> ExitCode {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("type-I calibration", type_one_calibration),
        ("oracle identity", oracle_identity),
        ("KL convergence", kl_convergence),
        ("minimax bound", minimax_respect),
        ("marginal separation", marginal_separation),
        ("MMD brute force", mmd_equivalence),
        ("fit accounting", fit_accounting),
        ("thread determinism", thread_determinism),
    ];
    let mut failures = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let result = check();
        let verdict = if result.pass { "PASS" } else { "FAIL" };
        failures += usize::from(!result.pass);
        println!(
            "criterion {} {verdict} {name}: {} ({:.1}s)",
            i + 1,
            result.detail,
            start.elapsed().as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
