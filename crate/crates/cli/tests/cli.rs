use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn cptest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cptest"))
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests").join(name)
}

fn run(args: &[&str]) -> Output {
    cptest().args(args).output().expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "{args:?} failed: {}", stderr(&out));
    out
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn same_file_twice_matches_the_golden_report() {
    let dir = tempfile::tempdir().unwrap();
    let sample = fixture("data/sample.csv");
    let out = ok(&[
        "test",
        "--sample1",
        path_str(&sample),
        "--sample2",
        path_str(&sample),
        "--stat",
        "cpt1",
        "--permutations",
        "99",
        "--seed",
        "5",
        "--out",
        path_str(dir.path()),
    ]);
    let golden = fs::read_to_string(fixture("golden/same_file_cpt1.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    assert_eq!(fs::read_to_string(dir.path().join("report.txt")).unwrap(), golden);
}

#[test]
fn labeled_file_with_header_gives_the_same_statistic_as_two_files() {
    let dir = tempfile::tempdir().unwrap();
    let labeled = dir.path().join("labeled.tsv");
    let sample = fs::read_to_string(fixture("data/sample.csv")).unwrap();
    let mut text = String::from("x\ty\tgroup\n");
    for (label, line) in [(1, &sample), (0, &sample)]
        .iter()
        .flat_map(|(l, s)| s.lines().map(move |x| (*l, x)))
    {
        text.push_str(&format!("{}\t{label}\n", line.replace(',', "\t")));
    }
    fs::write(&labeled, text).unwrap();
    let out = ok(&[
        "test",
        "--data",
        path_str(&labeled),
        "--label",
        "group",
        "--permutations",
        "99",
        "--seed",
        "5",
        "--out",
        path_str(dir.path()),
    ]);
    let golden = fs::read_to_string(fixture("golden/same_file_cpt1.txt")).unwrap();
    assert_eq!(String::from_utf8(out.stdout).unwrap(), golden);
    // a 0-based column index works too
    let by_index = ok(&[
        "test",
        "--data",
        path_str(&labeled),
        "--label",
        "2",
        "--permutations",
        "99",
        "--seed",
        "5",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(String::from_utf8(by_index.stdout).unwrap(), golden);
}

#[test]
fn mismatched_widths_exit_with_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let narrow = dir.path().join("narrow.csv");
    fs::write(&narrow, "1\n2\n3\n").unwrap();
    let sample = fixture("data/sample.csv");
    let out = run(&[
        "test",
        "--sample1",
        path_str(&sample),
        "--sample2",
        path_str(&narrow),
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr(&out);
    assert!(message.contains("2 columns") && message.contains("has 1"), "{message}");
}

#[test]
fn single_class_data_is_a_contract_violation() {
    let dir = tempfile::tempdir().unwrap();
    let labeled = dir.path().join("one_class.csv");
    fs::write(&labeled, "x,label\n0.1,1\n0.2,1\n0.3,1\n0.4,0\n").unwrap();
    let out = run(&[
        "test",
        "--data",
        path_str(&labeled),
        "--label",
        "label",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
}

#[test]
fn unreadable_and_malformed_inputs_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.csv");
    fs::write(&bad, "1,2\n3,oops\n").unwrap();
    let sample = fixture("data/sample.csv");
    for args in [
        vec!["test", "--sample1", path_str(&bad), "--sample2", path_str(&sample)],
        vec!["test", "--sample1", "/no/such/file", "--sample2", path_str(&sample)],
        vec![
            "test",
            "--sample1",
            path_str(&sample),
            "--sample2",
            path_str(&sample),
            "--alpha",
            "1.5",
        ],
        vec![
            "test",
            "--sample1",
            path_str(&sample),
            "--sample2",
            path_str(&sample),
            "--k",
            "0",
        ],
    ] {
        let mut args = args;
        args.extend(["--out", path_str(dir.path())]);
        assert_eq!(run(&args).status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn unknown_statistic_lists_the_valid_names() {
    let out = run(&["bench-roc", "--stat", "cpt1,svm"]);
    assert_eq!(out.status.code(), Some(2));
    let message = stderr(&out);
    for name in ["cpt1", "cpt2", "acc", "mmd"] {
        assert!(message.contains(name), "{message}");
    }
}

#[test]
fn simulate_writes_full_sized_mean_shift_samples() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--scenario",
        "mean-shift",
        "--dim",
        "100",
        "--n",
        "100",
        "--sigma",
        "2",
        "--shift-first",
        "1.6",
        "--out",
        path_str(dir.path()),
    ]);
    for file in ["sample1.csv", "sample2.csv"] {
        let text = fs::read_to_string(dir.path().join(file)).unwrap();
        assert_eq!(text.lines().count(), 100);
        assert!(text.lines().all(|l| l.split(',').count() == 100));
    }
}

#[test]
fn simulate_is_byte_identical_for_a_seed() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        ok(&[
            "simulate",
            "--scenario",
            "cov-diff",
            "--dim",
            "5",
            "--n",
            "30",
            "--seed",
            "17",
            "--out",
            path_str(dir.path()),
        ]);
    }
    for file in ["sample1.csv", "sample2.csv", "manifest.txt"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap()
        );
    }
}

#[test]
fn ggm_manifest_records_the_graph_parameters_and_reruns() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--scenario",
        "ggm",
        "--dim",
        "200",
        "--n",
        "10",
        "--tau",
        "0.65",
        "--seed",
        "3",
        "--out",
        path_str(dir.path()),
    ]);
    let manifest = fs::read_to_string(dir.path().join("manifest.txt")).unwrap();
    for line in [
        "tau=0.65",
        "delta1=0.1",
        "delta2=0.1",
        "seed=3",
        "dim=200",
        "scenario=ggm",
    ] {
        assert!(manifest.lines().any(|l| l == line), "{line} missing from\n{manifest}");
    }
    let rerun = tempfile::tempdir().unwrap();
    let config = dir.path().join("manifest.txt");
    ok(&[
        "simulate",
        "--config",
        path_str(&config),
        "--out",
        path_str(rerun.path()),
    ]);
    for file in ["sample1.csv", "sample2.csv", "manifest.txt"] {
        assert_eq!(
            fs::read(dir.path().join(file)).unwrap(),
            fs::read(rerun.path().join(file)).unwrap()
        );
    }
}

#[test]
fn mmd_on_marginal_difference_reports_a_valid_p_value() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "simulate",
        "--scenario",
        "marginal-diff",
        "--dim",
        "20",
        "--n",
        "100",
        "--out",
        path_str(dir.path()),
    ]);
    let out = ok(&[
        "test",
        "--sample1",
        path_str(&dir.path().join("sample1.csv")),
        "--sample2",
        path_str(&dir.path().join("sample2.csv")),
        "--stat",
        "mmd",
        "--permutations",
        "99",
        "--out",
        path_str(dir.path()),
    ]);
    let report = String::from_utf8(out.stdout).unwrap();
    let p: f64 = report
        .lines()
        .find_map(|l| l.strip_prefix("p_value="))
        .unwrap()
        .parse()
        .unwrap();
    assert!((0.01..=1.0).contains(&p), "{p}");
}

fn bench_roc_args<'a>(out: &'a Path, threads: &'a str) -> Vec<&'a str> {
    vec![
        "bench-roc",
        "--scenario",
        "ggm",
        "--dim",
        "5",
        "--n",
        "15",
        "--stat",
        "cpt1,cpt2,acc,mmd",
        "--classifier",
        "forest",
        "--trees",
        "20",
        "--replications",
        "12",
        "--permutations",
        "19",
        "--seed",
        "8",
        "--threads",
        threads,
        "--out",
        path_str(out),
    ]
}

#[test]
fn bench_roc_outputs_do_not_depend_on_the_thread_count() {
    let one = tempfile::tempdir().unwrap();
    let three = tempfile::tempdir().unwrap();
    ok(&bench_roc_args(one.path(), "1"));
    ok(&bench_roc_args(three.path(), "3"));
    for file in ["roc.csv", "pvalues.csv", "roc.svg", "manifest.txt"] {
        assert_eq!(
            fs::read(one.path().join(file)).unwrap(),
            fs::read(three.path().join(file)).unwrap(),
            "{file}"
        );
    }
    let roc = fs::read_to_string(one.path().join("roc.csv")).unwrap();
    assert!(roc.starts_with("alpha,power,statistic,scenario,R,B,seed\n"));
    assert_eq!(roc.lines().count(), 1 + 4 * 100);
    let pvalues = fs::read_to_string(one.path().join("pvalues.csv")).unwrap();
    assert_eq!(pvalues.lines().count(), 1 + 4 * 12);
}

#[test]
fn manifest_replays_a_bench_run_and_flags_override_it() {
    let first = tempfile::tempdir().unwrap();
    ok(&[
        "bench-roc",
        "--scenario",
        "mean-shift",
        "--dim",
        "3",
        "--n",
        "12",
        "--shift-first",
        "1",
        "--stat",
        "cpt1,mmd",
        "--classifier",
        "logistic",
        "--replications",
        "6",
        "--permutations",
        "19",
        "--seed",
        "2",
        "--out",
        path_str(first.path()),
    ]);
    let manifest = first.path().join("manifest.txt");
    let replay = tempfile::tempdir().unwrap();
    ok(&[
        "bench-roc",
        "--config",
        path_str(&manifest),
        "--out",
        path_str(replay.path()),
    ]);
    for file in ["roc.csv", "pvalues.csv", "manifest.txt"] {
        assert_eq!(
            fs::read(first.path().join(file)).unwrap(),
            fs::read(replay.path().join(file)).unwrap(),
            "{file}"
        );
    }
    let changed = tempfile::tempdir().unwrap();
    ok(&[
        "bench-roc",
        "--config",
        path_str(&manifest),
        "--seed",
        "3",
        "--out",
        path_str(changed.path()),
    ]);
    let text = fs::read_to_string(changed.path().join("manifest.txt")).unwrap();
    assert!(text.lines().any(|l| l == "seed=3"));
    assert!(text.lines().any(|l| l == "classifier=logistic"));
}

#[test]
fn bench_power_writes_one_row_per_size_and_statistic() {
    let dir = tempfile::tempdir().unwrap();
    ok(&[
        "bench-power",
        "--scenario",
        "cov-diff",
        "--dim",
        "20",
        "--sizes",
        "50,100,150",
        "--stat",
        "cpt1,mmd",
        "--classifier",
        "logistic",
        "--reps",
        "20",
        "--permutations",
        "19",
        "--seed",
        "4",
        "--out",
        path_str(dir.path()),
    ]);
    let text = fs::read_to_string(dir.path().join("power.csv")).unwrap();
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 6);
    for stat in ["cpt1-logistic", "mmd"] {
        let sizes: Vec<&str> = rows.iter().filter(|r| r[2] == stat).map(|r| r[0]).collect();
        assert_eq!(sizes, ["50", "100", "150"]);
    }
    let cpt: Vec<f64> = rows
        .iter()
        .filter(|r| r[2] == "cpt1-logistic")
        .map(|r| r[1].parse().unwrap())
        .collect();
    // a linear classifier cannot see a covariance change, so only the range is checked
    assert!(cpt.iter().all(|p| (0.0..=1.0).contains(p)), "{cpt:?}");
}

#[test]
fn text_scenario_runs_from_a_corpus_file() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("reviews.csv");
    let mut text = String::from("label,text\n");
    for i in 0..30 {
        let (label, word) = if i % 2 == 0 { (1, "great") } else { (0, "dull") };
        text.push_str(&format!("{label},\"the film was {word}, take {}\"\n", i % 3));
    }
    fs::write(&corpus, text).unwrap();
    let out = ok(&[
        "bench-roc",
        "--scenario",
        "text",
        "--corpus",
        path_str(&corpus),
        "--min-df",
        "0.2",
        "--n",
        "10",
        "--stat",
        "cpt1",
        "--classifier",
        "knn",
        "--k",
        "3",
        "--replications",
        "4",
        "--permutations",
        "19",
        "--out",
        path_str(dir.path()),
    ]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("cpt1-knn"));
    let roc = fs::read_to_string(dir.path().join("roc.csv")).unwrap();
    // "great" against "dull" separates perfectly, so every p-value sits at the floor
    assert!(roc.lines().any(|l| l.starts_with("0.05,1,cpt1-knn,text")), "{roc}");
    let with_removal = run(&[
        "bench-roc",
        "--scenario",
        "text",
        "--corpus",
        path_str(&corpus),
        "--min-df",
        "0.9",
        "--remove-terms",
        "the,film,was,take",
        "--n",
        "10",
        "--replications",
        "2",
        "--permutations",
        "9",
        "--out",
        path_str(dir.path()),
    ]);
    assert_eq!(with_removal.status.code(), Some(3), "{}", stderr(&with_removal));
}
