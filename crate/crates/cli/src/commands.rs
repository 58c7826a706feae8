use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use cptest::bench::{
    default_alpha_grid, minimax_reference, power_curve, replication_data_stream, roc_experiment, structure_stream,
    write_power_csv, write_pvalues_csv, write_roc_csv, write_roc_svg, POWER_ALPHA,
};
use cptest::{permutation_test, RngStream, StatisticKind};

use crate::args::{value_name, BenchPowerArgs, BenchRocArgs, CommonArgs, SimulateArgs, StatArgs, StatName, TestArgs};
use crate::io::{read_labeled, read_two_samples, write_file, write_matrix, Delimiter};
use crate::CliError;

fn prepare_out(common: &CommonArgs) -> Result<&Path, CliError> {
    fs::create_dir_all(&common.out).map_err(|e| CliError::input(format!("{}: {e}", common.out.display())))?;
    Ok(&common.out)
}

fn manifest(command: &str, entries: &[(&str, String)]) -> String {
    let mut out = format!("# cptest {command} --config manifest.txt reproduces this run\n");
    for (key, value) in entries {
        let _ = writeln!(out, "{key}={value}");
    }
    out
}

fn statistics(names: &[StatName], stat_args: &StatArgs, seed: u64) -> Result<Vec<StatisticKind>, CliError> {
    if names.is_empty() {
        return Err(CliError::input("--stat needs at least one statistic"));
    }
    names.iter().map(|&s| stat_args.statistic(s, seed)).collect()
}

fn stat_list(names: &[StatName]) -> String {
    names.iter().map(|&s| value_name(s)).collect::<Vec<_>>().join(",")
}

pub fn test(a: &TestArgs) -> Result<(), CliError> {
    let delimiter = Delimiter::parse(&a.delimiter)?;
    let data = match (&a.sample1, &a.sample2, &a.data, &a.label) {
        (Some(p1), Some(p0), None, _) => read_two_samples(p1, p0, delimiter)?,
        (None, None, Some(p), Some(label)) => read_labeled(p, label, delimiter)?,
        _ => return Err(CliError::input("give --sample1 and --sample2, or --data with --label")),
    };
    let seed = a.common.seed;
    let kind = a.stat_args.statistic(a.stat, seed)?;
    let result = permutation_test(
        &data,
        &kind,
        a.stat_args.permutations,
        a.stat_args.alpha,
        RngStream::new(seed, 0),
    )?;
    let mut report = String::new();
    let _ = writeln!(report, "statistic={}", kind.label());
    let _ = writeln!(report, "n={}", data.n());
    let _ = writeln!(report, "m={}", data.m());
    let _ = writeln!(report, "d={}", data.features().cols());
    let _ = writeln!(report, "observed={}", result.observed);
    let _ = writeln!(report, "p_value={}", result.p_value);
    let _ = writeln!(report, "critical_value={}", result.critical_value);
    let _ = writeln!(report, "alpha={}", result.alpha);
    let _ = writeln!(report, "permutations={}", result.num_permutations);
    let _ = writeln!(report, "seed={seed}");
    let _ = writeln!(report, "decision={}", if result.reject() { "reject" } else { "retain" });
    print!("{report}");
    let out = prepare_out(&a.common)?;
    write_file(&out.join("report.txt"), &report)
}

pub fn bench_roc(a: &BenchRocArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let seed = a.common.seed;
    let spec = a.scenario.spec()?;
    let kinds = statistics(&a.stat, &a.stat_args, seed)?;
    let grid = default_alpha_grid();
    let mut records = Vec::with_capacity(kinds.len());
    for kind in &kinds {
        let record = roc_experiment(&spec, kind, a.replications, a.stat_args.permutations, &grid, seed)?;
        let power = record.p_values.iter().filter(|&&p| p <= POWER_ALPHA).count() as f64 / record.p_values.len() as f64;
        println!(
            "{:<16} power@{POWER_ALPHA}={power:.3}  runtime={:.2}s",
            kind.label(),
            record.runtime_seconds
        );
        records.push(record);
    }
    let out = prepare_out(&a.common)?;
    write_roc_csv(&out.join("roc.csv"), &records)?;
    write_pvalues_csv(&out.join("pvalues.csv"), &records, &[])?;
    write_roc_svg(
        &out.join("roc.svg"),
        &records,
        minimax_reference(&spec, &grid).as_deref(),
    )?;
    let mut entries = vec![
        ("seed", seed.to_string()),
        ("stat", stat_list(&a.stat)),
        ("replications", a.replications.to_string()),
    ];
    entries.extend(a.stat_args.manifest());
    entries.extend(a.scenario.manifest());
    write_file(&out.join("manifest.txt"), &manifest("bench-roc", &entries))?;
    println!("total runtime={:.2}s", start.elapsed().as_secs_f64());
    Ok(())
}

pub fn bench_power(a: &BenchPowerArgs) -> Result<(), CliError> {
    let start = Instant::now();
    let seed = a.common.seed;
    let spec = a.scenario.spec()?;
    let kinds = statistics(&a.stat, &a.stat_args, seed)?;
    let mut curves = Vec::with_capacity(kinds.len());
    for kind in &kinds {
        let curve = power_curve(&spec, kind, &a.sizes, a.reps, a.stat_args.permutations, seed)?;
        let points: Vec<String> = curve
            .sample_sizes
            .iter()
            .zip(&curve.powers)
            .map(|(n, p)| format!("{n}:{p:.3}"))
            .collect();
        println!(
            "{:<16} power@{POWER_ALPHA} {}  runtime={:.2}s",
            kind.label(),
            points.join(" "),
            curve.runtime_seconds
        );
        curves.push(curve);
    }
    let out = prepare_out(&a.common)?;
    write_power_csv(&out.join("power.csv"), &curves)?;
    write_pvalues_csv(&out.join("pvalues.csv"), &[], &curves)?;
    let sizes: Vec<String> = a.sizes.iter().map(|s| s.to_string()).collect();
    let mut entries = vec![
        ("seed", seed.to_string()),
        ("stat", stat_list(&a.stat)),
        ("sizes", sizes.join(",")),
        ("reps", a.reps.to_string()),
    ];
    entries.extend(a.stat_args.manifest());
    entries.extend(a.scenario.manifest());
    write_file(&out.join("manifest.txt"), &manifest("bench-power", &entries))?;
    println!("total runtime={:.2}s", start.elapsed().as_secs_f64());
    Ok(())
}

pub fn simulate(a: &SimulateArgs) -> Result<(), CliError> {
    let seed = a.common.seed;
    let spec = a.scenario.spec()?;
    // the data of the first replication of a bench-roc run with this seed
    let scenario = spec.prepare(structure_stream(seed))?;
    let (sample1, sample2) = scenario.draw_samples(replication_data_stream(seed, 0))?;
    let out = prepare_out(&a.common)?;
    write_matrix(&out.join("sample1.csv"), &sample1)?;
    write_matrix(&out.join("sample2.csv"), &sample2)?;
    let mut entries = vec![("seed", seed.to_string())];
    entries.extend(a.scenario.manifest());
    write_file(&out.join("manifest.txt"), &manifest("simulate", &entries))?;
    println!(
        "wrote {} x {} and {} x {} to {}",
        sample1.rows(),
        sample1.cols(),
        sample2.rows(),
        sample2.cols(),
        out.display()
    );
    Ok(())
}
