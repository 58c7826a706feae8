//! CSV and SVG output. Runtimes are left out so that reruns are byte-identical.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use super::{ExperimentRecord, PowerCurve};
use crate::error::{Error, Result};

pub const ROC_HEADER: [&str; 7] = ["alpha", "power", "statistic", "scenario", "R", "B", "seed"];
pub const POWER_HEADER: [&str; 7] = ["n", "power", "statistic", "scenario", "reps", "B", "seed"];
pub const PVALUES_HEADER: [&str; 7] = ["statistic", "scenario", "n", "m", "replication", "p_value", "seed"];

fn io_error(path: &Path) -> impl Fn(csv::Error) -> Error + '_ {
    move |e| Error::Io {
        path: path.to_path_buf(),
        source: std::io::Error::other(e),
    }
}

fn write_csv(path: &Path, header: &[&str], rows: Vec<Vec<String>>) -> Result<()> {
    let mut writer = csv::Writer::from_path(path).map_err(io_error(path))?;
    writer.write_record(header).map_err(io_error(path))?;
    for row in rows {
        writer.write_record(&row).map_err(io_error(path))?;
    }
    writer.flush().map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// One row per record and level.
pub fn write_roc_csv(path: &Path, records: &[ExperimentRecord]) -> Result<()> {
    let rows = records
        .iter()
        .flat_map(|r| {
            r.roc.iter().map(move |(alpha, power)| {
                vec![
                    alpha.to_string(),
                    power.to_string(),
                    r.statistic_kind.label(),
                    r.scenario.name().to_string(),
                    r.replications.to_string(),
                    r.num_permutations.to_string(),
                    r.seed.to_string(),
                ]
            })
        })
        .collect();
    write_csv(path, &ROC_HEADER, rows)
}

/// One row per curve and sample size.
pub fn write_power_csv(path: &Path, curves: &[PowerCurve]) -> Result<()> {
    let rows = curves
        .iter()
        .flat_map(|c| {
            c.sample_sizes.iter().zip(&c.powers).map(move |(n, power)| {
                vec![
                    n.to_string(),
                    power.to_string(),
                    c.statistic_kind.label(),
                    c.scenario.name().to_string(),
                    c.replications.to_string(),
                    c.num_permutations.to_string(),
                    c.seed.to_string(),
                ]
            })
        })
        .collect();
    write_csv(path, &POWER_HEADER, rows)
}

/// Raw p-values of ROC experiments and power curves, one row per replication.
pub fn write_pvalues_csv(path: &Path, records: &[ExperimentRecord], curves: &[PowerCurve]) -> Result<()> {
    let mut rows = Vec::new();
    let mut push = |label: String, scenario: &str, n: usize, m: usize, p_values: &[f64], seed: u64| {
        for (r, p) in p_values.iter().enumerate() {
            rows.push(vec![
                label.clone(),
                scenario.to_string(),
                n.to_string(),
                m.to_string(),
                r.to_string(),
                p.to_string(),
                seed.to_string(),
            ]);
        }
    };
    for r in records {
        push(
            r.statistic_kind.label(),
            r.scenario.name(),
            r.scenario.n,
            r.scenario.m,
            &r.p_values,
            r.seed,
        );
    }
    for c in curves {
        for (size, p) in c.sample_sizes.iter().zip(&c.p_values) {
            push(c.statistic_kind.label(), c.scenario.name(), *size, *size, p, c.seed);
        }
    }
    write_csv(path, &PVALUES_HEADER, rows)
}

const PALETTE: [&str; 8] = [
    "#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666",
];

/// ROC overlay of `records` (which should share a scenario), with the
/// reference curve drawn in black when given.
pub fn roc_svg(records: &[ExperimentRecord], reference: Option<&[(f64, f64)]>) -> String {
    const SIZE: f64 = 400.0;
    const MARGIN: f64 = 50.0;
    let x = |a: f64| MARGIN + a * SIZE;
    let y = |p: f64| MARGIN + (1.0 - p) * SIZE;
    let points = |curve: &[(f64, f64)]| {
        let mut out = format!("{:.2},{:.2}", x(0.0), y(0.0));
        for &(a, p) in curve {
            let _ = write!(out, " {:.2},{:.2}", x(a), y(p));
        }
        out
    };
    let total = SIZE + 2.0 * MARGIN + 160.0;
    let height = SIZE + 2.0 * MARGIN;
    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{total}" height="{height}" font-family="sans-serif" font-size="12">"#
    );
    let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
    let title = records.first().map_or("", |r| r.scenario.name());
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="14">ROC: {title}</text>"#,
        x(0.5)
    );
    let _ = writeln!(
        svg,
        r#"<rect x="{MARGIN}" y="{MARGIN}" width="{SIZE}" height="{SIZE}" fill="none" stroke="black"/>"#
    );
    let _ = writeln!(
        svg,
        r##"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="#999" stroke-dasharray="4 4"/>"##,
        x(0.0),
        y(0.0),
        x(1.0),
        y(1.0)
    );
    for tick in [0.0, 0.25, 0.5, 0.75, 1.0] {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="middle">{tick}</text>"#,
            x(tick),
            y(0.0) + 16.0
        );
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{}" text-anchor="end">{tick}</text>"#,
            x(0.0) - 6.0,
            y(tick) + 4.0
        );
    }
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle">alpha</text>"#,
        x(0.5),
        height - 8.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="14" y="{}" text-anchor="middle" transform="rotate(-90 14 {})">power</text>"#,
        y(0.5),
        y(0.5)
    );
    let mut legend = Vec::new();
    if let Some(curve) = reference {
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="black" stroke-width="2"/>"#,
            points(curve)
        );
        legend.push(("black", "minimax".to_string()));
    }
    for (i, record) in records.iter().enumerate() {
        let color = PALETTE[i % PALETTE.len()];
        let _ = writeln!(
            svg,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="1.5"/>"#,
            points(&record.roc)
        );
        legend.push((color, record.statistic_kind.label()));
    }
    for (i, (color, label)) in legend.iter().enumerate() {
        let top = MARGIN + 10.0 + 18.0 * i as f64;
        let left = x(1.0) + 15.0;
        let _ = writeln!(
            svg,
            r#"<line x1="{left}" y1="{top}" x2="{}" y2="{top}" stroke="{color}" stroke-width="2"/>"#,
            left + 20.0
        );
        let _ = writeln!(svg, r#"<text x="{}" y="{}">{label}</text>"#, left + 26.0, top + 4.0);
    }
    svg.push_str("</svg>\n");
    svg
}

pub fn write_roc_svg(path: &Path, records: &[ExperimentRecord], reference: Option<&[(f64, f64)]>) -> Result<()> {
    let io = |source| Error::Io {
        path: path.to_path_buf(),
        source,
    };
    let mut file = fs::File::create(path).map_err(io)?;
    file.write_all(roc_svg(records, reference).as_bytes()).map_err(io)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classifiers::ClassifierSpec;
    use crate::generators::ScenarioSpec;
    use crate::stats::StatisticKind;

    fn record() -> ExperimentRecord {
        ExperimentRecord {
            scenario: ScenarioSpec::null(2, 5, 5),
            statistic_kind: StatisticKind::Cpt1 {
                classifier: ClassifierSpec::knn(3),
            },
            replications: 4,
            num_permutations: 9,
            seed: 42,
            p_values: vec![0.1, 0.5, 0.2, 1.0],
            alpha_grid: vec![0.05, 0.5],
            roc: vec![(0.05, 0.0), (0.5, 0.75)],
            runtime_seconds: 1.25,
        }
    }

    #[test]
    fn csv_files_have_the_documented_layout() {
        let dir = std::env::temp_dir().join(format!("cptest-report-{}", std::process::id()));
        fs::create_dir_all(&dir).unwrap();
        let roc = dir.join("roc.csv");
        write_roc_csv(&roc, &[record()]).unwrap();
        assert_eq!(
            fs::read_to_string(&roc).unwrap(),
            "alpha,power,statistic,scenario,R,B,seed\n\
             0.05,0,cpt1-knn,null,4,9,42\n\
             0.5,0.75,cpt1-knn,null,4,9,42\n"
        );
        let curve = PowerCurve {
            scenario: ScenarioSpec::null(2, 5, 5),
            statistic_kind: StatisticKind::Mmd {
                bandwidth: crate::stats::Bandwidth::MedianHeuristic,
            },
            sample_sizes: vec![5, 10],
            powers: vec![0.1, 0.3],
            replications: 10,
            num_permutations: 19,
            seed: 1,
            p_values: vec![vec![0.05], vec![0.5]],
            runtime_seconds: 0.0,
        };
        let power = dir.join("power.csv");
        write_power_csv(&power, std::slice::from_ref(&curve)).unwrap();
        assert_eq!(
            fs::read_to_string(&power).unwrap(),
            "n,power,statistic,scenario,reps,B,seed\n5,0.1,mmd,null,10,19,1\n10,0.3,mmd,null,10,19,1\n"
        );
        let pvalues = dir.join("pvalues.csv");
        write_pvalues_csv(&pvalues, &[record()], &[curve]).unwrap();
        let text = fs::read_to_string(&pvalues).unwrap();
        assert_eq!(text.lines().count(), 1 + 4 + 2);
        assert!(text.contains("\nmmd,null,10,10,0,0.5,1\n"));
        fs::remove_dir_all(&dir).unwrap();
    }

    #[test]
    fn svg_lists_every_curve() {
        let svg = roc_svg(&[record()], Some(&[(0.05, 0.3), (0.5, 0.9)]));
        assert!(svg.starts_with("<svg") && svg.ends_with("</svg>\n"));
        assert_eq!(svg.matches("<polyline").count(), 2);
        assert!(svg.contains("cpt1-knn") && svg.contains("minimax"));
    }
}
