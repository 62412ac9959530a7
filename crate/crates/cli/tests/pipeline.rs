use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

use imbdes::eval::Metric;
use imbdes_bench::records::{ResultRecord, ResultsFile, RESULTS_FILE};
use imbdes_bench::{make_report, run_experiment, BenchError, RunConfig};

fn wine() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/keel/wine.dat")
}

fn small_config(out: &Path) -> String {
    format!(
        "datasets = [{:?}]\nvariants = [\"Ba\", \"Ba-SM\"]\nselectors = [\"KNU\", \"STATIC\", \"DESP\"]\npool_size = 5\nseed = 3\noutput = {:?}\n",
        wine().display().to_string(),
        out.display().to_string()
    )
}

#[test]
fn small_grid_writes_180_records_and_resumes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let plan = RunConfig::from_toml(&small_config(&out)).unwrap().validate().unwrap();
    let first = run_experiment(&plan).unwrap();
    assert_eq!(first.records_written, 180);
    assert_eq!(first.units_run, 20);
    assert!(first.failures.is_empty());
    let path = out.join(RESULTS_FILE);
    let full = fs::read_to_string(&path).unwrap();

    let again = run_experiment(&plan).unwrap();
    assert_eq!((again.records_written, again.units_skipped), (0, 20));
    assert_eq!(fs::read_to_string(&path).unwrap(), full);

    // lose the last unit's tail, including half a line
    let keep: Vec<&str> = full.lines().collect();
    let cut = keep.len() - 4;
    let mut truncated = keep[..cut].join("\n");
    truncated.push('\n');
    truncated.push_str(&keep[cut][..10]);
    fs::write(&path, truncated).unwrap();
    let resumed = run_experiment(&plan).unwrap();
    assert_eq!(resumed.units_run, 1);
    assert_eq!(resumed.records_written, 4);
    let strip = |r: &ResultRecord| (r.dataset.clone(), r.variant.clone(), r.selector.clone(), r.replication, r.fold, r.metric.clone(), r.value.to_bits());
    let mut before: Vec<_> = ResultsFile::parse(&full).unwrap().records.iter().map(strip).collect();
    let mut after: Vec<_> = ResultsFile::read(&path).unwrap().records.iter().map(strip).collect();
    before.sort();
    after.sort();
    assert_eq!(before, after);
}

#[test]
fn unknown_selector_fails_before_any_work() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let text = small_config(&out).replace("\"DESP\"", "\"KNORA-X\"");
    let err = RunConfig::from_toml(&text).unwrap().validate().unwrap_err();
    assert!(matches!(err, BenchError::Validation(_)));
    assert!(!out.exists());
}

#[test]
fn changed_config_refuses_existing_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let plan = RunConfig::from_toml(&small_config(&out).replace("[\"Ba\", \"Ba-SM\"]", "[\"Ba\"]")).unwrap().validate().unwrap();
    run_experiment(&plan).unwrap();
    let other = RunConfig::from_toml(&small_config(&out)).unwrap().validate().unwrap();
    assert!(matches!(run_experiment(&other), Err(BenchError::Validation(_))));
}

fn grid(values: &[(&str, &str, &str, f64)]) -> Vec<ResultRecord> {
    let mut out = Vec::new();
    for &(d, v, s, value) in values {
        for rep in 1..=5u8 {
            for fold in ['A', 'B'] {
                // fold scores vary but average to `value`
                let shift = if fold == 'A' { 0.01 } else { -0.01 };
                out.push(ResultRecord {
                    dataset: d.into(),
                    variant: v.into(),
                    selector: s.into(),
                    replication: rep,
                    fold,
                    metric: "gmean".into(),
                    value: value + shift,
                    wall_time_ms: 1,
                });
            }
        }
    }
    out
}

#[test]
fn report_matches_hand_built_expectation() {
    // per dataset: Ba-SM > Ba-RM > Ba for KNU; STATIC prefers Ba-RM on two of three
    let mut values = Vec::new();
    for (d, knu, stat) in [
        ("d1", [0.5, 0.6, 0.7], [0.4, 0.5, 0.3]),
        ("d2", [0.4, 0.5, 0.8], [0.4, 0.6, 0.5]),
        ("d3", [0.1, 0.2, 0.3], [0.6, 0.2, 0.4]),
    ] {
        for (i, v) in ["Ba", "Ba-RM", "Ba-SM"].into_iter().enumerate() {
            values.push((d, v, "KNU", knu[i]));
            values.push((d, v, "STATIC", stat[i]));
        }
    }
    let report = make_report(&grid(&values), Metric::GMean).unwrap();
    let (name, knu) = &report.by_selector.iter().find(|(s, _)| s == "KNU").unwrap();
    assert_eq!(name, "KNU");
    assert_eq!(knu.methods, vec!["Ba", "Ba-RM", "Ba-SM"]);
    assert_eq!(knu.average_ranks, vec![3.0, 2.0, 1.0]);
    assert_eq!(knu.best, 2);
    let (_, stat) = report.by_selector.iter().find(|(s, _)| s == "STATIC").unwrap();
    // d1: RM 1, Ba 2, SM 3; d2: RM 1, SM 2, Ba 3; d3: Ba 1, SM 2, RM 3
    assert_eq!(stat.average_ranks, vec![2.0, 5.0 / 3.0, 7.0 / 3.0]);
    assert_eq!(stat.best, 1);
    // global: Ba-SM KNU (0.7, 0.8, 0.3) vs Ba-RM STATIC (0.5, 0.6, 0.2)
    assert_eq!(report.global.methods, vec!["Ba-RM STATIC", "Ba-SM KNU"]);
    assert_eq!(report.global.average_ranks, vec![2.0, 1.0]);
    let vs_static = report.sign_tests.iter().find(|r| r.selector == "KNU" && r.baseline == "Ba-RM STATIC").unwrap();
    assert_eq!((vs_static.wins, vs_static.ties, vs_static.losses), (3, 0, 0));
    assert_eq!(vs_static.significant, [false, false, false]);
    let text = report.render();
    assert!(text.contains("**1.00**"));
}

#[test]
fn report_lists_missing_cells() {
    let mut records = grid(&[("d1", "Ba", "KNU", 0.5), ("d1", "Ba-SM", "KNU", 0.6)]);
    records.retain(|r| !(r.variant == "Ba-SM" && r.replication == 4));
    match make_report(&records, Metric::GMean) {
        Err(BenchError::IncompleteGrid(cells)) => assert_eq!(cells, vec!["d1 / Ba-SM / KNU: missing folds 4A 4B"]),
        other => panic!("{other:?}"),
    }
}

#[test]
fn binary_validates_runs_and_reports() {
    let dir = tempfile::tempdir().unwrap();
    let bin = env!("CARGO_BIN_EXE_imbdes");
    let good = dir.path().join("good.toml");
    fs::write(&good, small_config(Path::new("out")).replace("[\"Ba\", \"Ba-SM\"]", "[\"Ba\"]")).unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(&bad, small_config(Path::new("out")).replace("\"KNU\"", "\"NOPE\"")).unwrap();

    assert_eq!(Command::new(bin).args(["validate", "--config"]).arg(&bad).status().unwrap().code(), Some(1));
    assert!(Command::new(bin).args(["validate", "--config"]).arg(&good).status().unwrap().success());
    assert!(Command::new(bin).args(["run", "--config"]).arg(&good).status().unwrap().success());
    let report = Command::new(bin)
        .args(["report", "--metric", "auc", "--input"])
        .arg(dir.path().join("out"))
        .output()
        .unwrap();
    assert!(report.status.success());
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.contains("metric: auc"));
    assert!(text.contains("DESP"));
}
