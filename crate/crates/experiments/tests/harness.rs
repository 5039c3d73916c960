use std::fs;
use std::path::Path;
use std::process::Command;

use sppa_core::Execution;
use sppa_experiments::output::TRACE_COLUMNS;
use sppa_experiments::{
    compare_methods, run_experiment, ExperimentConfig, ExperimentError, RunOptions,
};

const LEAST_SQUARES: &str = r#"
[experiment]
problem = "least-squares"
iterations = 500
seeds = [3, 1, 2]

[space]
dimension = 3

[generator]
count = 8
seed = 7
range = 2.0
noise = 0.05
"#;

fn config(text: &str, out: &Path) -> ExperimentConfig {
    let mut c = ExperimentConfig::from_toml(text).unwrap();
    c.experiment.output = Some(out.to_path_buf());
    c
}

fn data_lines(path: &Path) -> Vec<String> {
    let text = fs::read_to_string(path).unwrap();
    text.lines().skip(2).map(str::to_owned).collect()
}

fn sorted_entries(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

#[test]
fn three_seeds_write_three_traces_and_a_summary() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(LEAST_SQUARES, dir.path()), RunOptions::default()).unwrap();
    assert_eq!(
        sorted_entries(dir.path()),
        [
            "summary.csv",
            "trace_seed_1.csv",
            "trace_seed_2.csv",
            "trace_seed_3.csv"
        ]
    );
    // Summary rows follow the configured seed order.
    let seeds: Vec<u64> = report.rows.iter().map(|r| r.seed).collect();
    assert_eq!(seeds, [3, 1, 2]);
    assert_eq!(data_lines(&report.summary_path).len(), 3);
}

#[test]
fn trace_schema_is_stable() {
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(LEAST_SQUARES, dir.path()), RunOptions::default()).unwrap();
    let text = fs::read_to_string(&report.trace_paths[0]).unwrap();
    let mut lines = text.lines();
    let comment = lines.next().unwrap();
    assert!(comment.starts_with(&format!("# sppa run config_sha256={}", report.config_hash)));
    assert_eq!(report.config_hash.len(), 64);
    assert_eq!(lines.next().unwrap(), TRACE_COLUMNS.join(","));
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 500);
    assert!(rows[0].starts_with("1,1.0000000000000000e0,"));
    assert!(rows
        .iter()
        .all(|r| r.split(',').count() == TRACE_COLUMNS.len()));
}

#[test]
fn missing_reference_is_written_as_na() {
    let text = LEAST_SQUARES.replace("least-squares", "abs-regression");
    let dir = tempfile::tempdir().unwrap();
    let report = run_experiment(&config(&text, dir.path()), RunOptions::default()).unwrap();
    let rows = data_lines(&report.trace_paths[0]);
    assert!(rows.iter().all(|r| r.split(',').nth(4) == Some("NA")));
    assert!(report.rows.iter().all(|r| r.final_distance.is_none()));
}

#[test]
fn reruns_are_byte_identical_across_execution_modes() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let seq = RunOptions {
        exec: Some(Execution::Sequential),
        ..RunOptions::default()
    };
    run_experiment(&config(LEAST_SQUARES, a.path()), seq).unwrap();
    run_experiment(&config(LEAST_SQUARES, b.path()), RunOptions::default()).unwrap();
    for name in sorted_entries(a.path()) {
        assert_eq!(
            fs::read(a.path().join(&name)).unwrap(),
            fs::read(b.path().join(&name)).unwrap(),
            "{name}"
        );
    }
}

#[test]
fn timing_adds_a_column() {
    let dir = tempfile::tempdir().unwrap();
    let opts = RunOptions {
        timing: true,
        ..RunOptions::default()
    };
    let report = run_experiment(&config(LEAST_SQUARES, dir.path()), opts).unwrap();
    let text = fs::read_to_string(&report.summary_path).unwrap();
    assert!(text.lines().nth(1).unwrap().ends_with(",wall_time_s"));
}

#[test]
fn single_seed_comparison_has_one_row_per_iteration() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(LEAST_SQUARES, dir.path());
    c.experiment.seeds = vec![5];
    let report = compare_methods(&c, RunOptions::default()).unwrap();
    assert_eq!(report.paths.len(), 1);
    assert_eq!(data_lines(&report.paths[0]).len(), 500);
    assert_eq!(
        sorted_entries(dir.path()),
        ["compare_seed_5.csv", "compare_summary.csv"]
    );
}

#[test]
fn well_conditioned_comparison_converges_for_both_methods() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(LEAST_SQUARES, dir.path());
    c.experiment.iterations = 100_000;
    let report = compare_methods(&c, RunOptions::default()).unwrap();
    for r in &report.rows {
        assert!(r.sppa_final_distance.unwrap() <= 1e-2, "{r:?}");
        assert!(r.subgradient_final_distance.unwrap() <= 1e-2, "{r:?}");
    }
}

#[test]
fn large_steps_destabilize_only_the_subgradient_method() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = config(LEAST_SQUARES, dir.path());
    c.schedule.c = 10.0;
    c.experiment.seeds = (1..=10).collect();
    let report = compare_methods(&c, RunOptions::default()).unwrap();
    let worse = report
        .rows
        .iter()
        .filter(|r| {
            r.subgradient_diverged
                || r.subgradient_final_distance.unwrap() > r.sppa_final_distance.unwrap()
        })
        .count();
    assert!(worse >= 8, "{:?}", report.rows);
    assert!(report
        .rows
        .iter()
        .all(|r| !r.sppa_diverged && r.sppa_final_distance.unwrap().is_finite()));
}

#[test]
fn comparison_rejects_spider_problems() {
    let text = r#"
[experiment]
problem = "spider-mean"
iterations = 10
seeds = [1]

[space]
legs = 3

[data]
legs = [1, 2]
radii = [3.0, 1.0]
"#;
    let dir = tempfile::tempdir().unwrap();
    let err = compare_methods(&config(text, dir.path()), RunOptions::default()).unwrap_err();
    assert!(
        matches!(
            err,
            ExperimentError::Core(sppa_core::Error::UnsupportedSpace(_))
        ),
        "{err}"
    );
    assert!(sorted_entries(dir.path()).is_empty());
}

#[test]
fn degenerate_median_is_a_build_error() {
    let text = r#"
[experiment]
problem = "median"
iterations = 10
seeds = [1]
output = "unused"

[space]
dimension = 1

[data]
points = [[0.0], [1.0]]
"#;
    let err = run_experiment(
        &ExperimentConfig::from_toml(text).unwrap(),
        RunOptions::default(),
    )
    .unwrap_err();
    assert!(matches!(err, ExperimentError::Degenerate(_)), "{err}");
}

fn sppa(args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_sppa"))
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn cli_exit_codes() {
    assert_eq!(sppa(&[]).status.code(), Some(1));
    assert_eq!(sppa(&["--help"]).status.code(), Some(0));
    assert_eq!(sppa(&["run"]).status.code(), Some(1));
    assert_eq!(
        sppa(&["run", "/nonexistent/config.toml"]).status.code(),
        Some(1)
    );

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    fs::write(
        &bad,
        LEAST_SQUARES.replace("[space]", "[space]\nradius = 2"),
    )
    .unwrap();
    let out = sppa(&["run", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("radius"));
}

#[test]
fn cli_run_applies_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("ls.toml");
    fs::write(&cfg, LEAST_SQUARES).unwrap();
    let out_dir = dir.path().join("out");
    let out = sppa(&[
        "run",
        cfg.to_str().unwrap(),
        "--seed-override",
        "42",
        "--iterations-override",
        "17",
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert_eq!(
        sorted_entries(&out_dir),
        ["summary.csv", "trace_seed_42.csv"]
    );
    assert_eq!(data_lines(&out_dir.join("trace_seed_42.csv")).len(), 17);
}

#[test]
fn cli_check_passes() {
    let out = sppa(&["check"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert_eq!(out.status.code(), Some(0), "{stdout}");
    assert!(stdout.lines().filter(|l| l.starts_with("PASS")).count() >= 10);
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn shipped_configs_parse() {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs");
    let mut n = 0;
    for entry in fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        ExperimentConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()));
        n += 1;
    }
    assert!(n >= 4);
}
