use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use sppa_core::{distance, run, subgradient_run, Execution, RunTrace, SpacePoint};

use crate::config::ExperimentConfig;
use crate::error::{ExperimentError, Result};
use crate::instance::{build_instance, Instance};
use crate::output::{create_csv, finish, fmt_f64, fmt_opt, write_trace};

/// Distance beyond which a run is flagged as divergent.
pub const DIVERGENCE_THRESHOLD: f64 = 1e6;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct RunOptions {
    pub exec: Option<Execution>,
    /// Adds a `wall_time_s` column to the summary. Off by default because it
    /// breaks byte-identical reruns.
    pub timing: bool,
}

impl RunOptions {
    fn exec(&self) -> Execution {
        self.exec.unwrap_or_default()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SummaryRow {
    pub seed: u64,
    pub iterations: u64,
    pub final_distance: Option<f64>,
    pub final_objective: f64,
    /// `F(x_N) − inf F`, clamped at zero against rounding.
    pub final_gap: Option<f64>,
    pub best_objective: f64,
    /// `min_i F(x_i) − inf F`, clamped at zero.
    pub best_gap: Option<f64>,
    /// Smallest per-step proof residual with `y` = the reference.
    pub min_step_residual: Option<f64>,
    pub wall_time: Duration,
}

pub const SUMMARY_COLUMNS: [&str; 8] = [
    "seed",
    "iterations",
    "final_distance",
    "final_objective",
    "final_gap",
    "best_objective",
    "best_gap",
    "min_step_residual",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub config_hash: String,
    pub instance: Instance,
    pub trace_paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub rows: Vec<SummaryRow>,
}

impl RunReport {
    /// Median over seeds of the final distance to the reference.
    pub fn median_final_distance(&self) -> Option<f64> {
        let mut d: Vec<f64> = self.rows.iter().filter_map(|r| r.final_distance).collect();
        if d.is_empty() {
            return None;
        }
        d.sort_by(f64::total_cmp);
        let n = d.len();
        Some(if n % 2 == 1 {
            d[n / 2]
        } else {
            0.5 * (d[n / 2 - 1] + d[n / 2])
        })
    }
}

pub fn trace_file_name(seed: u64) -> String {
    format!("trace_seed_{seed}.csv")
}

pub const SUMMARY_FILE: &str = "summary.csv";
pub const COMPARE_SUMMARY_FILE: &str = "compare_summary.csv";

pub fn compare_file_name(seed: u64) -> String {
    format!("compare_seed_{seed}.csv")
}

fn prepare_output(config: &ExperimentConfig) -> Result<PathBuf> {
    let dir = config.output_dir()?.to_path_buf();
    std::fs::create_dir_all(&dir).map_err(ExperimentError::io(&dir))?;
    Ok(dir)
}

fn gap(value: f64, inf: Option<f64>) -> Option<f64> {
    inf.map(|i| (value - i).max(0.0))
}

/// Runs SPPA once per configured seed, writing one trace CSV per seed and a
/// summary CSV once all seeds have finished.
pub fn run_experiment(config: &ExperimentConfig, options: RunOptions) -> Result<RunReport> {
    let instance = build_instance(config)?;
    let schedule = config.schedule()?;
    let dir = prepare_output(config)?;
    let hash = config.hash();
    let iterations = config.experiment.iterations;
    let problem = config.problem().name();

    let results = options.exec().map_slice(&config.experiment.seeds, |&seed| {
        let started = Instant::now();
        let sampler = instance.sampler.with_seed(seed);
        let trace = run(
            &instance.start,
            &sampler,
            &schedule,
            iterations,
            instance.reference.as_ref(),
        )?;
        let wall_time = started.elapsed();
        let path = dir.join(trace_file_name(seed));
        let comment = format!("sppa run config_sha256={hash} problem={problem} seed={seed}");
        write_trace(&path, &comment, &trace)?;
        let best = trace.best_objective().expect("at least one iteration");
        let last = trace.final_objective().expect("at least one iteration");
        let row = SummaryRow {
            seed,
            iterations,
            final_distance: trace.final_distance(),
            final_objective: last,
            final_gap: gap(last, instance.inf_objective),
            best_objective: best,
            best_gap: gap(best, instance.inf_objective),
            min_step_residual: trace.min_residual(),
            wall_time,
        };
        Ok((path, row))
    });
    let (trace_paths, rows): (Vec<_>, Vec<_>) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();

    let summary_path = dir.join(SUMMARY_FILE);
    write_summary(&summary_path, &hash, problem, &rows, options.timing)?;
    Ok(RunReport {
        config_hash: hash,
        instance,
        trace_paths,
        summary_path,
        rows,
    })
}

fn write_summary(
    path: &Path,
    hash: &str,
    problem: &str,
    rows: &[SummaryRow],
    timing: bool,
) -> Result<()> {
    let mut header = SUMMARY_COLUMNS.to_vec();
    if timing {
        header.push("wall_time_s");
    }
    let comment = format!(
        "sppa run config_sha256={hash} problem={problem} seeds={}",
        rows.len()
    );
    let mut w = create_csv(path, &comment, &header)?;
    for r in rows {
        let mut rec = vec![
            r.seed.to_string(),
            r.iterations.to_string(),
            fmt_opt(r.final_distance),
            fmt_f64(r.final_objective),
            fmt_opt(r.final_gap),
            fmt_f64(r.best_objective),
            fmt_opt(r.best_gap),
            fmt_opt(r.min_step_residual),
        ];
        if timing {
            rec.push(format!("{:.6}", r.wall_time.as_secs_f64()));
        }
        w.write_record(&rec).map_err(ExperimentError::csv(path))?;
    }
    finish(w, path)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareRow {
    pub seed: u64,
    pub sppa_final_distance: Option<f64>,
    pub subgradient_final_distance: Option<f64>,
    pub sppa_final_objective: f64,
    pub subgradient_final_objective: f64,
    pub sppa_diverged: bool,
    pub subgradient_diverged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompareReport {
    pub config_hash: String,
    pub paths: Vec<PathBuf>,
    pub summary_path: PathBuf,
    pub rows: Vec<CompareRow>,
}

pub const COMPARE_COLUMNS: [&str; 6] = [
    "iter",
    "lambda",
    "sppa_distance",
    "subgradient_distance",
    "sppa_objective",
    "subgradient_objective",
];

pub const COMPARE_SUMMARY_COLUMNS: [&str; 7] = [
    "seed",
    "sppa_final_distance",
    "subgradient_final_distance",
    "sppa_final_objective",
    "subgradient_final_objective",
    "sppa_diverged",
    "subgradient_diverged",
];

/// Divergence is judged on the distance to the reference, or to the start
/// point when the problem has no reference.
fn diverged(trace: &RunTrace, start: &SpacePoint) -> bool {
    trace.records.iter().any(|r| {
        let d = match r.dist_to_reference {
            Some(d) => d,
            None => distance(&r.point, start).unwrap_or(f64::NAN),
        };
        !d.is_finite() || d > DIVERGENCE_THRESHOLD
    })
}

/// SPPA against the stochastic subgradient method on identical draw streams.
/// Euclidean problems only.
pub fn compare_methods(config: &ExperimentConfig, options: RunOptions) -> Result<CompareReport> {
    if config.problem().is_spider() {
        return Err(sppa_core::Error::UnsupportedSpace(
            "the subgradient comparison (no linear structure on the spider)",
        )
        .into());
    }
    let instance = build_instance(config)?;
    let schedule = config.schedule()?;
    let dir = prepare_output(config)?;
    let hash = config.hash();
    let iterations = config.experiment.iterations;
    let problem = config.problem().name();
    let reference = instance.reference.as_ref();

    let results = options.exec().map_slice(&config.experiment.seeds, |&seed| {
        let sampler = instance.sampler.with_seed(seed);
        let sppa = run(&instance.start, &sampler, &schedule, iterations, reference)?;
        let sub = subgradient_run(&instance.start, &sampler, &schedule, iterations, reference)?;
        let path = dir.join(compare_file_name(seed));
        let comment = format!("sppa compare config_sha256={hash} problem={problem} seed={seed}");
        let mut w = create_csv(&path, &comment, &COMPARE_COLUMNS)?;
        for (a, b) in sppa.records.iter().zip(&sub.records) {
            w.write_record([
                a.iter.to_string(),
                fmt_f64(a.lambda),
                fmt_opt(a.dist_to_reference),
                fmt_opt(b.dist_to_reference),
                fmt_f64(a.objective),
                fmt_f64(b.objective),
            ])
            .map_err(ExperimentError::csv(&path))?;
        }
        finish(w, &path)?;
        let row = CompareRow {
            seed,
            sppa_final_distance: sppa.final_distance(),
            subgradient_final_distance: sub.final_distance(),
            sppa_final_objective: sppa.final_objective().expect("non-empty"),
            subgradient_final_objective: sub.final_objective().expect("non-empty"),
            sppa_diverged: diverged(&sppa, &instance.start),
            subgradient_diverged: diverged(&sub, &instance.start),
        };
        Ok((path, row))
    });
    let (paths, rows): (Vec<_>, Vec<_>) = results
        .into_iter()
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .unzip();

    let summary_path = dir.join(COMPARE_SUMMARY_FILE);
    let comment = format!(
        "sppa compare config_sha256={hash} problem={problem} seeds={}",
        rows.len()
    );
    let mut w = create_csv(&summary_path, &comment, &COMPARE_SUMMARY_COLUMNS)?;
    for r in &rows {
        w.write_record([
            r.seed.to_string(),
            fmt_opt(r.sppa_final_distance),
            fmt_opt(r.subgradient_final_distance),
            fmt_f64(r.sppa_final_objective),
            fmt_f64(r.subgradient_final_objective),
            r.sppa_diverged.to_string(),
            r.subgradient_diverged.to_string(),
        ])
        .map_err(ExperimentError::csv(&summary_path))?;
    }
    finish(w, &summary_path)?;
    Ok(CompareReport {
        config_hash: hash,
        paths,
        summary_path,
        rows,
    })
}
