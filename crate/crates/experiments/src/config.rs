//! Experiment configuration: a flat TOML file with one table per concern.
//!
//! ```toml
//! [experiment]
//! problem = "least-squares"   # median | abs-regression | least-squares |
//!                             # reg-least-squares | spider-mean | spider-median
//! iterations = 100000
//! seeds = [1, 2, 3]
//! output = "out/ls"           # optional, `--out` wins
//! mu = 0.1                    # reg-least-squares only
//!
//! [space]
//! dimension = 5               # Euclidean problems
//! legs = 3                    # spider problems
//!
//! [schedule]                  # λ_i = c / (i + i0)^p, defaults 1, 1, 0
//! c = 1.0
//!
//! [generator]                 # or an inline [data] table
//! count = 20
//! seed = 7
//! range = 3.0
//! noise = 0.1
//! ```

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use sppa_core::{SpacePoint, StepSchedule};

use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Problem {
    Median,
    AbsRegression,
    LeastSquares,
    RegLeastSquares,
    SpiderMean,
    SpiderMedian,
}

impl Problem {
    pub fn is_spider(self) -> bool {
        matches!(self, Problem::SpiderMean | Problem::SpiderMedian)
    }

    pub fn is_regression(self) -> bool {
        matches!(
            self,
            Problem::AbsRegression | Problem::LeastSquares | Problem::RegLeastSquares
        )
    }

    pub fn name(self) -> &'static str {
        match self {
            Problem::Median => "median",
            Problem::AbsRegression => "abs-regression",
            Problem::LeastSquares => "least-squares",
            Problem::RegLeastSquares => "reg-least-squares",
            Problem::SpiderMean => "spider-mean",
            Problem::SpiderMedian => "spider-median",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    pub problem: Problem,
    pub iterations: u64,
    pub seeds: Vec<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dimension: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScheduleSection {
    #[serde(default = "one")]
    pub c: f64,
    #[serde(default = "one")]
    pub p: f64,
    #[serde(default)]
    pub i0: u64,
}

fn one() -> f64 {
    1.0
}

impl Default for ScheduleSection {
    fn default() -> Self {
        Self {
            c: 1.0,
            p: 1.0,
            i0: 0,
        }
    }
}

/// Starting point; defaults to the origin of the space.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub leg: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

/// Inline sample data. Which fields apply depends on the problem:
/// `points` for median, `rows` + `targets` for the regressions,
/// `legs` + `radii` for spider problems. `weights` defaults to uniform.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub points: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<Vec<Vec<f64>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub targets: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub legs: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radii: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weights: Option<Vec<f64>>,
}

/// Seeded synthetic data, drawn with the same SplitMix64 stream as the sampler.
///
/// - median: `count` points uniform in `[-range, range]^d`;
/// - regressions: a hidden `x_true` uniform in `[-1, 1]^d`, rows uniform in
///   `[-range, range]^d`, targets `⟨a, x_true⟩ + noise·U[-1, 1]`;
/// - spider: uniform leg, radius uniform in `[0, range]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorSpec {
    pub count: usize,
    pub seed: u64,
    #[serde(default = "one")]
    pub range: f64,
    #[serde(default)]
    pub noise: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum DataSpec<'a> {
    Inline(&'a DataSection),
    Generated(&'a GeneratorSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentSection,
    #[serde(default)]
    pub space: SpaceSection,
    #[serde(default)]
    pub schedule: ScheduleSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub start: Option<StartSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub data: Option<DataSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generator: Option<GeneratorSpec>,
}

/// Command-line overrides applied on top of a parsed config.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub iterations: Option<u64>,
    pub out: Option<PathBuf>,
}

fn bad(msg: impl Into<String>) -> ExperimentError {
    ExperimentError::Config(msg.into())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let config: Self = toml::from_str(text)?;
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(ExperimentError::io(path))?;
        Self::from_toml(&text)
    }

    pub fn with_overrides(mut self, overrides: &Overrides) -> Result<Self> {
        if let Some(seed) = overrides.seed {
            self.experiment.seeds = vec![seed];
        }
        if let Some(n) = overrides.iterations {
            self.experiment.iterations = n;
        }
        if let Some(out) = &overrides.out {
            self.experiment.output = Some(out.clone());
        }
        self.validate()?;
        Ok(self)
    }

    pub fn problem(&self) -> Problem {
        self.experiment.problem
    }

    pub fn output_dir(&self) -> Result<&Path> {
        self.experiment
            .output
            .as_deref()
            .ok_or_else(|| bad("no output directory (set experiment.output or pass --out)"))
    }

    pub fn schedule(&self) -> Result<StepSchedule> {
        let s = &self.schedule;
        Ok(StepSchedule::new(s.c, s.p, s.i0).map_err(sppa_core::Error::from)?)
    }

    pub fn data_spec(&self) -> Result<DataSpec<'_>> {
        match (&self.data, &self.generator) {
            (Some(d), None) => Ok(DataSpec::Inline(d)),
            (None, Some(g)) => Ok(DataSpec::Generated(g)),
            (Some(_), Some(_)) => Err(bad("give either [data] or [generator], not both")),
            (None, None) => Err(bad("missing [data] or [generator]")),
        }
    }

    /// Explicit start point, if configured.
    pub fn start_point(&self) -> Result<Option<SpacePoint>> {
        let Some(start) = &self.start else {
            return Ok(None);
        };
        let p = match (&start.point, start.leg, start.radius) {
            (Some(coords), None, None) => SpacePoint::euclidean(coords.clone())?,
            (None, leg, Some(r)) => SpacePoint::spider(leg.unwrap_or(0), r)?,
            _ => return Err(bad("[start] takes either `point` or `leg` + `radius`")),
        };
        Ok(Some(p))
    }

    /// SHA-256 of the canonical TOML form, output path excluded, so
    /// identical experiments hash identically wherever they are written.
    pub fn hash(&self) -> String {
        let mut canonical = self.clone();
        canonical.experiment.output = None;
        let text = toml::to_string(&canonical).expect("config serializes");
        Sha256::digest(text.as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }

    pub fn validate(&self) -> Result<()> {
        let e = &self.experiment;
        if e.iterations == 0 {
            return Err(bad("iterations must be at least 1"));
        }
        if e.seeds.is_empty() {
            return Err(bad("at least one seed is required"));
        }
        let mut seen = e.seeds.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != e.seeds.len() {
            return Err(bad("seeds must be distinct (one trace file per seed)"));
        }
        self.schedule()?;

        let problem = e.problem;
        if problem.is_spider() {
            if self.space.legs.is_none() {
                return Err(bad("spider problems need space.legs"));
            }
            if self.space.dimension.is_some() {
                return Err(bad("space.dimension does not apply to spider problems"));
            }
        } else {
            match self.space.dimension {
                None | Some(0) => return Err(bad("Euclidean problems need space.dimension >= 1")),
                _ => {}
            }
            if self.space.legs.is_some() {
                return Err(bad("space.legs only applies to spider problems"));
            }
        }
        match (problem, e.mu) {
            (Problem::RegLeastSquares, None) => {
                return Err(bad("reg-least-squares needs experiment.mu"))
            }
            (Problem::RegLeastSquares, Some(mu)) if !(mu > 0.0 && mu.is_finite()) => {
                return Err(bad("experiment.mu must be positive"))
            }
            (Problem::RegLeastSquares, _) | (_, None) => {}
            (_, Some(_)) => return Err(bad("experiment.mu only applies to reg-least-squares")),
        }

        match self.data_spec()? {
            DataSpec::Generated(g) => {
                if g.count == 0 {
                    return Err(bad("generator.count must be at least 1"));
                }
                if !(g.range > 0.0 && g.range.is_finite())
                    || !(g.noise >= 0.0 && g.noise.is_finite())
                {
                    return Err(bad(
                        "generator.range must be positive and generator.noise nonnegative",
                    ));
                }
            }
            DataSpec::Inline(d) => {
                let n = match problem {
                    Problem::Median => {
                        only(d, &["points", "weights"])?;
                        d.points.as_ref().map(Vec::len)
                    }
                    Problem::AbsRegression | Problem::LeastSquares | Problem::RegLeastSquares => {
                        only(d, &["rows", "targets", "weights"])?;
                        let rows = d.rows.as_ref().map(Vec::len);
                        if rows != d.targets.as_ref().map(Vec::len) {
                            return Err(bad("data.rows and data.targets must have equal length"));
                        }
                        rows
                    }
                    Problem::SpiderMean | Problem::SpiderMedian => {
                        only(d, &["legs", "radii", "weights"])?;
                        let legs = d.legs.as_ref().map(Vec::len);
                        if legs != d.radii.as_ref().map(Vec::len) {
                            return Err(bad("data.legs and data.radii must have equal length"));
                        }
                        legs
                    }
                };
                let n = n
                    .filter(|&n| n > 0)
                    .ok_or_else(|| bad("inline data is empty"))?;
                if let Some(w) = &d.weights {
                    if w.len() != n {
                        return Err(bad("data.weights length does not match the data"));
                    }
                }
            }
        }
        Ok(())
    }
}

fn only(d: &DataSection, allowed: &[&str]) -> Result<()> {
    let present = [
        ("points", d.points.is_some()),
        ("rows", d.rows.is_some()),
        ("targets", d.targets.is_some()),
        ("legs", d.legs.is_some()),
        ("radii", d.radii.is_some()),
        ("weights", d.weights.is_some()),
    ];
    match present.iter().find(|(k, p)| *p && !allowed.contains(k)) {
        Some((k, _)) => Err(bad(format!("data.{k} does not apply to this problem"))),
        None => Ok(()),
    }
}
