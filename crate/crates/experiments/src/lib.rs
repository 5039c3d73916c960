//! Experiment harness around `sppa-core`: TOML configs, problem instances
//! with reference minimizers, per-seed CSV traces and summaries, the
//! SPPA-vs-subgradient comparison, and the property suite behind `sppa check`.

pub mod check;
pub mod config;
pub mod error;
pub mod experiment;
pub mod instance;
pub mod output;

pub use config::{DataSpec, ExperimentConfig, GeneratorSpec, Overrides, Problem};
pub use error::{ExperimentError, Result};
pub use experiment::{
    compare_methods, run_experiment, CompareReport, CompareRow, RunOptions, RunReport, SummaryRow,
};
pub use instance::{build_instance, Instance};
