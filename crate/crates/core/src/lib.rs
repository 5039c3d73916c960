//! Stochastic proximal point iterations on Hadamard spaces.
//!
//! The crate provides two concrete nonpositively curved spaces (Euclidean
//! space and the k-spider, a star of half-lines glued at one origin), closed
//! form resolvents for a handful of convex marginal families, and the SPPA
//! run loop `x_i = J_{λ_i}^{ξ_i} x_{i-1}` together with two baselines and a
//! set of inequality diagnostics.
//!
//! Batch work (many seeds, many property trials) goes through [`Execution`],
//! which uses rayon when the `parallel` feature is enabled and falls back to
//! a plain loop otherwise. A single SPPA run is always sequential.

pub mod engine;
pub mod error;
pub mod par;
pub mod resolvent;
pub mod rng;
pub mod sampler;
pub mod schedule;
pub mod space;
pub mod spider;

pub use engine::{
    cyclic_ppa_run, estimate_objective, growth_probe, run, run_seeds, sppa_step, step_residual,
    subgradient_run, subgradient_step, GrowthEstimate, RunTrace, StepRecord,
};
pub use error::{Error, Result};
pub use par::Execution;
pub use resolvent::{
    lemma_residual, marginal_value, probe_oracle, prox, prox_objective, Marginal, ProxRequest,
    ProxVariant,
};
pub use rng::SplitMix64;
pub use sampler::{SampleStream, Sampler};
pub use schedule::{ScheduleError, StepSchedule};
pub use space::{
    cat0_residual, distance, geodesic_point, EuclideanPoint, Geodesic, Space, SpacePoint,
    SpiderPoint,
};
pub use spider::{
    frechet_mean_oracle, frechet_median_oracle, grid_search_oracle, SpiderSpace, WeightedSample,
};
