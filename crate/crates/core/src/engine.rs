//! The SPPA run loop `x_i = J_{λ_i}^{ξ_i} x_{i−1}`, two baselines, and the
//! diagnostics that watch the inequalities behind its convergence.

use crate::error::{Error, Result};
use crate::par::Execution;
use crate::resolvent::{prox_unchecked, value_unchecked, Marginal};
use crate::rng::SplitMix64;
use crate::sampler::Sampler;
use crate::schedule::StepSchedule;
use crate::space::{distance_sq_unchecked, distance_unchecked, EuclideanPoint, Space, SpacePoint};

/// One iteration of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub iter: u64,
    pub lambda: f64,
    pub marginal_index: usize,
    pub point: SpacePoint,
    /// `d(x_{i−1}, x_i)`
    pub step_length: f64,
    /// [`step_residual`] with `y` = the reference point, when one was given.
    /// Only recorded for proximal steps.
    pub residual: Option<f64>,
    pub dist_to_reference: Option<f64>,
    /// `F(x_i)` under the run's distribution.
    pub objective: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Sppa,
    Subgradient,
    CyclicPpa,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sppa => "sppa",
            Method::Subgradient => "subgradient",
            Method::CyclicPpa => "cyclic-ppa",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunTrace {
    pub method: Method,
    pub seed: u64,
    pub start: SpacePoint,
    pub schedule: StepSchedule,
    pub reference: Option<SpacePoint>,
    pub records: Vec<StepRecord>,
}

impl RunTrace {
    pub fn final_point(&self) -> &SpacePoint {
        self.records.last().map_or(&self.start, |r| &r.point)
    }

    pub fn final_distance(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.dist_to_reference)
    }

    pub fn final_objective(&self) -> Option<f64> {
        self.records.last().map(|r| r.objective)
    }

    /// `min_{j ≤ i} F(x_j)` for every `i`.
    pub fn running_min_objective(&self) -> Vec<f64> {
        let mut best = f64::INFINITY;
        self.records
            .iter()
            .map(|r| {
                best = best.min(r.objective);
                best
            })
            .collect()
    }

    pub fn best_objective(&self) -> Option<f64> {
        self.records.iter().map(|r| r.objective).reduce(f64::min)
    }

    /// Smallest recorded step residual, if residuals were recorded.
    pub fn min_residual(&self) -> Option<f64> {
        self.records
            .iter()
            .filter_map(|r| r.residual)
            .reduce(f64::min)
    }
}

/// One resolvent step.
pub fn sppa_step(x: &SpacePoint, marginal: &Marginal, lambda: f64) -> Result<SpacePoint> {
    let req = crate::resolvent::ProxRequest::new(x.clone(), lambda, marginal.clone())?;
    Ok(crate::resolvent::prox(&req))
}

/// `d(x_prev,y)² − 2λ[f(x_next) − f(y)] − d(x_next,y)²`.
///
/// When `x_next` is the resolvent of `x_prev` this is nonnegative for every
/// `y`; it is the deterministic per-step inequality the supermartingale
/// estimate is built on.
pub fn step_residual(
    x_prev: &SpacePoint,
    x_next: &SpacePoint,
    marginal: &Marginal,
    lambda: f64,
    y: &SpacePoint,
) -> Result<f64> {
    marginal.check_point(x_prev)?;
    marginal.check_point(x_next)?;
    marginal.check_point(y)?;
    Ok(residual_unchecked(x_prev, x_next, marginal, lambda, y))
}

fn residual_unchecked(
    x_prev: &SpacePoint,
    x_next: &SpacePoint,
    marginal: &Marginal,
    lambda: f64,
    y: &SpacePoint,
) -> f64 {
    distance_sq_unchecked(x_prev, y)
        - 2.0 * lambda * (value_unchecked(marginal, x_next) - value_unchecked(marginal, y))
        - distance_sq_unchecked(x_next, y)
}

/// `F(x) = Σ w_j f(x, ξ_j)`, exact for a finite support.
pub fn estimate_objective(x: &SpacePoint, sampler: &Sampler) -> Result<f64> {
    sampler.check_point(x)?;
    Ok(objective_unchecked(x, sampler.support(), sampler.weights()))
}

fn objective_unchecked(x: &SpacePoint, support: &[Marginal], weights: &[f64]) -> f64 {
    support
        .iter()
        .zip(weights)
        .map(|(m, w)| w * value_unchecked(m, x))
        .sum()
}

fn check_run_inputs(
    start: &SpacePoint,
    sampler: &Sampler,
    iterations: u64,
    reference: Option<&SpacePoint>,
) -> Result<()> {
    if iterations == 0 {
        return Err(Error::OutOfRange {
            name: "iterations",
            value: 0.0,
            range: "1..",
        });
    }
    sampler.check_point(start)?;
    if let Some(r) = reference {
        sampler.check_point(r)?;
    }
    Ok(())
}

struct Driver<'a> {
    support: &'a [Marginal],
    weights: &'a [f64],
    reference: Option<&'a SpacePoint>,
    record_residual: bool,
}

impl Driver<'_> {
    fn record(
        &self,
        iter: u64,
        lambda: f64,
        marginal_index: usize,
        prev: &SpacePoint,
        next: SpacePoint,
    ) -> StepRecord {
        let marginal = &self.support[marginal_index];
        let residual = match self.reference {
            Some(y) if self.record_residual => {
                Some(residual_unchecked(prev, &next, marginal, lambda, y))
            }
            _ => None,
        };
        StepRecord {
            iter,
            lambda,
            marginal_index,
            step_length: distance_unchecked(prev, &next),
            residual,
            dist_to_reference: self.reference.map(|r| distance_unchecked(&next, r)),
            objective: objective_unchecked(&next, self.support, self.weights),
            point: next,
        }
    }
}

/// Runs `iterations` SPPA steps from `start`, drawing `ξ_i` from `sampler`.
///
/// Bitwise deterministic for fixed inputs.
pub fn run(
    start: &SpacePoint,
    sampler: &Sampler,
    schedule: &StepSchedule,
    iterations: u64,
    reference: Option<&SpacePoint>,
) -> Result<RunTrace> {
    check_run_inputs(start, sampler, iterations, reference)?;
    let driver = Driver {
        support: sampler.support(),
        weights: sampler.weights(),
        reference,
        record_residual: true,
    };
    let mut records = Vec::with_capacity(iterations as usize);
    let mut x = start.clone();
    for ((j, marginal), i) in sampler.stream().zip(1..=iterations) {
        let lambda = schedule.lambda(i);
        let next = prox_unchecked(&x, lambda, marginal);
        let rec = driver.record(i, lambda, j, &x, next);
        x = rec.point.clone();
        records.push(rec);
    }
    Ok(RunTrace {
        method: Method::Sppa,
        seed: sampler.seed(),
        start: start.clone(),
        schedule: *schedule,
        reference: reference.cloned(),
        records,
    })
}

/// [`run`] once per seed, possibly in parallel. Traces come back in seed order.
pub fn run_seeds(
    start: &SpacePoint,
    sampler: &Sampler,
    schedule: &StepSchedule,
    iterations: u64,
    reference: Option<&SpacePoint>,
    seeds: &[u64],
    exec: Execution,
) -> Result<Vec<RunTrace>> {
    exec.map_slice(seeds, |&seed| {
        run(
            start,
            &sampler.with_seed(seed),
            schedule,
            iterations,
            reference,
        )
    })
    .into_iter()
    .collect()
}

/// Canonical subgradient of a Euclidean marginal at `x`, with zero chosen at kinks.
fn subgradient(x: &EuclideanPoint, marginal: &Marginal) -> Result<EuclideanPoint> {
    let dim = x.dim();
    Ok(match marginal {
        Marginal::NormDist { b } => {
            let diff = x.sub(b);
            let n = diff.norm();
            if n == 0.0 {
                EuclideanPoint::zeros(dim)
            } else {
                diff.scale(1.0 / n)
            }
        }
        Marginal::AbsAffine { a, b } => {
            let r = a.dot(x) - b;
            if r == 0.0 {
                EuclideanPoint::zeros(dim)
            } else {
                a.scale(r.signum())
            }
        }
        Marginal::SqAffine { a, b } => a.scale(a.dot(x) - b),
        Marginal::RegSqAffine { a, b, mu } => a.scale(a.dot(x) - b).axpy(2.0 * mu, x),
        Marginal::PowerDist {
            target: SpacePoint::Euclidean(t),
            q,
        } => {
            let diff = x.sub(t);
            match q {
                1 => {
                    let n = diff.norm();
                    if n == 0.0 {
                        EuclideanPoint::zeros(dim)
                    } else {
                        diff.scale(1.0 / n)
                    }
                }
                _ => diff.scale(2.0),
            }
        }
        Marginal::PowerDist { .. } => {
            return Err(Error::UnsupportedSpace("a subgradient step"));
        }
    })
}

/// Explicit step `x − λ g` with `g` the canonical subgradient.
///
/// Only defined on Euclidean space: the spider has no linear structure to
/// move along a gradient in.
pub fn subgradient_step(x: &SpacePoint, marginal: &Marginal, lambda: f64) -> Result<SpacePoint> {
    let SpacePoint::Euclidean(p) = x else {
        return Err(Error::UnsupportedSpace("a subgradient step"));
    };
    marginal.check_point(x)?;
    let g = subgradient(p, marginal)?;
    Ok(SpacePoint::Euclidean(p.axpy(-lambda, &g)))
}

/// Stochastic subgradient baseline on the same draw stream as [`run`].
pub fn subgradient_run(
    start: &SpacePoint,
    sampler: &Sampler,
    schedule: &StepSchedule,
    iterations: u64,
    reference: Option<&SpacePoint>,
) -> Result<RunTrace> {
    check_run_inputs(start, sampler, iterations, reference)?;
    let SpacePoint::Euclidean(_) = start else {
        return Err(Error::UnsupportedSpace("the subgradient method"));
    };
    if sampler
        .support()
        .iter()
        .any(|m| matches!(m, Marginal::PowerDist { target, .. } if target.as_euclidean().is_none()))
    {
        return Err(Error::UnsupportedSpace("the subgradient method"));
    }
    let driver = Driver {
        support: sampler.support(),
        weights: sampler.weights(),
        reference,
        record_residual: false,
    };
    let mut records = Vec::with_capacity(iterations as usize);
    let mut x = start.clone();
    for ((j, marginal), i) in sampler.stream().zip(1..=iterations) {
        let lambda = schedule.lambda(i);
        let p = x.as_euclidean().expect("euclidean run");
        let next = SpacePoint::Euclidean(p.axpy(-lambda, &subgradient(p, marginal)?));
        let rec = driver.record(i, lambda, j, &x, next);
        x = rec.point.clone();
        records.push(rec);
    }
    Ok(RunTrace {
        method: Method::Subgradient,
        seed: sampler.seed(),
        start: start.clone(),
        schedule: *schedule,
        reference: reference.cloned(),
        records,
    })
}

/// Deterministic incremental PPA: each cycle applies the resolvent of every
/// marginal in order, with `λ` fixed within a cycle and indexed by cycle
/// number. The objective column is the plain average of the marginals.
pub fn cyclic_ppa_run(
    start: &SpacePoint,
    marginals: &[Marginal],
    schedule: &StepSchedule,
    cycles: u64,
    reference: Option<&SpacePoint>,
) -> Result<RunTrace> {
    let uniform = Sampler::uniform(marginals.to_vec(), 0)?;
    check_run_inputs(start, &uniform, cycles, reference)?;
    let driver = Driver {
        support: uniform.support(),
        weights: uniform.weights(),
        reference,
        record_residual: true,
    };
    let mut records = Vec::with_capacity(cycles as usize * marginals.len());
    let mut x = start.clone();
    let mut iter = 0;
    for cycle in 1..=cycles {
        let lambda = schedule.lambda(cycle);
        for (j, marginal) in marginals.iter().enumerate() {
            iter += 1;
            let next = prox_unchecked(&x, lambda, marginal);
            let rec = driver.record(iter, lambda, j, &x, next);
            x = rec.point.clone();
            records.push(rec);
        }
    }
    Ok(RunTrace {
        method: Method::CyclicPpa,
        seed: 0,
        start: start.clone(),
        schedule: *schedule,
        reference: reference.cloned(),
        records,
    })
}

/// Empirical lower-bound witnesses for the growth condition
/// `f(x,ξ) − f(y,ξ) ≤ L(ξ)[1 + d(x,p)] d(x,y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GrowthEstimate {
    pub anchor: SpacePoint,
    /// `L̂(ξ_j)` per support marginal, in support order.
    pub constants: Vec<f64>,
    /// `Σ w_j L̂(ξ_j)²`
    pub mean_square: f64,
    pub pairs_used: usize,
}

/// Largest observed growth ratio per marginal over `pairs` random pairs.
///
/// `x` is drawn around the anchor at log-uniform scales in [0.1, 1000] and
/// `y` around `x` at scales in [0.001, 100], so both the local slope and the
/// growth far from the anchor are exercised. Pairs with `d(x,y) = 0` are skipped.
/// The result is a lower bound on the true constants, not a certificate.
pub fn growth_probe(
    space: &Space,
    sampler: &Sampler,
    anchor: &SpacePoint,
    pairs: usize,
    seed: u64,
) -> Result<GrowthEstimate> {
    if pairs == 0 {
        return Err(Error::OutOfRange {
            name: "pairs",
            value: 0.0,
            range: "1..",
        });
    }
    space.check_contains(anchor)?;
    sampler.check_point(anchor)?;
    let mut rng = SplitMix64::new(seed);
    let samples: Vec<(SpacePoint, SpacePoint, f64)> = (0..pairs)
        .filter_map(|_| {
            let x = space.random_in_ball(anchor, 10f64.powf(rng.range(-1.0, 3.0)), &mut rng);
            let y = space.random_in_ball(&x, 10f64.powf(rng.range(-3.0, 2.0)), &mut rng);
            let d = distance_unchecked(&x, &y);
            (d > 0.0).then(|| {
                let scale = (1.0 + distance_unchecked(&x, anchor)) * d;
                (x, y, scale)
            })
        })
        .collect();
    let constants = Execution::default().map_slice(sampler.support(), |m| {
        samples
            .iter()
            .map(|(x, y, scale)| (value_unchecked(m, x) - value_unchecked(m, y)) / scale)
            .fold(0.0, f64::max)
    });
    let mean_square = constants
        .iter()
        .zip(sampler.weights())
        .map(|(l, w)| w * l * l)
        .sum();
    Ok(GrowthEstimate {
        anchor: anchor.clone(),
        constants,
        mean_square,
        pairs_used: samples.len(),
    })
}
