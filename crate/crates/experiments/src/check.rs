//! The invariant and property suite behind `sppa check`.
//!
//! Every property is a plain function returning a [`PropertyResult`] that
//! carries the worst observed margin, so callers can report it or assert on
//! it. Trial counts are parameters; [`run_suite`] uses the full counts.

use std::fmt;

use sppa_core::{
    cat0_residual, cyclic_ppa_run, distance, frechet_mean_oracle, frechet_median_oracle,
    geodesic_point, grid_search_oracle, growth_probe, lemma_residual, marginal_value, probe_oracle,
    prox, prox_objective, run, sppa_step, step_residual, EuclideanPoint, Execution, Marginal,
    ProxRequest, ProxVariant, Sampler, ScheduleError, Space, SpacePoint, SpiderPoint, SpiderSpace,
    SplitMix64, StepSchedule, WeightedSample,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

impl PropertyResult {
    fn new(name: &'static str, passed: bool, detail: impl Into<String>) -> Self {
        Self {
            name,
            passed,
            detail: detail.into(),
        }
    }

    /// Passes when `worst >= bound`; NaN fails.
    fn at_least(name: &'static str, worst: f64, bound: f64, what: &str) -> Self {
        Self::new(
            name,
            worst >= bound,
            format!("worst {what} {worst:.3e} (bound {bound:e})"),
        )
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "{tag} {:<40} {}", self.name, self.detail)
    }
}

/// Worst value of `check` over `trials` random draws for each prox variant,
/// plus the variant that attained it.
fn worst_over_variants<F>(
    trials: usize,
    seed: u64,
    exec: Execution,
    check: F,
) -> (f64, &'static str)
where
    F: Fn(ProxVariant, &mut SplitMix64) -> f64 + Sync + Send,
{
    let mut worst = (f64::INFINITY, "none");
    for (k, v) in ProxVariant::ALL.into_iter().enumerate() {
        let stream = seed.wrapping_mul(31).wrapping_add(k as u64);
        let w = exec.min_indexed(trials, |i| {
            let mut rng = SplitMix64::derive(stream, i as u64);
            check(v, &mut rng)
        });
        if w.is_nan() || w < worst.0 {
            worst = (w, v.name());
        }
        if w.is_nan() {
            break;
        }
    }
    worst
}

fn variant_result(
    name: &'static str,
    (worst, variant): (f64, &str),
    bound: f64,
    what: &str,
) -> PropertyResult {
    let mut r = PropertyResult::at_least(name, worst, bound, what);
    r.detail.push_str(&format!(" at {variant}"));
    r
}

/// Closed-form prox objective is within 1e-9 of the best of `probes` random probes.
pub fn prox_certification(
    trials: usize,
    probes: usize,
    seed: u64,
    exec: Execution,
) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (space, req) = v.random_request(rng);
        let Ok(probed) = probe_oracle(&space, &req, probes, rng) else {
            return f64::NAN;
        };
        let closed = prox_objective(&req, &prox(&req)).unwrap_or(f64::NAN);
        prox_objective(&req, &probed).unwrap_or(f64::NAN) + 1e-9 - closed
    });
    variant_result("prox beats probe oracle", worst, 0.0, "margin")
}

/// Resolvent inequality residual for random `y` around `x`.
pub fn resolvent_inequality(trials: usize, seed: u64, exec: Execution) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (space, req) = v.random_request(rng);
        let anchor = req.marginal().anchor(req.x());
        let radius = 4.0 * (1.0 + distance(req.x(), &anchor).unwrap_or(f64::NAN));
        let y = space.random_in_ball(req.x(), radius, rng);
        lemma_residual(&req, &y).unwrap_or(f64::NAN)
    });
    variant_result("resolvent inequality", worst, -1e-9, "residual")
}

/// `d(Jx, Jx') <= d(x, x')`, checked as a margin relative to `d(x, x')`.
pub fn nonexpansiveness(trials: usize, seed: u64, exec: Execution) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (space, req) = v.random_request(rng);
        let other = space.random_in_ball(req.x(), 10f64.powf(rng.range(-3.0, 1.0)), rng);
        let d = distance(req.x(), &other).unwrap_or(f64::NAN);
        let Ok(req2) = ProxRequest::new(other, req.lambda(), req.marginal().clone()) else {
            return f64::NAN;
        };
        let dj = distance(&prox(&req), &prox(&req2)).unwrap_or(f64::NAN);
        d * (1.0 + 1e-12) + 1e-15 - dj
    });
    variant_result("prox is nonexpansive", worst, 0.0, "slack")
}

/// `f(Jx) + d(x,Jx)²/(2λ) <= f(x)`.
pub fn descent(trials: usize, seed: u64, exec: Execution) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (_, req) = v.random_request(rng);
        let fx = marginal_value(req.marginal(), req.x()).unwrap_or(f64::NAN);
        let fj = prox_objective(&req, &prox(&req)).unwrap_or(f64::NAN);
        fx + 1e-12 * (1.0 + fx.abs()) - fj
    });
    variant_result("prox descends", worst, 0.0, "slack")
}

/// With `λ = 1e-8` the resolvent barely moves.
pub fn small_step_limit(trials: usize, seed: u64, exec: Execution) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (_, req) = v.random_request(rng);
        let Ok(req) = ProxRequest::new(req.x().clone(), 1e-8, req.marginal().clone()) else {
            return f64::NAN;
        };
        let scale = marginal_value(req.marginal(), req.x())
            .unwrap_or(f64::NAN)
            .abs();
        1e-4 * (1.0 + scale) - distance(&prox(&req), req.x()).unwrap_or(f64::NAN)
    });
    variant_result("small steps stay put", worst, 0.0, "slack")
}

/// Per-step inequality `d(x,y)² − 2λ[f(Jx) − f(y)] − d(Jx,y)² >= 0`.
pub fn per_step_inequality(trials: usize, seed: u64, exec: Execution) -> PropertyResult {
    let worst = worst_over_variants(trials, seed, exec, |v, rng| {
        let (space, req) = v.random_request(rng);
        let Ok(next) = sppa_step(req.x(), req.marginal(), req.lambda()) else {
            return f64::NAN;
        };
        let y = space.random_in_ball(req.x(), 20.0, rng);
        step_residual(req.x(), &next, req.marginal(), req.lambda(), &y).unwrap_or(f64::NAN)
    });
    variant_result("per-step inequality", worst, -1e-9, "residual")
}

/// The spaces the geometry properties are checked on.
pub fn geometry_spaces() -> Vec<Space> {
    let spider = |k| Space::Spider(SpiderSpace::new(k).expect("k >= 3"));
    vec![
        Space::Euclidean { dim: 1 },
        Space::Euclidean { dim: 2 },
        Space::Euclidean { dim: 5 },
        spider(3),
        spider(5),
    ]
}

fn random_point(space: &Space, rng: &mut SplitMix64) -> SpacePoint {
    match space {
        Space::Euclidean { dim } => SpacePoint::Euclidean(
            EuclideanPoint::new((0..*dim).map(|_| rng.range(-10.0, 10.0)).collect())
                .expect("finite coordinates"),
        ),
        Space::Spider(s) => SpacePoint::Spider(s.random_point(10.0, rng)),
    }
}

/// CAT(0) residual and geodesic speed on random quadruples in every space.
///
/// Returns one result per property, each covering all spaces.
pub fn geometry(trials: usize, seed: u64, exec: Execution) -> [PropertyResult; 2] {
    let mut cat0 = f64::INFINITY;
    let mut speed = f64::NEG_INFINITY;
    for (k, space) in geometry_spaces().iter().enumerate() {
        let stream = seed.wrapping_mul(17).wrapping_add(k as u64);
        let samples = exec.map_indexed(trials, |i| {
            let mut rng = SplitMix64::derive(stream, i as u64);
            let z = random_point(space, &mut rng);
            let x = random_point(space, &mut rng);
            let y = random_point(space, &mut rng);
            let (s, t) = (rng.uniform(), rng.uniform());
            let residual = cat0_residual(&z, &x, &y, t).unwrap_or(f64::NAN);
            let d = distance(&x, &y).unwrap_or(f64::NAN);
            let err = match (geodesic_point(&x, &y, s), geodesic_point(&x, &y, t)) {
                (Ok(gs), Ok(gt)) => {
                    (distance(&gs, &gt).unwrap_or(f64::NAN) - (s - t).abs() * d).abs() / (1.0 + d)
                }
                _ => f64::NAN,
            };
            (residual, err)
        });
        for (r, e) in samples {
            cat0 = if r.is_nan() { f64::NAN } else { cat0.min(r) };
            speed = if e.is_nan() { f64::NAN } else { speed.max(e) };
        }
    }
    [
        PropertyResult::at_least("CAT(0) inequality", cat0, -1e-10, "residual"),
        PropertyResult::new(
            "geodesic constant speed",
            speed <= 1e-10,
            format!("worst relative error {speed:.3e} (bound 1e-10)"),
        ),
    ]
}

fn random_spider_sample(rng: &mut SplitMix64) -> (SpiderSpace, WeightedSample) {
    let space = SpiderSpace::new(3 + rng.below(3)).expect("k >= 3");
    let n = 1 + rng.below(8);
    let points: Vec<SpiderPoint> = (0..n).map(|_| space.random_point(4.0, rng)).collect();
    let raw: Vec<f64> = (0..n).map(|_| rng.range(0.05, 1.0)).collect();
    let total: f64 = raw.iter().sum();
    let sample = WeightedSample::new(points, raw.iter().map(|w| w / total).collect())
        .expect("normalized weights");
    (space, sample)
}

/// Fréchet mean and median oracles agree with a grid search to within two
/// grid steps. Samples whose median is degenerate are skipped.
pub fn spider_oracles(samples: usize, step: f64, seed: u64, exec: Execution) -> PropertyResult {
    let worst = exec.max_indexed(samples, |i| {
        let mut rng = SplitMix64::derive(seed, i as u64);
        let (space, s) = random_spider_sample(&mut rng);
        let gap = |exact: &SpacePoint, q| {
            grid_search_oracle(&space, &s, q, step)
                .and_then(|g| distance(exact, &g))
                .unwrap_or(f64::NAN)
        };
        let mean = gap(&frechet_mean_oracle(&s), 2);
        match frechet_median_oracle(&s) {
            Ok(m) if median_is_sharp(&space, &s) => mean.max(gap(&m, 1)),
            _ => mean,
        }
    });
    PropertyResult::new(
        "spider oracles match grid search",
        worst <= 2.0 * step,
        format!("worst gap {worst:.3e} (bound {:e})", 2.0 * step),
    )
}

/// Whether every one-sided slope of the median objective at a breakpoint is
/// bounded away from zero, so a grid search can locate the minimizer.
fn median_is_sharp(space: &SpiderSpace, s: &WeightedSample) -> bool {
    (1..=space.legs()).all(|leg| {
        let breakpoints = s
            .points()
            .iter()
            .filter(|p| p.leg() == leg)
            .map(|p| p.radius());
        std::iter::once(0.0).chain(breakpoints).all(|r| {
            let slope: f64 = s
                .iter()
                .map(|(t, w)| {
                    if t.leg() == leg && t.radius() > r {
                        -w
                    } else {
                        w
                    }
                })
                .sum();
            slope.abs() >= 1e-2
        })
    })
}

/// The step-size constructor accepts `p` in (1/2, 1] and rejects both ends.
pub fn schedule_validity() -> PropertyResult {
    let accepts = [0.51, 0.75, 1.0]
        .iter()
        .all(|&p| StepSchedule::new(1.0, p, 1).is_ok());
    let half = matches!(
        StepSchedule::new(1.0, 0.5, 1),
        Err(ScheduleError::SquaredStepsDiverge(_))
    );
    let over = matches!(
        StepSchedule::new(1.0, 1.1, 1),
        Err(ScheduleError::StepsSummable(_))
    );
    let default = StepSchedule::default();
    let harmonic = (1..=10).all(|i| default.lambda(i) == 1.0 / i as f64);
    PropertyResult::new(
        "schedule validity",
        accepts && half && over && harmonic,
        format!("accepts (1/2,1] {accepts}, rejects 1/2 {half}, rejects 1.1 {over}, default 1/i {harmonic}"),
    )
}

fn mixed_sampler(seed: u64) -> (SpacePoint, Sampler) {
    let e = |c: &[f64]| EuclideanPoint::new(c.to_vec()).expect("finite");
    let support = vec![
        Marginal::AbsAffine {
            a: e(&[1.0, 2.0]),
            b: 0.5,
        },
        Marginal::SqAffine {
            a: e(&[-1.0, 0.5]),
            b: 1.0,
        },
        Marginal::NormDist { b: e(&[0.0, -2.0]) },
    ];
    let sampler = Sampler::new(support, vec![0.5, 0.25, 0.25], seed).expect("valid sampler");
    (SpacePoint::Euclidean(e(&[3.0, -1.0])), sampler)
}

/// Two runs with identical inputs agree bit for bit.
pub fn determinism(seed: u64) -> PropertyResult {
    let (start, sampler) = mixed_sampler(seed);
    let sched = StepSchedule::new(0.5, 0.8, 2).expect("valid schedule");
    let outcome = run(&start, &sampler, &sched, 5_000, None)
        .and_then(|a| Ok((a, run(&start, &sampler, &sched, 5_000, None)?)));
    let identical = match outcome {
        Ok((a, b)) => {
            a.records.len() == b.records.len()
                && a.records.iter().zip(&b.records).all(|(x, y)| {
                    x.point == y.point
                        && x.marginal_index == y.marginal_index
                        && x.objective.to_bits() == y.objective.to_bits()
                })
        }
        Err(_) => false,
    };
    PropertyResult::new(
        "run determinism",
        identical,
        "two 5000-step runs compared bitwise",
    )
}

/// SPPA with a single-marginal sampler is the deterministic PPA.
pub fn point_mass_reduction(seed: u64) -> PropertyResult {
    let marginal = Marginal::power_dist(SpacePoint::spider(2, 1.5).expect("valid"), 1)
        .expect("valid marginal");
    let start = SpacePoint::spider(1, 4.0).expect("valid");
    let sched = StepSchedule::new(0.3, 0.9, 1).expect("valid schedule");
    let outcome = Sampler::point_mass(marginal.clone(), seed).and_then(|s| {
        let a = run(&start, &s, &sched, 200, None)?;
        let b = cyclic_ppa_run(&start, &[marginal], &sched, 200, None)?;
        Ok((a, b))
    });
    let same = match outcome {
        Ok((a, b)) => a
            .records
            .iter()
            .zip(&b.records)
            .all(|(x, y)| x.point == y.point),
        Err(_) => false,
    };
    PropertyResult::new("point-mass reduction", same, "200 steps against cyclic PPA")
}

/// Growth-probe constants respect the analytic Lipschitz bounds of the
/// distance and absolute-affine marginals.
pub fn growth_bounds(pairs: usize, seed: u64) -> PropertyResult {
    let mut rng = SplitMix64::new(seed);
    let dim = 3;
    let space = Space::Euclidean { dim };
    let mut vec = |scale: f64| {
        EuclideanPoint::new((0..dim).map(|_| rng.range(-scale, scale)).collect()).expect("finite")
    };
    let norm_support: Vec<Marginal> = (0..4).map(|_| Marginal::NormDist { b: vec(5.0) }).collect();
    let abs_support: Vec<Marginal> = (0..4)
        .map(|_| Marginal::AbsAffine {
            a: vec(2.0),
            b: 1.0,
        })
        .collect();
    let anchor = SpacePoint::Euclidean(vec(1.0));

    let mut worst_excess = f64::NEG_INFINITY;
    for (k, support) in [norm_support, abs_support].into_iter().enumerate() {
        let bounds: Vec<f64> = support
            .iter()
            .map(|m| match m {
                Marginal::AbsAffine { a, .. } => a.norm(),
                _ => 1.0,
            })
            .collect();
        let estimate = Sampler::uniform(support, 0)
            .and_then(|s| growth_probe(&space, &s, &anchor, pairs, seed.wrapping_add(k as u64)));
        match estimate {
            Ok(g) => {
                for (l, b) in g.constants.iter().zip(&bounds) {
                    worst_excess = worst_excess.max(l - b);
                }
            }
            Err(_) => worst_excess = f64::NAN,
        }
    }
    PropertyResult::new(
        "growth constants within Lipschitz bounds",
        worst_excess <= 1e-9,
        format!("worst excess over bound {worst_excess:.3e} (bound 1e-9)"),
    )
}

/// Every property at full size.
pub fn run_suite(seed: u64) -> Vec<PropertyResult> {
    let exec = Execution::default();
    let mut out = Vec::new();
    out.extend(geometry(10_000, seed, exec));
    out.push(spider_oracles(200, 1e-3, seed, exec));
    out.push(prox_certification(100, 10_000, seed, exec));
    out.push(resolvent_inequality(10_000, seed, exec));
    out.push(nonexpansiveness(10_000, seed, exec));
    out.push(descent(10_000, seed, exec));
    out.push(small_step_limit(1_000, seed, exec));
    out.push(per_step_inequality(10_000, seed, exec));
    out.push(schedule_validity());
    out.push(determinism(seed));
    out.push(point_mass_reduction(seed));
    out.push(growth_bounds(10_000, seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_suite_passes() {
        let exec = Execution::default();
        let mut results = Vec::new();
        results.extend(geometry(200, 1, exec));
        results.push(spider_oracles(10, 1e-2, 1, exec));
        results.push(prox_certification(5, 500, 1, exec));
        results.push(resolvent_inequality(200, 1, exec));
        results.push(nonexpansiveness(200, 1, exec));
        results.push(descent(200, 1, exec));
        results.push(small_step_limit(200, 1, exec));
        results.push(per_step_inequality(200, 1, exec));
        results.push(schedule_validity());
        results.push(determinism(1));
        results.push(point_mass_reduction(1));
        results.push(growth_bounds(500, 1));
        for r in &results {
            assert!(r.passed, "{r}");
        }
    }

    #[test]
    fn nan_margins_fail() {
        let r = PropertyResult::at_least("x", f64::NAN, 0.0, "margin");
        assert!(!r.passed);
        assert!(r.to_string().starts_with("FAIL"));
    }
}
