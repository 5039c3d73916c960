//! The k-spider as a Hadamard space, with exact Fréchet mean and median
//! oracles for finite weighted samples.
//!
//! For k = 3 the spider is isometric to the tree space of four-taxon
//! phylogenies (one interior edge, three topologies), which makes it a small
//! but genuinely non-Euclidean test bed.
//!
//! Both oracles reduce to convex calculus on one leg. Write `m_k` for the
//! weighted radius mass on leg k and `W_k` for its weight. Restricted to leg
//! k, the squared-distance objective is `Σ_on w (r − r_j)² + Σ_off w (r + r_j)²`
//! with minimizer `r = m_k − Σ_{l≠k} m_l`; at most one leg can have a positive
//! value, otherwise the origin is optimal. The distance objective has right
//! derivative `W_off + W_on(≤ r) − W_on(> r)`, which can only be negative at the
//! origin on a leg with `W_k > ½`.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::space::{SpacePoint, SpiderPoint};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpiderSpace {
    legs: usize,
}

impl SpiderSpace {
    pub fn new(legs: usize) -> Result<Self> {
        if legs < 3 {
            return Err(Error::TooFewLegs(legs));
        }
        Ok(Self { legs })
    }

    pub fn legs(&self) -> usize {
        self.legs
    }

    /// Uniform leg and radius uniform on `[0, max_radius]`; one draw in ten
    /// is the origin so the cone point is exercised.
    pub fn random_point(&self, max_radius: f64, rng: &mut SplitMix64) -> SpiderPoint {
        if rng.below(10) == 0 {
            return SpiderPoint::ORIGIN;
        }
        let leg = 1 + rng.below(self.legs);
        SpiderPoint::on_leg(leg, rng.range(0.0, max_radius))
    }

    pub fn check_point(&self, p: &SpiderPoint) -> Result<()> {
        if p.leg() > self.legs {
            Err(Error::LegOutOfRange {
                leg: p.leg(),
                legs: self.legs,
            })
        } else {
            Ok(())
        }
    }
}

const WEIGHT_TOL: f64 = 1e-12;

/// A finite distribution on the spider.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedSample {
    points: Vec<SpiderPoint>,
    weights: Vec<f64>,
}

impl WeightedSample {
    pub fn new(points: Vec<SpiderPoint>, weights: Vec<f64>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidSample("empty sample".into()));
        }
        if points.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if let Some(w) = weights.iter().find(|w| !(w.is_finite() && **w > 0.0)) {
            return Err(Error::InvalidSample(format!("weight {w} is not positive")));
        }
        let total: f64 = weights.iter().sum();
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::InvalidSample(format!(
                "weights sum to {total}, not 1"
            )));
        }
        Ok(Self { points, weights })
    }

    pub fn uniform(points: Vec<SpiderPoint>) -> Result<Self> {
        let n = points.len();
        Self::new(points, vec![1.0 / n.max(1) as f64; n])
    }

    pub fn points(&self) -> &[SpiderPoint] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn iter(&self) -> impl Iterator<Item = (&SpiderPoint, f64)> {
        self.points.iter().zip(self.weights.iter().copied())
    }

    pub fn max_radius(&self) -> f64 {
        self.points.iter().map(|p| p.radius()).fold(0.0, f64::max)
    }

    fn max_leg(&self) -> usize {
        self.points.iter().map(|p| p.leg()).max().unwrap_or(0)
    }

    /// `Σ w_j d(x, t_j)^q`
    pub fn objective(&self, x: &SpiderPoint, q: u32) -> f64 {
        self.iter()
            .map(|(t, w)| w * x.distance(t).powi(q as i32))
            .sum()
    }
}

/// Exact minimizer of `Σ w_j d(x, t_j)²`.
pub fn frechet_mean_oracle(sample: &WeightedSample) -> SpacePoint {
    let legs = sample.max_leg();
    let mut pull = vec![0.0; legs + 1];
    for (t, w) in sample.iter() {
        pull[t.leg()] += w * t.radius();
    }
    let total: f64 = pull.iter().sum();
    for (leg, &m) in pull.iter().enumerate().skip(1) {
        let r = m - (total - m);
        if r > 0.0 {
            return SpacePoint::Spider(SpiderPoint::on_leg(leg, r));
        }
    }
    SpacePoint::Spider(SpiderPoint::ORIGIN)
}

/// Exact minimizer of `Σ w_j d(x, t_j)`, or [`Error::DegenerateMedian`] when
/// the minimizer is a segment rather than a point.
pub fn frechet_median_oracle(sample: &WeightedSample) -> Result<SpacePoint> {
    let legs = sample.max_leg();
    let mut leg_weight = vec![0.0; legs + 1];
    for (t, w) in sample.iter() {
        leg_weight[t.leg()] += w;
    }
    let Some((dominant, &w_dom)) = leg_weight
        .iter()
        .enumerate()
        .skip(1)
        .find(|(_, &w)| w >= 0.5 - WEIGHT_TOL)
    else {
        return Ok(SpacePoint::Spider(SpiderPoint::ORIGIN));
    };
    if (w_dom - 0.5).abs() <= WEIGHT_TOL {
        // Flat along the dominant leg next to the origin.
        return Err(Error::DegenerateMedian);
    }

    let mut on_leg: Vec<(f64, f64)> = sample
        .iter()
        .filter(|(t, _)| t.leg() == dominant)
        .map(|(t, w)| (t.radius(), w))
        .collect();
    on_leg.sort_by(|a, b| a.0.total_cmp(&b.0));

    // Scan breakpoints; right derivative at radius r is W_off + W_on(≤r) − W_on(>r).
    let w_off = 1.0 - w_dom;
    let mut at_or_below = 0.0;
    let mut i = 0;
    while i < on_leg.len() {
        let r = on_leg[i].0;
        while i < on_leg.len() && on_leg[i].0 == r {
            at_or_below += on_leg[i].1;
            i += 1;
        }
        let slope = w_off + at_or_below - (w_dom - at_or_below);
        if slope.abs() <= WEIGHT_TOL {
            return Err(Error::DegenerateMedian);
        }
        if slope > 0.0 {
            return Ok(SpacePoint::Spider(SpiderPoint::on_leg(dominant, r)));
        }
    }
    unreachable!("slope past the last breakpoint is 1")
}

/// Brute-force minimizer of `Σ w_j d(x, t_j)^q` over the origin and a grid of
/// spacing `step` on every leg, out to the largest sample radius.
pub fn grid_search_oracle(
    space: &SpiderSpace,
    sample: &WeightedSample,
    q: u32,
    step: f64,
) -> Result<SpacePoint> {
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::OutOfRange {
            name: "grid step",
            value: step,
            range: "(0, inf)",
        });
    }
    if !(q == 1 || q == 2) {
        return Err(Error::OutOfRange {
            name: "exponent q",
            value: q as f64,
            range: "{1, 2}",
        });
    }
    for p in sample.points() {
        space.check_point(p)?;
    }
    let n = (sample.max_radius() / step).ceil() as usize;
    let mut best = SpiderPoint::ORIGIN;
    let mut best_value = sample.objective(&best, q);
    for leg in 1..=space.legs() {
        for j in 1..=n {
            let p = SpiderPoint::on_leg(leg, j as f64 * step);
            let v = sample.objective(&p, q);
            if v < best_value {
                best = p;
                best_value = v;
            }
        }
    }
    Ok(SpacePoint::Spider(best))
}
