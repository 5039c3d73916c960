//! Marginal functions and their resolvents
//! `J_λ x = argmin_y [ f(y) + d(x,y)² / (2λ) ]`.
//!
//! Closed forms:
//!
//! - `‖y − b‖`: step from `x` toward `b` by `min(λ, ‖x − b‖)`.
//! - `|⟨a,y⟩ − b|`: identity when `a = 0`, otherwise step along `∓a` by
//!   `min{λ, |⟨a,x⟩ − b| / ‖a‖²}`.
//! - `½(⟨a,y⟩ − b)²`: `x − λ(⟨a,x⟩ − b)/(1 + λ‖a‖²) · a`.
//! - `½(⟨a,y⟩ − b)² + μ‖y‖²`: the optimality condition is
//!   `(a aᵀ + s I) y = b a + x/λ` with `s = 2μ + 1/λ`; Sherman–Morrison gives
//!   `y = (v − a ⟨a,v⟩/(s + ‖a‖²)) / s` for `v = b a + x/λ`.
//! - `d(y,t)^q`: the minimizer lies on the geodesic `[x,t]` (projecting any
//!   competitor onto that geodesic decreases both terms in a CAT(0) space).
//!   At distance `u` from `x` the objective is `(D − u)^q + u²/(2λ)` with
//!   `D = d(x,t)`, giving `u = min(λ, D)` for q = 1 and `u = 2λD/(1 + 2λ)`
//!   for q = 2.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::space::{
    distance_sq_unchecked, distance_unchecked, geodesic_point_unchecked, EuclideanPoint, Space,
    SpacePoint,
};
use crate::spider::SpiderSpace;

/// One sampled marginal function `f(·, ξ)`.
#[derive(Debug, Clone, PartialEq)]
pub enum Marginal {
    /// `‖x − b‖`
    NormDist { b: EuclideanPoint },
    /// `|⟨a,x⟩ − b|`
    AbsAffine { a: EuclideanPoint, b: f64 },
    /// `½(⟨a,x⟩ − b)²`
    SqAffine { a: EuclideanPoint, b: f64 },
    /// `½(⟨a,x⟩ − b)² + μ‖x‖²`
    RegSqAffine { a: EuclideanPoint, b: f64, mu: f64 },
    /// `d(x, target)^q`, q ∈ {1, 2}
    PowerDist { target: SpacePoint, q: u32 },
}

impl Marginal {
    pub fn power_dist(target: SpacePoint, q: u32) -> Result<Self> {
        let m = Marginal::PowerDist { target, q };
        m.validate()?;
        Ok(m)
    }

    pub fn reg_sq_affine(a: EuclideanPoint, b: f64, mu: f64) -> Result<Self> {
        let m = Marginal::RegSqAffine { a, b, mu };
        m.validate()?;
        Ok(m)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            Marginal::NormDist { .. } => Ok(()),
            Marginal::AbsAffine { b, .. } | Marginal::SqAffine { b, .. } => finite(*b, "offset b"),
            Marginal::RegSqAffine { b, mu, .. } => {
                finite(*b, "offset b")?;
                if !(mu.is_finite() && *mu > 0.0) {
                    return Err(Error::OutOfRange {
                        name: "regularization mu",
                        value: *mu,
                        range: "(0, inf)",
                    });
                }
                Ok(())
            }
            Marginal::PowerDist { q, .. } => {
                if *q == 1 || *q == 2 {
                    Ok(())
                } else {
                    Err(Error::OutOfRange {
                        name: "exponent q",
                        value: *q as f64,
                        range: "{1, 2}",
                    })
                }
            }
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Marginal::NormDist { .. } => "norm-dist",
            Marginal::AbsAffine { .. } => "abs-affine",
            Marginal::SqAffine { .. } => "sq-affine",
            Marginal::RegSqAffine { .. } => "reg-sq-affine",
            Marginal::PowerDist { .. } => "power-dist",
        }
    }

    /// Errors unless `x` is a point the marginal can be evaluated at.
    pub fn check_point(&self, x: &SpacePoint) -> Result<()> {
        match self {
            Marginal::NormDist { b: v }
            | Marginal::AbsAffine { a: v, .. }
            | Marginal::SqAffine { a: v, .. }
            | Marginal::RegSqAffine { a: v, .. } => match x {
                SpacePoint::Euclidean(p) if p.dim() == v.dim() => Ok(()),
                SpacePoint::Euclidean(p) => Err(Error::DimensionMismatch {
                    left: v.dim(),
                    right: p.dim(),
                }),
                _ => Err(Error::SpaceMismatch {
                    left: "euclidean",
                    right: x.kind(),
                }),
            },
            Marginal::PowerDist { target, .. } => target.check_compatible(x),
        }
    }

    /// A point of the marginal's own space (its data vector or target).
    pub(crate) fn natural_point(&self) -> SpacePoint {
        match self {
            Marginal::NormDist { b: v }
            | Marginal::AbsAffine { a: v, .. }
            | Marginal::SqAffine { a: v, .. }
            | Marginal::RegSqAffine { a: v, .. } => SpacePoint::Euclidean(v.clone()),
            Marginal::PowerDist { target, .. } => target.clone(),
        }
    }

    /// A minimizer of the marginal itself (any one, when not unique). Every
    /// resolvent output lies within `d(x, anchor)` of `x`.
    pub fn anchor(&self, x: &SpacePoint) -> SpacePoint {
        match (self, x) {
            (Marginal::NormDist { b }, _) => SpacePoint::Euclidean(b.clone()),
            (
                Marginal::AbsAffine { a, b } | Marginal::SqAffine { a, b },
                SpacePoint::Euclidean(p),
            ) => {
                let nn = a.norm_sq();
                if nn == 0.0 {
                    x.clone()
                } else {
                    SpacePoint::Euclidean(p.axpy(-(a.dot(p) - b) / nn, a))
                }
            }
            (Marginal::RegSqAffine { a, b, mu }, _) => {
                SpacePoint::Euclidean(a.scale(b / (a.norm_sq() + 2.0 * mu)))
            }
            (Marginal::PowerDist { target, .. }, _) => target.clone(),
            _ => x.clone(),
        }
    }
}

fn finite(v: f64, name: &'static str) -> Result<()> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(name))
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda.is_finite() && lambda > 0.0 {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "lambda",
            value: lambda,
            range: "(0, inf)",
        })
    }
}

/// `f(x, ξ)`
pub fn marginal_value(marginal: &Marginal, x: &SpacePoint) -> Result<f64> {
    marginal.check_point(x)?;
    Ok(value_unchecked(marginal, x))
}

pub(crate) fn value_unchecked(marginal: &Marginal, x: &SpacePoint) -> f64 {
    match (marginal, x) {
        (Marginal::NormDist { b }, SpacePoint::Euclidean(p)) => p.dist_sq(b).sqrt(),
        (Marginal::AbsAffine { a, b }, SpacePoint::Euclidean(p)) => (a.dot(p) - b).abs(),
        (Marginal::SqAffine { a, b }, SpacePoint::Euclidean(p)) => {
            let r = a.dot(p) - b;
            0.5 * r * r
        }
        (Marginal::RegSqAffine { a, b, mu }, SpacePoint::Euclidean(p)) => {
            let r = a.dot(p) - b;
            0.5 * r * r + mu * p.norm_sq()
        }
        (Marginal::PowerDist { target, q: 1 }, _) => distance_unchecked(x, target),
        (Marginal::PowerDist { target, .. }, _) => distance_sq_unchecked(x, target),
        _ => unreachable!("point checked against marginal"),
    }
}

/// A validated resolvent evaluation request.
#[derive(Debug, Clone, PartialEq)]
pub struct ProxRequest {
    x: SpacePoint,
    lambda: f64,
    marginal: Marginal,
}

impl ProxRequest {
    pub fn new(x: SpacePoint, lambda: f64, marginal: Marginal) -> Result<Self> {
        check_lambda(lambda)?;
        marginal.validate()?;
        marginal.check_point(&x)?;
        Ok(Self {
            x,
            lambda,
            marginal,
        })
    }

    pub fn x(&self) -> &SpacePoint {
        &self.x
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn marginal(&self) -> &Marginal {
        &self.marginal
    }
}

/// `J_λ x` for the request's marginal.
pub fn prox(req: &ProxRequest) -> SpacePoint {
    prox_unchecked(&req.x, req.lambda, &req.marginal)
}

pub(crate) fn prox_unchecked(x: &SpacePoint, lambda: f64, marginal: &Marginal) -> SpacePoint {
    match (marginal, x) {
        (Marginal::NormDist { b }, SpacePoint::Euclidean(p)) => {
            let dist = p.dist_sq(b).sqrt();
            if dist <= lambda {
                SpacePoint::Euclidean(b.clone())
            } else {
                SpacePoint::Euclidean(p.axpy(lambda / dist, &b.sub(p)))
            }
        }
        (Marginal::AbsAffine { a, b }, SpacePoint::Euclidean(p)) => {
            let nn = a.norm_sq();
            if nn == 0.0 {
                return x.clone();
            }
            let r = a.dot(p) - b;
            if r >= 0.0 {
                SpacePoint::Euclidean(p.axpy(-lambda.min(r / nn), a))
            } else {
                SpacePoint::Euclidean(p.axpy(lambda.min(-r / nn), a))
            }
        }
        (Marginal::SqAffine { a, b }, SpacePoint::Euclidean(p)) => {
            let r = a.dot(p) - b;
            SpacePoint::Euclidean(p.axpy(-lambda * r / (1.0 + lambda * a.norm_sq()), a))
        }
        (Marginal::RegSqAffine { a, b, mu }, SpacePoint::Euclidean(p)) => {
            let s = 2.0 * mu + 1.0 / lambda;
            let v = p.scale(1.0 / lambda).axpy(*b, a);
            let corr = a.dot(&v) / (s + a.norm_sq());
            SpacePoint::Euclidean(v.axpy(-corr, a).scale(1.0 / s))
        }
        (Marginal::PowerDist { target, q }, _) => {
            let d = distance_unchecked(x, target);
            if d == 0.0 {
                return x.clone();
            }
            let t = if *q == 1 {
                (lambda / d).min(1.0)
            } else {
                2.0 * lambda / (1.0 + 2.0 * lambda)
            };
            geodesic_point_unchecked(x, target, t)
        }
        _ => unreachable!("point checked against marginal"),
    }
}

/// `f(y) + d(x,y)²/(2λ)`, the function the resolvent minimizes.
pub fn prox_objective(req: &ProxRequest, y: &SpacePoint) -> Result<f64> {
    req.marginal.check_point(y)?;
    Ok(value_unchecked(&req.marginal, y) + distance_sq_unchecked(&req.x, y) / (2.0 * req.lambda))
}

/// Random-probe minimizer of the resolvent objective, for certifying the
/// closed forms.
///
/// Evaluates the closed-form answer, then `probes` random points: half
/// uniform in the ball of radius `4(1 + d(x, anchor))` around `x` (which
/// contains the true minimizer), half in shrinking balls around the current
/// best point. Returns whichever point scored lowest.
pub fn probe_oracle(
    space: &Space,
    req: &ProxRequest,
    probes: usize,
    rng: &mut SplitMix64,
) -> Result<SpacePoint> {
    space.check_contains(&req.x)?;
    let anchor = req.marginal.anchor(&req.x);
    let radius = 4.0 * (1.0 + distance_unchecked(&req.x, &anchor));
    let objective = |y: &SpacePoint| {
        value_unchecked(&req.marginal, y) + distance_sq_unchecked(&req.x, y) / (2.0 * req.lambda)
    };

    let mut best = prox(req);
    let mut best_value = objective(&best);
    for i in 0..probes {
        let candidate = if i % 2 == 0 {
            space.random_in_ball(&req.x, radius, rng)
        } else {
            let local = radius * 10f64.powf(-8.0 * rng.uniform());
            space.random_in_ball(&best, local, rng)
        };
        let v = objective(&candidate);
        if v < best_value {
            best = candidate;
            best_value = v;
        }
    }
    Ok(best)
}

/// `[d(x,y)² − d(Jx,y)²]/(2λ) − [f(Jx) − f(y)]`, nonnegative for every `y`
/// when `J` is the resolvent of a convex function.
pub fn lemma_residual(req: &ProxRequest, y: &SpacePoint) -> Result<f64> {
    req.marginal.check_point(y)?;
    let jx = prox(req);
    let m = &req.marginal;
    Ok(
        (distance_sq_unchecked(&req.x, y) - distance_sq_unchecked(&jx, y)) / (2.0 * req.lambda)
            - (value_unchecked(m, &jx) - value_unchecked(m, y)),
    )
}

/// The seven closed-form branches, with random request generators used by
/// property suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxVariant {
    NormDist,
    AbsAffineZero,
    AbsAffine,
    SqAffine,
    RegSqAffine,
    PowerDistLinear,
    PowerDistSquared,
}

impl ProxVariant {
    pub const ALL: [ProxVariant; 7] = [
        ProxVariant::NormDist,
        ProxVariant::AbsAffineZero,
        ProxVariant::AbsAffine,
        ProxVariant::SqAffine,
        ProxVariant::RegSqAffine,
        ProxVariant::PowerDistLinear,
        ProxVariant::PowerDistSquared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ProxVariant::NormDist => "norm-dist",
            ProxVariant::AbsAffineZero => "abs-affine (a = 0)",
            ProxVariant::AbsAffine => "abs-affine",
            ProxVariant::SqAffine => "sq-affine",
            ProxVariant::RegSqAffine => "reg-sq-affine",
            ProxVariant::PowerDistLinear => "power-dist q=1",
            ProxVariant::PowerDistSquared => "power-dist q=2",
        }
    }

    /// A random request of this variant together with its space.
    ///
    /// Euclidean dimensions are drawn from {1, 2, 3, 5}, spider leg counts
    /// from {3, 4, 5}; λ is log-uniform on [1e-3, 1e2] and coordinates are
    /// uniform on [-5, 5].
    pub fn random_request(self, rng: &mut SplitMix64) -> (Space, ProxRequest) {
        let lambda = 10f64.powf(rng.range(-3.0, 2.0));
        let marginal_and_space = |rng: &mut SplitMix64| -> (Space, Marginal) {
            let dim = [1, 2, 3, 5][rng.below(4)];
            let vec = |rng: &mut SplitMix64| {
                EuclideanPoint::from_vec_unchecked((0..dim).map(|_| rng.range(-5.0, 5.0)).collect())
            };
            let space = Space::Euclidean { dim };
            let m = match self {
                ProxVariant::NormDist => Marginal::NormDist { b: vec(rng) },
                ProxVariant::AbsAffineZero => Marginal::AbsAffine {
                    a: EuclideanPoint::zeros(dim),
                    b: rng.range(-5.0, 5.0),
                },
                ProxVariant::AbsAffine => Marginal::AbsAffine {
                    a: vec(rng),
                    b: rng.range(-5.0, 5.0),
                },
                ProxVariant::SqAffine => Marginal::SqAffine {
                    a: vec(rng),
                    b: rng.range(-5.0, 5.0),
                },
                ProxVariant::RegSqAffine => Marginal::RegSqAffine {
                    a: vec(rng),
                    b: rng.range(-5.0, 5.0),
                    mu: 10f64.powf(rng.range(-3.0, 1.0)),
                },
                ProxVariant::PowerDistLinear | ProxVariant::PowerDistSquared => {
                    let legs = 3 + rng.below(3);
                    let space = Space::Spider(SpiderSpace::new(legs).expect("legs >= 3"));
                    let target = random_spider_point(legs, rng);
                    let q = if self == ProxVariant::PowerDistLinear {
                        1
                    } else {
                        2
                    };
                    return (space, Marginal::PowerDist { target, q });
                }
            };
            (space, m)
        };
        let (space, marginal) = marginal_and_space(rng);
        let x = match space {
            Space::Euclidean { dim } => SpacePoint::Euclidean(EuclideanPoint::from_vec_unchecked(
                (0..dim).map(|_| rng.range(-5.0, 5.0)).collect(),
            )),
            Space::Spider(s) => random_spider_point(s.legs(), rng),
        };
        let req = ProxRequest::new(x, lambda, marginal).expect("generated request is valid");
        (space, req)
    }
}

fn random_spider_point(legs: usize, rng: &mut SplitMix64) -> SpacePoint {
    let space = SpiderSpace::new(legs).expect("legs >= 3");
    SpacePoint::Spider(space.random_point(5.0, rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(c: &[f64]) -> EuclideanPoint {
        EuclideanPoint::new(c.to_vec()).unwrap()
    }

    fn ep(c: &[f64]) -> SpacePoint {
        SpacePoint::Euclidean(e(c))
    }

    fn sp(leg: usize, r: f64) -> SpacePoint {
        SpacePoint::spider(leg, r).unwrap()
    }

    fn close(a: &SpacePoint, b: &SpacePoint, tol: f64) -> bool {
        distance_unchecked(a, b) <= tol
    }

    #[test]
    fn prox_examples() {
        let req = ProxRequest::new(
            ep(&[0.0, 0.0]),
            1.0,
            Marginal::SqAffine {
                a: e(&[1.0, 0.0]),
                b: 1.0,
            },
        )
        .unwrap();
        assert!(close(&prox(&req), &ep(&[0.5, 0.0]), 1e-15));

        let req = ProxRequest::new(
            ep(&[2.0, 0.0]),
            0.5,
            Marginal::AbsAffine {
                a: e(&[1.0, 0.0]),
                b: 0.0,
            },
        )
        .unwrap();
        assert!(close(&prox(&req), &ep(&[1.5, 0.0]), 1e-15));

        let x = ep(&[0.3, -7.0]);
        let req = ProxRequest::new(
            x.clone(),
            2.0,
            Marginal::AbsAffine {
                a: e(&[0.0, 0.0]),
                b: 4.0,
            },
        )
        .unwrap();
        assert_eq!(prox(&req), x);

        let req = ProxRequest::new(
            ep(&[3.0, 0.0]),
            10.0,
            Marginal::NormDist { b: e(&[0.0, 0.0]) },
        )
        .unwrap();
        assert_eq!(prox(&req), ep(&[0.0, 0.0]));

        let req = ProxRequest::new(
            sp(1, 1.0),
            0.5,
            Marginal::power_dist(sp(2, 1.0), 2).unwrap(),
        )
        .unwrap();
        assert_eq!(prox(&req), sp(0, 0.0));
    }

    #[test]
    fn prox_fixes_smooth_minimizers() {
        let cases = [
            (
                ep(&[1.0, 2.0]),
                Marginal::SqAffine {
                    a: e(&[1.0, 1.0]),
                    b: 3.0,
                },
            ),
            (
                ep(&[0.0, 0.0]),
                Marginal::RegSqAffine {
                    a: e(&[1.0, 1.0]),
                    b: 0.0,
                    mu: 0.5,
                },
            ),
            (
                sp(2, 1.5),
                Marginal::PowerDist {
                    target: sp(2, 1.5),
                    q: 2,
                },
            ),
        ];
        for (x, m) in cases {
            let req = ProxRequest::new(x.clone(), 0.7, m).unwrap();
            assert!(close(&prox(&req), &x, 1e-15));
        }
    }

    #[test]
    fn regularized_matches_normal_equations() {
        // (a aᵀ + s I) y = b a + x/λ, checked by substitution.
        let a = e(&[1.0, -2.0, 0.5]);
        let (b, mu, lambda) = (0.7, 0.3, 0.9);
        let x = e(&[2.0, 1.0, -1.0]);
        let req = ProxRequest::new(
            SpacePoint::Euclidean(x.clone()),
            lambda,
            Marginal::RegSqAffine {
                a: a.clone(),
                b,
                mu,
            },
        )
        .unwrap();
        let y = prox(&req);
        let y = y.as_euclidean().unwrap();
        let s = 2.0 * mu + 1.0 / lambda;
        let lhs = a.scale(a.dot(y)).axpy(s, y);
        let rhs = a.scale(b).axpy(1.0 / lambda, &x);
        assert!(lhs.dist_sq(&rhs).sqrt() < 1e-12);
    }

    #[test]
    fn power_dist_capped_step_reaches_target() {
        let req = ProxRequest::new(
            sp(2, 2.0),
            5.0,
            Marginal::PowerDist {
                target: sp(1, 1.0),
                q: 1,
            },
        )
        .unwrap();
        assert_eq!(prox(&req), sp(1, 1.0));
        // Uncapped: travel λ = 1 from (leg 2, 2) toward (leg 1, 1).
        let req = ProxRequest::new(
            sp(2, 2.0),
            1.0,
            Marginal::PowerDist {
                target: sp(1, 1.0),
                q: 1,
            },
        )
        .unwrap();
        assert!(close(&prox(&req), &sp(2, 1.0), 1e-15));
    }

    #[test]
    fn request_validation() {
        let m = Marginal::NormDist { b: e(&[0.0]) };
        for lambda in [0.0, -1.0, f64::NAN, f64::INFINITY] {
            assert!(matches!(
                ProxRequest::new(ep(&[1.0]), lambda, m.clone()),
                Err(Error::OutOfRange { name: "lambda", .. })
            ));
        }
        assert!(matches!(
            ProxRequest::new(ep(&[1.0, 2.0]), 1.0, m.clone()),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            ProxRequest::new(sp(1, 1.0), 1.0, m),
            Err(Error::SpaceMismatch { .. })
        ));
        assert!(Marginal::power_dist(sp(1, 1.0), 3).is_err());
        assert!(Marginal::reg_sq_affine(e(&[1.0]), 0.0, 0.0).is_err());
    }

    #[test]
    fn marginal_value_examples() {
        assert_eq!(
            marginal_value(&Marginal::NormDist { b: e(&[0.0, 0.0]) }, &ep(&[3.0, 4.0])).unwrap(),
            5.0
        );
        assert_eq!(
            marginal_value(
                &Marginal::SqAffine {
                    a: e(&[1.0, 1.0]),
                    b: 1.0
                },
                &ep(&[1.0, 1.0])
            )
            .unwrap(),
            0.5
        );
        assert_eq!(
            marginal_value(
                &Marginal::PowerDist {
                    target: sp(1, 2.0),
                    q: 2
                },
                &sp(2, 1.0)
            )
            .unwrap(),
            9.0
        );
        assert_eq!(
            marginal_value(
                &Marginal::AbsAffine {
                    a: e(&[2.0]),
                    b: 1.0
                },
                &ep(&[0.0])
            )
            .unwrap(),
            1.0
        );
        assert_eq!(
            marginal_value(
                &Marginal::RegSqAffine {
                    a: e(&[1.0]),
                    b: 1.0,
                    mu: 0.5
                },
                &ep(&[2.0])
            )
            .unwrap(),
            0.5 + 2.0
        );
    }

    #[test]
    fn lemma_residual_examples() {
        let req = ProxRequest::new(
            ep(&[0.0, 0.0]),
            1.0,
            Marginal::SqAffine {
                a: e(&[1.0, 0.0]),
                b: 1.0,
            },
        )
        .unwrap();
        let r = lemma_residual(&req, &ep(&[1.0, 0.0])).unwrap();
        assert!((r - 0.25).abs() < 1e-15);

        let jx = prox(&req);
        let r = lemma_residual(&req, &jx).unwrap();
        let expected = distance_sq_unchecked(req.x(), &jx) / 2.0;
        assert!((r - expected).abs() < 1e-15);
    }

    #[test]
    fn probe_oracle_small_cases() {
        let mut rng = SplitMix64::new(5);
        let space = Space::Euclidean { dim: 2 };
        let req = ProxRequest::new(
            ep(&[0.0, 0.0]),
            1.0,
            Marginal::SqAffine {
                a: e(&[1.0, 0.0]),
                b: 1.0,
            },
        )
        .unwrap();
        let closed = prox_objective(&req, &prox(&req)).unwrap();
        let probed = probe_oracle(&space, &req, 10_000, &mut rng).unwrap();
        assert!(closed <= prox_objective(&req, &probed).unwrap() + 1e-9);

        let one = probe_oracle(&space, &req, 1, &mut rng).unwrap();
        assert!(prox_objective(&req, &one).unwrap() <= prox_objective(&req, req.x()).unwrap());

        let spider = Space::Spider(SpiderSpace::new(3).unwrap());
        let req = ProxRequest::new(
            sp(3, 0.5),
            4.0,
            Marginal::PowerDist {
                target: sp(1, 2.0),
                q: 1,
            },
        )
        .unwrap();
        let p = probe_oracle(&spider, &req, 10_000, &mut rng).unwrap();
        assert!(close(&p, &sp(1, 2.0), 1e-9));
    }

    #[test]
    fn anchors_minimize_their_marginal() {
        let mut rng = SplitMix64::new(17);
        for v in ProxVariant::ALL {
            for _ in 0..50 {
                let (_, req) = v.random_request(&mut rng);
                let m = req.marginal();
                let anchor = m.anchor(req.x());
                let fa = marginal_value(m, &anchor).unwrap();
                let fx = marginal_value(m, req.x()).unwrap();
                assert!(fa <= fx + 1e-9, "{}: {fa} > {fx}", v.name());
            }
        }
    }
}
