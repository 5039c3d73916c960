//! Points, geodesics and the CAT(0) comparison inequality.
//!
//! Two concrete spaces are supported: Euclidean `R^d` and the k-spider, k
//! half-lines ("legs") glued at a common origin. In the spider the distance
//! between points on different legs is the sum of their radii, and the
//! geodesic between them runs through the origin.

use std::fmt;

use crate::error::{Error, Result};
use crate::rng::SplitMix64;
use crate::spider::SpiderSpace;

#[derive(Debug, Clone, PartialEq)]
pub struct EuclideanPoint(Vec<f64>);

impl EuclideanPoint {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("euclidean coordinates"));
        }
        Ok(Self(coords))
    }

    /// Skips the finiteness check; used on the hot path where inputs are
    /// already validated points combined by finite arithmetic.
    pub(crate) fn from_vec_unchecked(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(dim: usize) -> Self {
        Self(vec![0.0; dim])
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    /// `self + s * dir`
    pub fn axpy(&self, s: f64, dir: &Self) -> Self {
        Self(self.0.iter().zip(&dir.0).map(|(x, d)| x + s * d).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, s: f64) -> Self {
        Self(self.0.iter().map(|x| s * x).collect())
    }

    pub(crate) fn dist_sq(&self, other: &Self) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum()
    }
}

impl From<EuclideanPoint> for SpacePoint {
    fn from(p: EuclideanPoint) -> Self {
        SpacePoint::Euclidean(p)
    }
}

/// A point of the k-spider. Legs are numbered from 1; the origin is the only
/// point with `leg == 0`, and every radius-0 point is stored as the origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpiderPoint {
    leg: usize,
    radius: f64,
}

impl SpiderPoint {
    pub const ORIGIN: SpiderPoint = SpiderPoint {
        leg: 0,
        radius: 0.0,
    };

    pub fn new(leg: usize, radius: f64) -> Result<Self> {
        if !radius.is_finite() {
            return Err(Error::NonFinite("spider radius"));
        }
        if radius < 0.0 {
            return Err(Error::OutOfRange {
                name: "spider radius",
                value: radius,
                range: "[0, inf)",
            });
        }
        if radius == 0.0 {
            return Ok(Self::ORIGIN);
        }
        if leg == 0 {
            return Err(Error::OutOfRange {
                name: "spider leg",
                value: 0.0,
                range: "1.. (leg 0 is reserved for the origin)",
            });
        }
        Ok(Self { leg, radius })
    }

    pub(crate) fn on_leg(leg: usize, radius: f64) -> Self {
        if radius <= 0.0 {
            Self::ORIGIN
        } else {
            Self { leg, radius }
        }
    }

    pub fn leg(&self) -> usize {
        self.leg
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn is_origin(&self) -> bool {
        self.leg == 0
    }

    pub fn distance(&self, other: &SpiderPoint) -> f64 {
        if self.leg == other.leg {
            (self.radius - other.radius).abs()
        } else {
            self.radius + other.radius
        }
    }

    /// Point at fraction `t` of the way from `self` to `other`.
    pub(crate) fn toward(&self, other: &SpiderPoint, t: f64) -> SpiderPoint {
        if t <= 0.0 {
            return *self;
        }
        if t >= 1.0 {
            return *other;
        }
        if self.leg == other.leg || self.is_origin() || other.is_origin() {
            // Both on one closed leg.
            let leg = self.leg.max(other.leg);
            return SpiderPoint::on_leg(leg, (1.0 - t) * self.radius + t * other.radius);
        }
        let travel = t * (self.radius + other.radius);
        if travel < self.radius {
            SpiderPoint::on_leg(self.leg, self.radius - travel)
        } else {
            SpiderPoint::on_leg(other.leg, travel - self.radius)
        }
    }
}

impl From<SpiderPoint> for SpacePoint {
    fn from(p: SpiderPoint) -> Self {
        SpacePoint::Spider(p)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SpacePoint {
    Euclidean(EuclideanPoint),
    Spider(SpiderPoint),
}

impl SpacePoint {
    pub fn euclidean(coords: Vec<f64>) -> Result<Self> {
        EuclideanPoint::new(coords).map(SpacePoint::Euclidean)
    }

    pub fn spider(leg: usize, radius: f64) -> Result<Self> {
        SpiderPoint::new(leg, radius).map(SpacePoint::Spider)
    }

    pub fn kind(&self) -> &'static str {
        match self {
            SpacePoint::Euclidean(_) => "euclidean",
            SpacePoint::Spider(_) => "spider",
        }
    }

    pub fn as_euclidean(&self) -> Option<&EuclideanPoint> {
        match self {
            SpacePoint::Euclidean(p) => Some(p),
            SpacePoint::Spider(_) => None,
        }
    }

    pub fn as_spider(&self) -> Option<&SpiderPoint> {
        match self {
            SpacePoint::Spider(p) => Some(p),
            SpacePoint::Euclidean(_) => None,
        }
    }

    /// Errors unless `self` and `other` belong to the same concrete space.
    pub fn check_compatible(&self, other: &SpacePoint) -> Result<()> {
        match (self, other) {
            (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) if a.dim() != b.dim() => {
                Err(Error::DimensionMismatch {
                    left: a.dim(),
                    right: b.dim(),
                })
            }
            (SpacePoint::Euclidean(_), SpacePoint::Euclidean(_))
            | (SpacePoint::Spider(_), SpacePoint::Spider(_)) => Ok(()),
            _ => Err(Error::SpaceMismatch {
                left: self.kind(),
                right: other.kind(),
            }),
        }
    }
}

impl fmt::Display for SpacePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacePoint::Euclidean(p) => {
                write!(f, "(")?;
                for (i, c) in p.coords().iter().enumerate() {
                    if i > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "{c}")?;
                }
                write!(f, ")")
            }
            SpacePoint::Spider(p) if p.is_origin() => write!(f, "origin"),
            SpacePoint::Spider(p) => write!(f, "(leg {}, r={})", p.leg(), p.radius()),
        }
    }
}

/// Descriptor of a concrete space; dimension and leg count are runtime values.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    Euclidean { dim: usize },
    Spider(SpiderSpace),
}

impl Space {
    pub fn origin(&self) -> SpacePoint {
        match self {
            Space::Euclidean { dim } => SpacePoint::Euclidean(EuclideanPoint::zeros(*dim)),
            Space::Spider(_) => SpacePoint::Spider(SpiderPoint::ORIGIN),
        }
    }

    pub fn check_contains(&self, p: &SpacePoint) -> Result<()> {
        match (self, p) {
            (Space::Euclidean { dim }, SpacePoint::Euclidean(e)) => {
                if e.dim() == *dim {
                    Ok(())
                } else {
                    Err(Error::DimensionMismatch {
                        left: *dim,
                        right: e.dim(),
                    })
                }
            }
            (Space::Spider(s), SpacePoint::Spider(q)) => s.check_point(q),
            (Space::Euclidean { .. }, _) => Err(Error::SpaceMismatch {
                left: "euclidean",
                right: p.kind(),
            }),
            (Space::Spider(_), _) => Err(Error::SpaceMismatch {
                left: "spider",
                right: p.kind(),
            }),
        }
    }

    /// Random point within distance `radius` of `center`.
    ///
    /// Euclidean: uniform in the ball. Spider: a leg is chosen uniformly among
    /// the legs the ball reaches, then the radius uniformly on that leg's
    /// portion of the ball, so every leg is probed when the ball covers the origin.
    pub fn random_in_ball(
        &self,
        center: &SpacePoint,
        radius: f64,
        rng: &mut SplitMix64,
    ) -> SpacePoint {
        match (self, center) {
            (Space::Euclidean { dim }, SpacePoint::Euclidean(c)) => {
                let dir: Vec<f64> = (0..*dim).map(|_| rng.normal()).collect();
                let n = dir
                    .iter()
                    .map(|v| v * v)
                    .sum::<f64>()
                    .sqrt()
                    .max(f64::MIN_POSITIVE);
                let r = radius * rng.uniform().powf(1.0 / *dim as f64);
                SpacePoint::Euclidean(EuclideanPoint(
                    c.coords()
                        .iter()
                        .zip(&dir)
                        .map(|(x, d)| x + r * d / n)
                        .collect(),
                ))
            }
            (Space::Spider(s), SpacePoint::Spider(c)) => {
                let reach_other = radius - c.radius();
                let leg = if reach_other > 0.0 || c.is_origin() {
                    1 + rng.below(s.legs())
                } else {
                    c.leg()
                };
                let (lo, hi) = if leg == c.leg() {
                    ((c.radius() - radius).max(0.0), c.radius() + radius)
                } else {
                    (0.0, reach_other.max(0.0))
                };
                SpacePoint::Spider(SpiderPoint::on_leg(leg, rng.range(lo, hi)))
            }
            _ => panic!("random_in_ball: center is not a point of this space"),
        }
    }
}

pub fn distance(x: &SpacePoint, y: &SpacePoint) -> Result<f64> {
    x.check_compatible(y)?;
    Ok(distance_unchecked(x, y))
}

pub(crate) fn distance_unchecked(x: &SpacePoint, y: &SpacePoint) -> f64 {
    match (x, y) {
        (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) => a.dist_sq(b).sqrt(),
        (SpacePoint::Spider(a), SpacePoint::Spider(b)) => a.distance(b),
        _ => unreachable!("compatibility checked by caller"),
    }
}

pub(crate) fn distance_sq_unchecked(x: &SpacePoint, y: &SpacePoint) -> f64 {
    match (x, y) {
        (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) => a.dist_sq(b),
        (SpacePoint::Spider(a), SpacePoint::Spider(b)) => {
            let d = a.distance(b);
            d * d
        }
        _ => unreachable!("compatibility checked by caller"),
    }
}

fn check_fraction(t: f64) -> Result<()> {
    if (0.0..=1.0).contains(&t) {
        Ok(())
    } else {
        Err(Error::OutOfRange {
            name: "geodesic parameter t",
            value: t,
            range: "[0, 1]",
        })
    }
}

/// `γ(t)` on the geodesic from `x` to `y`.
pub fn geodesic_point(x: &SpacePoint, y: &SpacePoint, t: f64) -> Result<SpacePoint> {
    check_fraction(t)?;
    x.check_compatible(y)?;
    Ok(geodesic_point_unchecked(x, y, t))
}

pub(crate) fn geodesic_point_unchecked(x: &SpacePoint, y: &SpacePoint, t: f64) -> SpacePoint {
    match (x, y) {
        (SpacePoint::Euclidean(a), SpacePoint::Euclidean(b)) => {
            if t == 1.0 {
                return y.clone();
            }
            SpacePoint::Euclidean(EuclideanPoint(
                a.coords()
                    .iter()
                    .zip(b.coords())
                    .map(|(p, q)| p + t * (q - p))
                    .collect(),
            ))
        }
        (SpacePoint::Spider(a), SpacePoint::Spider(b)) => SpacePoint::Spider(a.toward(b, t)),
        _ => unreachable!("compatibility checked by caller"),
    }
}

/// The constant-speed geodesic between two points.
#[derive(Debug, Clone, PartialEq)]
pub struct Geodesic {
    start: SpacePoint,
    end: SpacePoint,
    length: f64,
}

impl Geodesic {
    pub fn new(start: SpacePoint, end: SpacePoint) -> Result<Self> {
        let length = distance(&start, &end)?;
        Ok(Self { start, end, length })
    }

    pub fn endpoints(&self) -> (&SpacePoint, &SpacePoint) {
        (&self.start, &self.end)
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn at(&self, t: f64) -> Result<SpacePoint> {
        check_fraction(t)?;
        Ok(geodesic_point_unchecked(&self.start, &self.end, t))
    }
}

/// Right-hand side minus left-hand side of the CAT(0) inequality
///
/// `d(z,γ(t))² ≤ (1−t) d(z,x)² + t d(z,y)² − t(1−t) d(x,y)²`
///
/// for the geodesic `γ` from `x` to `y`. Nonnegative in a CAT(0) space.
pub fn cat0_residual(z: &SpacePoint, x: &SpacePoint, y: &SpacePoint, t: f64) -> Result<f64> {
    check_fraction(t)?;
    z.check_compatible(x)?;
    x.check_compatible(y)?;
    let g = geodesic_point_unchecked(x, y, t);
    let lhs = distance_sq_unchecked(z, &g);
    let rhs = (1.0 - t) * distance_sq_unchecked(z, x) + t * distance_sq_unchecked(z, y)
        - t * (1.0 - t) * distance_sq_unchecked(x, y);
    Ok(rhs - lhs)
}
