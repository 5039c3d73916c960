//! Problem instances: the marginal distribution, the space, a start point,
//! and where available an independently computed reference minimizer.

use nalgebra::{DMatrix, DVector};
use sppa_core::{
    estimate_objective, frechet_mean_oracle, frechet_median_oracle, Error as CoreError,
    EuclideanPoint, Marginal, Sampler, Space, SpacePoint, SpiderPoint, SpiderSpace, SplitMix64,
    WeightedSample,
};

use crate::config::{DataSpec, ExperimentConfig, Problem};
use crate::error::{ExperimentError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Instance {
    pub problem: Problem,
    pub space: Space,
    /// Distribution of the marginals; its seed is a placeholder that each
    /// run replaces with one of the configured seeds.
    pub sampler: Sampler,
    pub start: SpacePoint,
    pub reference: Option<SpacePoint>,
    /// `F(reference)`, i.e. `inf F` when a reference exists.
    pub inf_objective: Option<f64>,
}

/// Raw sample data after resolving inline data or running the generator.
enum Data {
    Points(Vec<Vec<f64>>),
    Rows(Vec<Vec<f64>>, Vec<f64>),
    Spider(Vec<SpiderPoint>),
}

fn uniform_weights(n: usize) -> Vec<f64> {
    vec![1.0 / n as f64; n]
}

fn generate(config: &ExperimentConfig, space: &Space) -> Result<(Data, Vec<f64>)> {
    let problem = config.problem();
    match config.data_spec()? {
        DataSpec::Inline(d) => {
            let data = match problem {
                Problem::Median => Data::Points(d.points.clone().unwrap_or_default()),
                Problem::SpiderMean | Problem::SpiderMedian => {
                    let legs = d.legs.as_deref().unwrap_or_default();
                    let radii = d.radii.as_deref().unwrap_or_default();
                    let pts = legs
                        .iter()
                        .zip(radii)
                        .map(|(&l, &r)| SpiderPoint::new(l, r))
                        .collect::<Result<Vec<_>, _>>()?;
                    Data::Spider(pts)
                }
                _ => Data::Rows(
                    d.rows.clone().unwrap_or_default(),
                    d.targets.clone().unwrap_or_default(),
                ),
            };
            let n = match &data {
                Data::Points(p) => p.len(),
                Data::Rows(r, _) => r.len(),
                Data::Spider(p) => p.len(),
            };
            let weights = d.weights.clone().unwrap_or_else(|| uniform_weights(n));
            Ok((data, weights))
        }
        DataSpec::Generated(g) => {
            let mut rng = SplitMix64::new(g.seed);
            let n = g.count;
            let data = match space {
                Space::Spider(s) => Data::Spider(
                    (0..n)
                        .map(|_| {
                            let leg = 1 + rng.below(s.legs());
                            SpiderPoint::new(leg, rng.range(0.0, g.range))
                        })
                        .collect::<Result<_, _>>()?,
                ),
                Space::Euclidean { dim } => {
                    let vector = |lo: f64, hi: f64, rng: &mut SplitMix64| {
                        (0..*dim).map(|_| rng.range(lo, hi)).collect::<Vec<f64>>()
                    };
                    if problem == Problem::Median {
                        Data::Points(
                            (0..n)
                                .map(|_| vector(-g.range, g.range, &mut rng))
                                .collect(),
                        )
                    } else {
                        let x_true = vector(-1.0, 1.0, &mut rng);
                        let mut rows = Vec::with_capacity(n);
                        let mut targets = Vec::with_capacity(n);
                        for _ in 0..n {
                            let a = vector(-g.range, g.range, &mut rng);
                            let clean: f64 = a.iter().zip(&x_true).map(|(a, x)| a * x).sum();
                            targets.push(clean + g.noise * rng.range(-1.0, 1.0));
                            rows.push(a);
                        }
                        Data::Rows(rows, targets)
                    }
                }
            };
            Ok((data, uniform_weights(n)))
        }
    }
}

fn euclid(coords: &[f64], dim: usize) -> Result<EuclideanPoint> {
    if coords.len() != dim {
        return Err(CoreError::DimensionMismatch {
            left: dim,
            right: coords.len(),
        }
        .into());
    }
    Ok(EuclideanPoint::new(coords.to_vec())?)
}

/// Builds the marginals for the configured problem and computes the
/// reference minimizer with the matching oracle.
pub fn build_instance(config: &ExperimentConfig) -> Result<Instance> {
    config.validate()?;
    let problem = config.problem();
    let space = if problem.is_spider() {
        Space::Spider(SpiderSpace::new(config.space.legs.unwrap_or(0))?)
    } else {
        Space::Euclidean {
            dim: config.space.dimension.unwrap_or(0),
        }
    };
    let (data, weights) = generate(config, &space)?;

    let (support, reference) = match (&data, space) {
        (Data::Points(points), Space::Euclidean { dim }) => {
            let support = points
                .iter()
                .map(|b| Ok(Marginal::NormDist { b: euclid(b, dim)? }))
                .collect::<Result<Vec<_>>>()?;
            let reference = if dim == 1 {
                let values: Vec<f64> = points.iter().map(|p| p[0]).collect();
                Some(SpacePoint::euclidean(vec![weighted_median_1d(
                    &values, &weights,
                )?])?)
            } else {
                None
            };
            (support, reference)
        }
        (Data::Rows(rows, targets), Space::Euclidean { dim }) => {
            let a = rows
                .iter()
                .map(|r| euclid(r, dim))
                .collect::<Result<Vec<_>>>()?;
            let mu = config.experiment.mu.unwrap_or(0.0);
            let support = a
                .iter()
                .zip(targets)
                .map(|(a, &b)| match problem {
                    Problem::AbsRegression => Ok(Marginal::AbsAffine { a: a.clone(), b }),
                    Problem::LeastSquares => Ok(Marginal::SqAffine { a: a.clone(), b }),
                    _ => Marginal::reg_sq_affine(a.clone(), b, mu),
                })
                .collect::<Result<Vec<_>, _>>()?;
            let reference = match problem {
                Problem::AbsRegression => None,
                _ => Some(normal_equations(rows, targets, &weights, dim, mu)?),
            };
            (support, reference)
        }
        (Data::Spider(points), Space::Spider(s)) => {
            for p in points {
                s.check_point(p)?;
            }
            let q = if problem == Problem::SpiderMean { 2 } else { 1 };
            let support = points
                .iter()
                .map(|p| Marginal::power_dist(SpacePoint::Spider(*p), q))
                .collect::<Result<Vec<_>, _>>()?;
            let sample = WeightedSample::new(points.clone(), weights.clone())?;
            let reference = if q == 2 {
                frechet_mean_oracle(&sample)
            } else {
                frechet_median_oracle(&sample).map_err(|e| match e {
                    CoreError::DegenerateMedian => ExperimentError::Degenerate(
                        "spider median is not unique (a leg carries exactly half the weight \
                         or the minimizer is a segment)"
                            .into(),
                    ),
                    other => other.into(),
                })?
            };
            (support, Some(reference))
        }
        _ => unreachable!("data generated for its own space"),
    };

    let sampler = Sampler::new(support, weights, 0)?;
    let start = match config.start_point()? {
        Some(p) => {
            space.check_contains(&p)?;
            p
        }
        None => space.origin(),
    };
    let inf_objective = reference
        .as_ref()
        .map(|r| estimate_objective(r, &sampler))
        .transpose()?;
    Ok(Instance {
        problem,
        space,
        sampler,
        start,
        reference,
        inf_objective,
    })
}

/// Unique weighted median of scalars; errors when the minimizer is an interval.
fn weighted_median_1d(values: &[f64], weights: &[f64]) -> Result<f64> {
    let mut pairs: Vec<(f64, f64)> = values
        .iter()
        .copied()
        .zip(weights.iter().copied())
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = weights.iter().sum();
    let mut below = 0.0;
    for (i, (v, w)) in pairs.iter().enumerate() {
        below += w;
        let diff = below - 0.5 * total;
        if diff.abs() <= 1e-12 && pairs.get(i + 1).is_some_and(|next| next.0 > *v) {
            return Err(ExperimentError::Degenerate(format!(
                "median is not unique: every point of [{v}, {}] minimizes",
                pairs[i + 1].0
            )));
        }
        if diff > 0.0 || diff.abs() <= 1e-12 {
            return Ok(*v);
        }
    }
    unreachable!("cumulative weight reaches the total")
}

/// Solves `(Aᵀ W A + 2μ I) x = Aᵀ W b` by Cholesky.
fn normal_equations(
    rows: &[Vec<f64>],
    targets: &[f64],
    weights: &[f64],
    dim: usize,
    mu: f64,
) -> Result<SpacePoint> {
    let a = DMatrix::from_fn(rows.len(), dim, |i, j| rows[i][j]);
    let w = DVector::from_column_slice(weights);
    let b = DVector::from_column_slice(targets);
    let weighted = DMatrix::from_fn(rows.len(), dim, |i, j| a[(i, j)] * w[i]);
    let gram = weighted.transpose() * &a + DMatrix::identity(dim, dim) * (2.0 * mu);
    let rhs = weighted.transpose() * b;
    let scale = gram.diagonal().amax().max(f64::MIN_POSITIVE);
    let eigen_min = gram.clone().symmetric_eigen().eigenvalues.min();
    if eigen_min <= 1e-12 * scale {
        return Err(ExperimentError::Degenerate(
            "normal equations are singular (rows do not span the space)".into(),
        ));
    }
    let chol = gram.cholesky().ok_or_else(|| {
        ExperimentError::Degenerate("normal equations are not positive definite".into())
    })?;
    let x = chol.solve(&rhs);
    Ok(SpacePoint::euclidean(x.iter().copied().collect())?)
}
