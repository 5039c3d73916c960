use crate::error::{Error, Result};
use crate::resolvent::Marginal;
use crate::rng::SplitMix64;
use crate::space::SpacePoint;

const WEIGHT_TOL: f64 = 1e-12;

/// A finite distribution over marginals plus the seed of its draw stream.
///
/// Each draw consumes exactly one 64-bit output of [`SplitMix64`] and picks
/// the first index `j` with `u < w_0 + … + w_j`, where `u` is the uniform
/// real built from that output.
#[derive(Debug, Clone, PartialEq)]
pub struct Sampler {
    support: Vec<Marginal>,
    weights: Vec<f64>,
    cumulative: Vec<f64>,
    seed: u64,
}

impl Sampler {
    pub fn new(support: Vec<Marginal>, weights: Vec<f64>, seed: u64) -> Result<Self> {
        if support.is_empty() {
            return Err(Error::InvalidSample("empty support".into()));
        }
        if support.len() != weights.len() {
            return Err(Error::InvalidSample(format!(
                "{} marginals but {} weights",
                support.len(),
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
        for m in &support {
            m.validate()?;
        }
        let probe = support[0].natural_point();
        for m in &support[1..] {
            m.check_point(&probe)?;
        }
        let mut acc = 0.0;
        let mut cumulative: Vec<f64> = weights
            .iter()
            .map(|w| {
                acc += w;
                acc
            })
            .collect();
        *cumulative.last_mut().expect("non-empty") = 1.0;
        Ok(Self {
            support,
            weights,
            cumulative,
            seed,
        })
    }

    pub fn uniform(support: Vec<Marginal>, seed: u64) -> Result<Self> {
        let n = support.len();
        Self::new(support, vec![1.0 / n.max(1) as f64; n], seed)
    }

    pub fn point_mass(marginal: Marginal, seed: u64) -> Result<Self> {
        Self::new(vec![marginal], vec![1.0], seed)
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn support(&self) -> &[Marginal] {
        &self.support
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.support.len()
    }

    pub fn is_empty(&self) -> bool {
        self.support.is_empty()
    }

    /// Errors unless every marginal can be evaluated at `x`.
    pub fn check_point(&self, x: &SpacePoint) -> Result<()> {
        self.support[0].check_point(x)
    }

    pub fn index_for(&self, bits: u64) -> usize {
        let u = SplitMix64::unit_from_bits(bits);
        self.cumulative
            .partition_point(|&c| c <= u)
            .min(self.support.len() - 1)
    }

    pub fn stream(&self) -> SampleStream<'_> {
        SampleStream {
            sampler: self,
            rng: SplitMix64::new(self.seed),
        }
    }
}

/// Endless i.i.d. draws `(index, marginal)` from a [`Sampler`].
#[derive(Debug, Clone)]
pub struct SampleStream<'a> {
    sampler: &'a Sampler,
    rng: SplitMix64,
}

impl<'a> Iterator for SampleStream<'a> {
    type Item = (usize, &'a Marginal);

    fn next(&mut self) -> Option<Self::Item> {
        let j = self.sampler.index_for(self.rng.next_u64());
        Some((j, &self.sampler.support[j]))
    }
}
