//! Deterministic sample points and order-stable parallel reductions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::chart::Interval;
use crate::error::GeomError;

pub const DEFAULT_SEED: u64 = 24245;
pub const DEFAULT_POINTS: usize = 50;

/// `count` points drawn uniformly from the box `domain`, reproducible from `seed`.
pub fn sample_points(domain: &[Interval], count: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            domain
                .iter()
                .map(|iv| iv.lo + (iv.hi - iv.lo) * rng.random::<f64>())
                .collect()
        })
        .collect()
}

/// Largest value over the samples and the first point attaining it.
#[derive(Debug, Clone, PartialEq)]
pub struct Extremum {
    pub value: f64,
    pub witness: Option<Vec<f64>>,
}

impl Extremum {
    pub fn zero() -> Self {
        Self { value: 0.0, witness: None }
    }

    /// Keeps the earlier witness on ties; NaN counts as infinitely bad.
    pub fn offer(&mut self, value: f64, point: &[f64]) {
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value > self.value || (self.witness.is_none() && value >= self.value) {
            self.value = value;
            self.witness = Some(point.to_vec());
        }
    }

    pub fn merge(&mut self, other: &Extremum) {
        if let Some(w) = &other.witness {
            self.offer(other.value, w);
        }
    }
}

/// Evaluates `f` at every sample in parallel and returns the results in sample order.
pub fn map_samples<T, F>(samples: &[Vec<f64>], f: F) -> Result<Vec<T>, GeomError>
where
    T: Send,
    F: Fn(&[f64]) -> Result<T, GeomError> + Sync + Send,
{
    samples.par_iter().map(|p| f(p)).collect::<Vec<_>>().into_iter().collect()
}

/// Maximum of a scalar residual over the samples.
pub fn max_over<F>(samples: &[Vec<f64>], f: F) -> Result<Extremum, GeomError>
where
    F: Fn(&[f64]) -> Result<f64, GeomError> + Sync + Send,
{
    let values = map_samples(samples, f)?;
    let mut best = Extremum::zero();
    for (p, v) in samples.iter().zip(values) {
        best.offer(v, p);
    }
    Ok(best)
}
