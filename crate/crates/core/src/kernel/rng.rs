use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::scalar::Real;

/// Deterministic random stream: ChaCha8 seeded from a 64-bit value.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    inner: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64) -> Self {
        Self { seed, inner: ChaCha8Rng::seed_from_u64(seed) }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Uniform value in `[0, 1)`.
    pub fn unit(&mut self) -> f64 {
        self.inner.random::<f64>()
    }

    /// Uniform value in `[a, b]`.
    pub fn uniform<T: Real>(&mut self, a: T, b: T) -> Result<T> {
        if a > b || a.is_nan() || b.is_nan() {
            return Err(Error::InvalidInterval { lo: a.as_f64(), hi: b.as_f64() });
        }
        if a == b {
            return Ok(a);
        }
        let u = T::lit(self.unit());
        Ok((a + (b - a) * u).min(b).max(a))
    }

    /// Normal draw with the given mean and standard deviation.
    pub fn normal(&mut self, mean: f64, sd: f64) -> f64 {
        let z: f64 = StandardNormal.sample(&mut self.inner);
        mean + sd * z
    }

    pub fn bernoulli(&mut self, p: f64) -> bool {
        self.unit() < p
    }

    /// Uniform index in `0..n`.
    pub fn below(&mut self, n: usize) -> usize {
        self.inner.random_range(0..n)
    }

    /// Independent child stream derived from this one.
    pub fn fork(&mut self) -> RngStream {
        RngStream::new(self.inner.random::<u64>())
    }
}

/// Uniform draw from `[a, b]`.
pub fn rand_uniform<T: Real>(rng: &mut RngStream, a: T, b: T) -> Result<T> {
    rng.uniform(a, b)
}
