//! Seeded point sampling. ChaCha8 keeps streams identical across platforms.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

#[derive(Debug, Clone)]
pub struct PointSampler {
    rng: ChaCha8Rng,
}

impl PointSampler {
    pub fn new(seed: u64) -> Self {
        PointSampler { rng: ChaCha8Rng::seed_from_u64(seed) }
    }

    /// Uniform on `[−half_width, half_width]^dim`.
    pub fn cube(&mut self, dim: usize, half_width: f64) -> Vec<f64> {
        (0..dim).map(|_| self.rng.random_range(-half_width..=half_width)).collect()
    }

    /// Uniform direction with `|u|` uniform in `[r_min, r_max]`.
    pub fn shell(&mut self, dim: usize, r_min: f64, r_max: f64) -> Vec<f64> {
        let g: Vec<f64> = (0..dim).map(|_| self.rng.sample(StandardNormal)).collect();
        let n = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        let r = self.rng.random_range(r_min..=r_max);
        g.into_iter().map(|v| v * r / n).collect()
    }
}
