//! Random streams and the gamma sampler.
//!
//! All simulation randomness comes from ChaCha8 (`rand_chacha`). A run is
//! identified by a 64-bit seed; work is cut into fixed-size chunks and chunk
//! `k` draws from ChaCha8 stream `k` of that seed. Results therefore never
//! depend on how chunks are scheduled across threads.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub use rand_chacha::ChaCha8Rng as StreamRng;

/// Deterministic generator for chunk `stream` of run `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Gamma(shape, scale) sampler using the Marsaglia-Tsang squeeze method,
/// with the `U^(1/shape)` boost for shapes below one.
#[derive(Debug, Clone, Copy)]
pub struct GammaSampler {
    shape: f64,
    scale: f64,
    d: f64,
    c: f64,
    boost: bool,
}

impl GammaSampler {
    pub fn new(shape: f64, scale: f64) -> Self {
        assert!(shape > 0.0 && scale > 0.0, "gamma sampler needs positive parameters");
        let boost = shape < 1.0;
        let a = if boost { shape + 1.0 } else { shape };
        let d = a - 1.0 / 3.0;
        Self { shape, scale, d, c: 1.0 / (9.0 * d).sqrt(), boost }
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let g = loop {
            let x: f64 = rng.sample(StandardNormal);
            let t = 1.0 + self.c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u: f64 = rng.sample(Open01);
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                break self.d * v;
            }
        };
        let g = if self.boost {
            let u: f64 = rng.sample(Open01);
            g * u.powf(1.0 / self.shape)
        } else {
            g
        };
        g * self.scale
    }
}
