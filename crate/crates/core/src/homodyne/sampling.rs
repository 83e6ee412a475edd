//! Monte Carlo draws of homodyne outcomes.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::{outcome_mean, Quadrature, SHOT_NOISE_SIGMA};
use crate::error::{Error, Result};
use crate::hybrid_state::HybridState;

/// Generator behind every sampled outcome. Streams are reproducible across
/// platforms for a given seed.
pub type SimRng = ChaCha8Rng;

pub fn rng_from_seed(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Picks a branch with probability `|c_x|^2`, then adds shot noise around
/// its peak.
#[derive(Debug, Clone)]
pub struct OutcomeSampler {
    cumulative: Vec<f64>,
    means: Vec<f64>,
    noise: Normal<f64>,
}

impl OutcomeSampler {
    pub fn new(state: &HybridState, quadrature: Quadrature) -> Result<Self> {
        let mut cumulative = Vec::with_capacity(state.branches().len());
        let mut acc = 0.0;
        for b in state.branches() {
            acc += b.amp.norm_sqr();
            cumulative.push(acc);
        }
        if !(acc > 0.0 && acc.is_finite()) {
            return Err(Error::InvalidParameter(
                "cannot sample from a state of zero norm".into(),
            ));
        }
        let means = state
            .branches()
            .iter()
            .map(|b| outcome_mean(b.field, quadrature))
            .collect();
        let noise = Normal::new(0.0, SHOT_NOISE_SIGMA).expect("positive sigma");
        Ok(OutcomeSampler {
            cumulative,
            means,
            noise,
        })
    }

    /// Returns `(branch index, outcome)`.
    pub fn sample_with_branch<R: Rng + ?Sized>(&self, rng: &mut R) -> (usize, f64) {
        let total = *self.cumulative.last().expect("nonempty table");
        let u = rng.random::<f64>() * total;
        let x = self
            .cumulative
            .partition_point(|&c| c <= u)
            .min(self.cumulative.len() - 1);
        (x, self.means[x] + self.noise.sample(rng))
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.sample_with_branch(rng).1
    }
}

/// One outcome drawn with a fresh generator seeded by `seed`.
pub fn sample_outcome(state: &HybridState, quadrature: Quadrature, seed: u64) -> Result<f64> {
    let sampler = OutcomeSampler::new(state, quadrature)?;
    Ok(sampler.sample(&mut rng_from_seed(seed)))
}
