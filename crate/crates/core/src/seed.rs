//! Seeded random streams. Every stochastic stage draws from its own
//! ChaCha stream derived from the run seed, so stages never perturb each other.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Named substreams of a run seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stream {
    Hypotheses = 1,
    Sampling = 2,
    Baseline = 3,
    Fixtures = 4,
}

pub fn rng(seed: u64, stream: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream as u64);
    rng
}
