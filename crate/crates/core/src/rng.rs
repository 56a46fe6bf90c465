//! Seeded random streams.
//!
//! Every stochastic stage of a trial draws from its own ChaCha stream derived
//! from the trial seed, so that changing how many draws one stage consumes
//! never perturbs another stage.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SimRng = ChaCha8Rng;

/// Independent sub-streams of one trial seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Stage {
    Scene = 1,
    Association = 2,
    Pso = 3,
    Ga = 4,
    Random = 5,
}

pub fn seeded(seed: u64) -> SimRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stage_stream(seed: u64, stage: Stage) -> SimRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stage as u64);
    rng
}

/// Trial seed: base seed XOR trial index.
pub fn trial_seed(base: u64, trial_index: u64) -> u64 {
    base ^ trial_index
}
