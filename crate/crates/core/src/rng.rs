//! Seeded, splittable randomness.
//!
//! Every experiment is driven by one master seed. Trial `i` draws from the
//! ChaCha stream `i` of that seed, so trials can run in any order (or in
//! parallel) and still reproduce bit-for-bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Ks1Rng = ChaCha8Rng;

/// Generator for a standalone run.
pub fn from_seed(seed: u64) -> Ks1Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent generator for trial `index` under `master_seed`.
pub fn trial_rng(master_seed: u64, index: u64) -> Ks1Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
