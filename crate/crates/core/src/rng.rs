//! Seeded, splittable random streams.
//!
//! Every stochastic routine derives one stream per replicate index from a
//! single master seed, so a replicate's draws never depend on which worker
//! ran it or in what order.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// The generator used throughout the crate.
pub type Stream = ChaCha8Rng;

/// Independent stream number `index` under `master_seed`.
pub fn substream(master_seed: u64, index: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(index);
    rng
}
