pub mod cohomology;
pub mod dump;
pub mod inclusions;
pub mod metrics;
pub mod model;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Independent stream for the `index`-th seeded trial under a base seed.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

pub(crate) fn progress(msg: std::fmt::Arguments<'_>) {
    eprintln!("[fefferman] {msg}");
}
