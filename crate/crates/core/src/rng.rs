//! Counter-based random substreams.
//!
//! Every Monte Carlo sample owns its own ChaCha stream keyed by
//! `(seed, sample index)`, so results do not depend on evaluation order or
//! on how samples are split across worker threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SampleRng = ChaCha8Rng;

/// Deterministic generator for sample `index` under `seed`.
pub fn substream(seed: u64, index: u64) -> SampleRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}
