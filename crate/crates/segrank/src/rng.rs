//! Deterministic random-number contract.
//!
//! Everything stochastic in this crate draws from ChaCha8 streams derived
//! from a user-supplied 64-bit seed: stream k of seed s is ChaCha8 seeded
//! with s on stream index k. Substreams are independent, so work items
//! (bootstrap samples, synthetic cases) can run in parallel in any order
//! and still produce bit-identical results to a serial run, on every
//! platform.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Generator for substream `stream` of `seed`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mix a master seed with context tags (case index, team index, ...) into a
/// derived seed. Deterministic and sensitive to tag order, so distinct work
/// items get independent generators.
pub fn derive_seed(master: u64, tags: &[u64]) -> u64 {
    let mut h = splitmix64(master);
    for &t in tags {
        h = splitmix64(h ^ splitmix64(t));
    }
    h
}
