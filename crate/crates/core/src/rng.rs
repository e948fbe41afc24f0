//! Seed plumbing. Every random stream is derived from a master seed and a
//! stream index so parallel and serial runs draw identical numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Mixes `stream` into `master` with the splitmix64 finalizer.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    let mut z = master ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn stream_rng(master: u64, stream: u64) -> ChaCha8Rng {
    rng_from_seed(derive_seed(master, stream))
}
