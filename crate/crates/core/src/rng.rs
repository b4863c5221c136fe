//! Seeded random streams. Every consumer derives its generator from the user
//! seed, a domain tag and an index, so results never depend on scheduling.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub(crate) const REPLICA: u64 = 1;
pub(crate) const EXCHANGE: u64 = 2;
pub(crate) const PERMUTATION: u64 = 3;
pub(crate) const GENERATE: u64 = 4;
pub(crate) const TOPOLOGY: u64 = 5;
pub(crate) const SMALL_INSTANCE: u64 = 6;

pub(crate) fn stream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    rng.set_stream(index);
    rng
}
