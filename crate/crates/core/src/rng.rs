//! Seeded random streams.
//!
//! Every consumer owns its own ChaCha8 stream. A stream is identified by a
//! 64-bit seed and a 64-bit stream id; ChaCha's native stream parameter keeps
//! streams with the same seed independent. Within an episode with seed `s`:
//!
//! | stream id        | consumer                         |
//! |------------------|----------------------------------|
//! | [`POLICY`]       | the policy's selection draws     |
//! | [`INSTANCE`]     | instance generators              |
//! | `ARM_BASE + i`   | transitions of arm `i`           |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Stream = ChaCha8Rng;

pub const POLICY: u64 = 0;
pub const INSTANCE: u64 = 1;
pub const ARM_BASE: u64 = 2;

/// Derives the stream `id` of `seed`.
pub fn split(seed: u64, id: u64) -> Stream {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

pub fn arm_stream(seed: u64, arm: usize) -> Stream {
    split(seed, ARM_BASE + arm as u64)
}
