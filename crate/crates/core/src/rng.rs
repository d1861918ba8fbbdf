//! Seeded random sources.
//!
//! Every random draw in the crate comes from a ChaCha8 stream keyed by a
//! 64-bit seed. A seed owns 2^64 independent streams; modules use disjoint
//! stream ranges so that one global seed drives all of them without overlap:
//!
//! | stream range              | consumer                                   |
//! |---------------------------|--------------------------------------------|
//! | `0 .. 2^32`               | spacings (stream `a` = attempt `a`)        |
//! | `2^32 .. 2^33`            | Monkey Twitter (stream `2^32 + shard`)     |

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Identity of the generator, written into output metadata.
pub const PRNG_ID: &str = "chacha8/rand_chacha-0.3/seed_from_u64+set_stream";

pub const SPACINGS_STREAM_BASE: u64 = 0;
pub const TWITTER_STREAM_BASE: u64 = 1 << 32;

/// The generator for `(seed, stream)`.
pub fn substream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}
