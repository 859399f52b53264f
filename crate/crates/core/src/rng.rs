//! Replication-indexed random substreams.
//!
//! Every replication draws from its own ChaCha8 generator. The 256-bit key is
//! the master seed (little-endian, bytes 0..8) followed by a domain tag
//! (bytes 8..16) and zeros; the replication index selects the ChaCha stream.
//! Any single replication can therefore be regenerated in isolation, and
//! results do not depend on how replications are scheduled across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Separates the random streams of unrelated simulations sharing one seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u64)]
pub enum Domain {
    NullStatistic = 1,
    LimitSeries = 2,
    LimitBridge = 3,
    Alternative = 4,
}

pub fn substream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&(domain as u64).to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(index);
    rng
}
