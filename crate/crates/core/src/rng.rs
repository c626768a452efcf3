//! Seeded random streams and the shard plan used by every Monte Carlo routine.
//!
//! A run is identified by a master [`Seed`]. Trials are grouped into fixed-size
//! shards; shard `i` draws from the ChaCha stream `i` of that seed. Results are
//! collected in trial order, so the output does not depend on how many worker
//! threads executed the shards.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub type StreamRng = ChaCha8Rng;

/// Number of trials per shard. Part of the reproducibility contract.
pub const SHARD_SIZE: usize = 64;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Seed(pub u64);

impl Seed {
    /// Domain-separated child seed: SHA-256 of the tag followed by the parent seed.
    pub fn derive(self, tag: &str) -> Seed {
        let mut h = Sha256::new();
        h.update(tag.as_bytes());
        h.update([0u8]);
        h.update(self.0.to_le_bytes());
        let digest = h.finalize();
        let mut word = [0u8; 8];
        word.copy_from_slice(&digest[..8]);
        Seed(u64::from_le_bytes(word))
    }

    pub fn rng(self) -> StreamRng {
        ChaCha8Rng::seed_from_u64(self.0)
    }

    pub fn shard_rng(self, shard: u64) -> StreamRng {
        let mut rng = self.rng();
        rng.set_stream(shard);
        rng
    }
}

impl From<u64> for Seed {
    fn from(v: u64) -> Self {
        Seed(v)
    }
}

/// Runs `f` once per trial and returns the results in trial order.
pub fn sharded_map<T, F>(seed: Seed, trials: usize, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut StreamRng) -> T + Sync,
{
    let shards = trials.div_ceil(SHARD_SIZE);
    let chunks: Vec<Vec<T>> = (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.shard_rng(s as u64);
            let count = SHARD_SIZE.min(trials - s * SHARD_SIZE);
            (0..count).map(|_| f(&mut rng)).collect()
        })
        .collect();
    chunks.into_iter().flatten().collect()
}

/// Like [`sharded_map`] but the closure may fail; the first error in trial order wins.
pub fn try_sharded_map<T, E, F>(seed: Seed, trials: usize, f: F) -> Result<Vec<T>, E>
where
    T: Send,
    E: Send,
    F: Fn(&mut StreamRng) -> Result<T, E> + Sync,
{
    sharded_map(seed, trials, f).into_iter().collect()
}

/// Folds each shard's trials into its own accumulator and returns the
/// accumulators in shard order, ready for an order-fixed reduction.
pub fn sharded_try_fold<A, E, I, F>(seed: Seed, trials: usize, init: I, f: F) -> Result<Vec<A>, E>
where
    A: Send,
    E: Send,
    I: Fn() -> A + Sync,
    F: Fn(&mut A, &mut StreamRng) -> Result<(), E> + Sync,
{
    let shards = trials.div_ceil(SHARD_SIZE);
    (0..shards)
        .into_par_iter()
        .map(|s| {
            let mut rng = seed.shard_rng(s as u64);
            let mut acc = init();
            for _ in 0..SHARD_SIZE.min(trials - s * SHARD_SIZE) {
                f(&mut acc, &mut rng)?;
            }
            Ok(acc)
        })
        .collect()
}
