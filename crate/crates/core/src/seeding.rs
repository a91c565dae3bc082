//! Counter-based seeding for reproducible parallel replication.
//!
//! Replication `i` under master seed `s` always draws from ChaCha8 keyed by
//! `s` on stream `i`, so results do not depend on the thread count or the
//! order in which replications are scheduled.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use std::ops::Range;

/// Seed used when the caller does not provide one.
pub const DEFAULT_SEED: u64 = 20_240_917;

/// Replications per reduction block. Fixed so block partial sums are
/// identical regardless of how rayon splits the work.
pub const BLOCK: u64 = 1024;

/// Independent generator for one replication.
pub fn replication_rng(master: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(master);
    rng.set_stream(index);
    rng
}

/// Map `f` over fixed-size blocks of `0..count` in parallel and return the
/// block results in index order.
pub fn map_blocks<T, F>(count: u64, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(Range<u64>) -> T + Sync + Send,
{
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map(|b| {
            let start = b * BLOCK;
            f(start..(start + BLOCK).min(count))
        })
        .collect()
}

/// Like [`map_blocks`] but with per-worker scratch state.
pub fn map_blocks_init<T, S, I, F>(count: u64, init: I, f: F) -> Vec<T>
where
    T: Send,
    I: Fn() -> S + Sync + Send,
    F: Fn(&mut S, Range<u64>) -> T + Sync + Send,
{
    let blocks = count.div_ceil(BLOCK);
    (0..blocks)
        .into_par_iter()
        .map_init(&init, |state, b| {
            let start = b * BLOCK;
            f(state, start..(start + BLOCK).min(count))
        })
        .collect()
}
