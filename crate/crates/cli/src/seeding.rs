//! Deterministic per-trial seeding: trial `i` of a run with master seed
//! `s` always sees the same generator, independent of every other trial,
//! so runs reproduce exactly and trials could be fanned out across workers
//! and merged by index.

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

/// Generator for one trial, derived from the master seed and trial index.
pub fn trial_rng(master: u64, trial: u64) -> ChaCha12Rng {
    ChaCha12Rng::seed_from_u64(splitmix64(master ^ splitmix64(trial)))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e3779b97f4a7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
    z ^ (z >> 31)
}

/// Uniform phase in `1..=n`.
pub fn uniform_phase(rng: &mut dyn RngCore, n: usize) -> usize {
    rng.random_range(1..=n)
}
