//! Deterministic seed derivation.
//!
//! Every Monte-Carlo task receives its own RNG seeded by a stable hash of
//! `(master_seed, tags...)`, so results are independent of thread count and
//! task execution order, and any single task can be replayed in isolation.

/// SplitMix64 finalizer; a full-avalanche 64-bit mixer.
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Stable hash of a master seed and a tag path.
pub fn derive(master: u64, tags: &[u64]) -> u64 {
    let mut state = splitmix64(master ^ 0x6a09_e667_f3bc_c908);
    for &t in tags {
        state = splitmix64(state ^ splitmix64(t));
    }
    state
}

/// Experiment-family tags keep seed streams disjoint across subcommands.
pub mod tag {
    pub const SINR_SWEEP: u64 = 1;
    pub const ROC: u64 = 2;
    pub const PD_DELTA: u64 = 3;
    pub const USER_SWEEP: u64 = 4;
}
