//! Derivation of per-replica random streams from one master seed.
//!
//! Replica `i` of a run with master seed `s` draws from
//! `Xoshiro256PlusPlus::seed_from_u64(s + i * 0x9E3779B97F4A7C15)` (wrapping
//! arithmetic). Results therefore depend only on `(s, i)`, never on how
//! replicas are spread over threads.

use rand::SeedableRng;
use rand_xoshiro::Xoshiro256PlusPlus;

/// The 64-bit golden-ratio increment.
pub const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

pub fn derive_seed(master: u64, index: u64) -> u64 {
    master.wrapping_add(index.wrapping_mul(GOLDEN))
}

pub fn replica_rng(master: u64, index: u64) -> Xoshiro256PlusPlus {
    Xoshiro256PlusPlus::seed_from_u64(derive_seed(master, index))
}

/// Replicas per parallel work unit.
pub const CHUNK: u64 = 4096;

/// Splits `0..reps` into fixed-size chunks, in order.
pub fn chunks(reps: u64) -> Vec<std::ops::Range<u64>> {
    (0..reps.div_ceil(CHUNK)).map(|c| c * CHUNK..((c + 1) * CHUNK).min(reps)).collect()
}

/// Counts, over `reps` replicas, the outcomes returned by `sample` (each in
/// `0..outcomes`). Replica `i` uses the stream [`replica_rng`]`(master, i)`.
pub fn tally<F>(master: u64, reps: u64, outcomes: usize, sample: F) -> Vec<u64>
where
    F: Fn(&mut Xoshiro256PlusPlus) -> usize + Sync,
{
    use rayon::prelude::*;
    chunks(reps)
        .into_par_iter()
        .map(|range| {
            let mut counts = vec![0u64; outcomes];
            for i in range {
                counts[sample(&mut replica_rng(master, i))] += 1;
            }
            counts
        })
        .reduce(
            || vec![0u64; outcomes],
            |mut a, b| {
                a.iter_mut().zip(b).for_each(|(x, y)| *x += y);
                a
            },
        )
}
