//! Seeded random streams and samplers.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type SnfRng = ChaCha8Rng;

/// Independent stream `index` derived from `seed`.
pub fn stream(seed: u64, index: u64) -> SnfRng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform permutation of `[0, n)` as an image array.
pub fn random_images<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<u8> {
    let mut v: Vec<u8> = (0..n as u8).collect();
    v.shuffle(rng);
    v
}

/// Uniform `k`-subset of `[0, n)` as a bitmask.
pub fn random_subset_mask<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> u32 {
    let picked = rand::seq::index::sample(rng, n, k);
    picked.iter().fold(0u32, |m, i| m | (1 << i))
}

/// Splits `samples` into fixed blocks so that parallel sampling is
/// reproducible regardless of thread count.
pub(crate) fn blocks(samples: u64, block: u64) -> Vec<(u64, u64)> {
    let count = samples.div_ceil(block);
    (0..count).map(|b| (b, (samples - b * block).min(block))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn streams_are_distinct_and_repeatable() {
        let a: u64 = stream(7, 0).random();
        let b: u64 = stream(7, 1).random();
        assert_ne!(a, b);
        assert_eq!(a, stream(7, 0).random::<u64>());
    }

    #[test]
    fn subset_masks_have_requested_size() {
        let mut rng = stream(1, 0);
        for k in 0..=10 {
            assert_eq!(random_subset_mask(10, k, &mut rng).count_ones() as usize, k);
        }
        let mut p = random_images(9, &mut rng);
        p.sort();
        assert_eq!(p, (0..9).collect::<Vec<u8>>());
    }

    #[test]
    fn blocks_cover_samples() {
        let b = blocks(10_001, 1000);
        assert_eq!(b.len(), 11);
        assert_eq!(b.iter().map(|x| x.1).sum::<u64>(), 10_001);
    }
}
