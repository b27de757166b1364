//! Seeded instance generators.

use crate::perm::{Instance, Permutation, WeightVector};
use crate::rng::subrng;
use rand::Rng;

/// `m` independent uniform permutations of `{1..n}`.
pub fn uniform_instance(n: usize, m: usize, seed: u64) -> Instance {
    let perms = (0..m)
        .map(|i| Permutation::random(n, &mut subrng(seed, "gen/uniform", i as u64)))
        .collect();
    Instance::unweighted(perms).expect("generated members share n")
}

/// A planted-median instance: a hidden center, and `m` members each obtained
/// from it by `noise_moves` random remove-reinsert moves.  Returns the
/// instance and the planted center (the ground truth for recovery tests).
pub fn planted_instance(n: usize, m: usize, noise_moves: usize, seed: u64) -> (Instance, Permutation) {
    let center = Permutation::random(n, &mut subrng(seed, "gen/planted/center", 0));
    let perms = (0..m)
        .map(|i| {
            let mut rng = subrng(seed, "gen/planted/member", i as u64);
            let mut p = center.clone();
            for _ in 0..noise_moves {
                let from = rng.gen_range(0..n);
                let to = rng.gen_range(0..n);
                p = p.with_move(from, to);
            }
            p
        })
        .collect();
    (
        Instance::unweighted(perms).expect("generated members share n"),
        center,
    )
}

/// Random positive weights on the half-integer grid `{0.5, 1.0, .., 4.0}`.
/// Half-integers keep weighted distance sums exactly representable, so
/// equality tests against brute-force references stay meaningful.
pub fn random_weights(n: usize, seed: u64) -> WeightVector {
    let mut rng = subrng(seed, "gen/weights", 0);
    WeightVector::new((0..n).map(|_| f64::from(rng.gen_range(1..=8u32)) / 2.0).collect())
        .expect("grid weights are positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist;

    #[test]
    fn uniform_is_reproducible() {
        let a = uniform_instance(6, 4, 9);
        let b = uniform_instance(6, 4, 9);
        assert_eq!(a, b);
        let c = uniform_instance(6, 4, 10);
        assert_ne!(a, c);
    }

    #[test]
    fn planted_members_stay_within_noise_budget() {
        for seed in 0..20 {
            let (inst, center) = planted_instance(12, 5, 1, seed);
            for p in &inst.perms {
                assert!(dist::ulam_move(&center, p).unwrap() <= 1);
            }
        }
    }

    #[test]
    fn weights_are_positive_half_integers() {
        let w = random_weights(32, 3);
        for v in &w.0 {
            assert!(*v > 0.0 && (v * 2.0).fract() == 0.0);
        }
    }
}
