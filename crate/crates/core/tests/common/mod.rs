//! Synthetic samples with known parameters, generated independently of the
//! estimators under test.
#![allow(dead_code)]

use rand::{Rng, SeedableRng};
use rand_distr::{Distribution, Zeta};
use rand_pcg::Pcg64;

/// Integer durations with `P(τ) ∝ e^{-λτ}` on `τ ≥ 1`: `1 + ⌊E⌋` with
/// `E ~ Exp(λ)` (equivalently `⌈E⌉`).
pub fn exponential_durations(rate: f64, samples: usize, seed: u64) -> Vec<u64> {
    let mut rng = Pcg64::seed_from_u64(seed);
    (0..samples)
        .map(|_| {
            let u: f64 = rng.gen();
            1 + (-(1.0 - u).ln() / rate).floor() as u64
        })
        .collect()
}

/// Discrete power law `P(τ) = τ^{-α}/ζ(α)` on `τ ≥ 1`.
pub fn powerlaw_durations(alpha: f64, samples: usize, seed: u64) -> Vec<u64> {
    let mut rng = Pcg64::seed_from_u64(seed);
    let zeta = Zeta::new(alpha).unwrap();
    (0..samples).map(|_| zeta.sample(&mut rng) as u64).collect()
}
