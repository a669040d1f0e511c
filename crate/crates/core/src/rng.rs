//! Random draws used by the simulators.
//!
//! Every stochastic operation consumes draws through [`RandomSource`], so the
//! exact sequence of draws is part of each operation's contract. The concrete
//! generator is [`Pcg64`] (PCG XSL RR 128/64), which has published reference
//! output and behaves identically on every platform.

use rand::{Rng, SeedableRng};
pub use rand_pcg::Pcg64;

/// Source of the two kinds of draw the models need.
pub trait RandomSource {
    /// Uniform real in `[0, 1)`.
    fn uniform(&mut self) -> f64;

    /// Uniform index in `[0, n)`. `n` must be positive.
    fn index(&mut self, n: usize) -> usize;

    /// One Bernoulli trial; always consumes exactly one uniform draw.
    fn bernoulli(&mut self, p: f64) -> bool {
        self.uniform() < p
    }
}

impl<R: Rng> RandomSource for R {
    fn uniform(&mut self) -> f64 {
        self.gen::<f64>()
    }

    fn index(&mut self, n: usize) -> usize {
        self.gen_range(0..n)
    }
}

/// Seeded generator used by every simulation entry point.
pub fn seeded(seed: u64) -> Pcg64 {
    Pcg64::seed_from_u64(seed)
}

/// Replays a fixed script of draws. Used to pin down draw-order contracts in
/// tests; panics when the script runs out or a draw of the wrong kind is
/// requested.
#[derive(Debug, Clone, Default)]
pub struct ScriptedSource {
    draws: std::collections::VecDeque<Draw>,
    consumed: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Draw {
    Uniform(f64),
    Index(usize),
}

impl ScriptedSource {
    pub fn new(draws: impl IntoIterator<Item = Draw>) -> Self {
        Self {
            draws: draws.into_iter().collect(),
            consumed: 0,
        }
    }

    pub fn consumed(&self) -> usize {
        self.consumed
    }

    pub fn remaining(&self) -> usize {
        self.draws.len()
    }
}

impl RandomSource for ScriptedSource {
    fn uniform(&mut self) -> f64 {
        self.consumed += 1;
        match self.draws.pop_front() {
            Some(Draw::Uniform(u)) => u,
            other => panic!("scripted source: expected uniform draw, got {other:?}"),
        }
    }

    fn index(&mut self, n: usize) -> usize {
        self.consumed += 1;
        match self.draws.pop_front() {
            Some(Draw::Index(i)) => {
                assert!(i < n, "scripted index {i} out of range 0..{n}");
                i
            }
            other => panic!("scripted source: expected index draw, got {other:?}"),
        }
    }
}
