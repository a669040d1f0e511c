//! One-dimensional Bak-Sneppen model on a ring, and a control variant in
//! which the extinct species is picked at random instead of by fitness.
//!
//! Each step one species goes extinct and it and its two ring neighbours get
//! fresh uniform fitness values. Both variants report the fitness the extinct
//! species had, so the same avalanche construction applies to either.

use crate::error::ModelError;
use crate::rng::{self, RandomSource};

pub const DEFAULT_LATTICE_SIZE: usize = 200;
pub const DEFAULT_THRESHOLD: f64 = 0.6;
pub const DEFAULT_STEPS: u64 = 1_000_000;

/// Species fitness values on a periodic lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessLattice {
    fitness: Vec<f64>,
}

impl FitnessLattice {
    pub fn new(fitness: Vec<f64>) -> Result<Self, ModelError> {
        if fitness.len() < 3 {
            return Err(ModelError::config(
                "l",
                format!("lattice of {} sites; need at least 3", fitness.len()),
            ));
        }
        if let Some(v) = fitness.iter().find(|v| !(0.0..1.0).contains(*v)) {
            return Err(ModelError::config(
                "fitness",
                format!("{v} is outside [0, 1)"),
            ));
        }
        Ok(Self { fitness })
    }

    /// `l` uniform draws in site order.
    pub fn random<R: RandomSource + ?Sized>(l: usize, rng: &mut R) -> Result<Self, ModelError> {
        if l < 3 {
            return Err(ModelError::config(
                "l",
                format!("{l} is below the minimum of 3"),
            ));
        }
        Ok(Self {
            fitness: (0..l).map(|_| rng.uniform()).collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.fitness.len()
    }

    pub fn is_empty(&self) -> bool {
        self.fitness.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.fitness
    }

    /// Site of the smallest fitness, lowest index on ties.
    pub fn min_site(&self) -> (usize, f64) {
        let mut best = (0, self.fitness[0]);
        for (i, &f) in self.fitness.iter().enumerate().skip(1) {
            if f < best.1 {
                best = (i, f);
            }
        }
        best
    }

    /// Replaces `site`, then its left and then its right neighbour, with
    /// fresh draws.
    fn renew<R: RandomSource + ?Sized>(&mut self, site: usize, rng: &mut R) {
        let l = self.fitness.len();
        self.fitness[site] = rng.uniform();
        self.fitness[(site + l - 1) % l] = rng.uniform();
        self.fitness[(site + 1) % l] = rng.uniform();
    }
}

/// An extinction event: where, and the fitness the species had.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extinction {
    pub site: usize,
    pub fitness: f64,
}

/// Standard Bak-Sneppen update: the least fit species and its neighbours are
/// renewed. Three uniform draws.
pub fn bs_step<R: RandomSource + ?Sized>(lattice: &mut FitnessLattice, rng: &mut R) -> Extinction {
    let (site, fitness) = lattice.min_site();
    lattice.renew(site, rng);
    Extinction { site, fitness }
}

/// Control update: a uniformly chosen species and its neighbours are renewed.
/// One index draw, then three uniform draws.
pub fn bs_step_random_extinction<R: RandomSource + ?Sized>(
    lattice: &mut FitnessLattice,
    rng: &mut R,
) -> Extinction {
    let site = rng.index(lattice.len());
    let fitness = lattice.fitness[site];
    lattice.renew(site, rng);
    Extinction { site, fitness }
}

/// Lengths of `f₀`-avalanches.
#[derive(Debug, Clone, PartialEq)]
pub struct AvalancheRecord {
    pub sizes: Vec<u64>,
    pub threshold: f64,
}

/// Maximal runs of consecutive extinction values below `threshold`.
pub fn detect_avalanches(values: &[f64], threshold: f64) -> Result<AvalancheRecord, ModelError> {
    if !(threshold > 0.0 && threshold < 1.0) {
        return Err(ModelError::config(
            "threshold",
            format!("{threshold} is outside (0, 1)"),
        ));
    }
    let mut sizes = Vec::new();
    let mut run = 0u64;
    for &v in values {
        if v < threshold {
            run += 1;
        } else if run > 0 {
            sizes.push(run);
            run = 0;
        }
    }
    if run > 0 {
        sizes.push(run);
    }
    Ok(AvalancheRecord { sizes, threshold })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ExtinctionRule {
    /// Least fit species goes extinct.
    Minimum,
    /// A uniformly random species goes extinct.
    Random,
}

impl ExtinctionRule {
    pub fn as_str(self) -> &'static str {
        match self {
            ExtinctionRule::Minimum => "minimum",
            ExtinctionRule::Random => "random",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsConfig {
    pub l: usize,
    pub steps: u64,
    pub threshold: f64,
    pub rule: ExtinctionRule,
    pub seed: u64,
}

impl Default for BsConfig {
    fn default() -> Self {
        Self {
            l: DEFAULT_LATTICE_SIZE,
            steps: DEFAULT_STEPS,
            threshold: DEFAULT_THRESHOLD,
            rule: ExtinctionRule::Minimum,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsRun {
    pub avalanches: AvalancheRecord,
    pub final_lattice: FitnessLattice,
    /// Steps whose extinct fitness was below the threshold.
    pub below_threshold: u64,
    /// Mean fitness of the extinct species over the run.
    pub mean_extinct_fitness: f64,
}

/// Runs a seeded lattice from a uniform random start and collects
/// `f₀`-avalanches on the series of extinct-species fitness values.
pub fn run_bs(config: &BsConfig) -> Result<BsRun, ModelError> {
    if config.steps == 0 {
        return Err(ModelError::config("steps", "must be at least 1"));
    }
    let mut rng = rng::seeded(config.seed);
    let mut lattice = FitnessLattice::random(config.l, &mut rng)?;
    let mut values = Vec::with_capacity(config.steps as usize);
    for _ in 0..config.steps {
        let e = match config.rule {
            ExtinctionRule::Minimum => bs_step(&mut lattice, &mut rng),
            ExtinctionRule::Random => bs_step_random_extinction(&mut lattice, &mut rng),
        };
        values.push(e.fitness);
    }
    let avalanches = detect_avalanches(&values, config.threshold)?;
    let below_threshold = values.iter().filter(|&&v| v < config.threshold).count() as u64;
    let mean_extinct_fitness = values.iter().sum::<f64>() / values.len() as f64;
    Ok(BsRun {
        avalanches,
        final_lattice: lattice,
        below_threshold,
        mean_extinct_fitness,
    })
}
