//! Thurner model of Schumpeterian product dynamics.
//!
//! `N` product slots each either exist or not. Ordered pairs of existing
//! products push a third product into existence through the creation tensor
//! and out of it through the annihilation tensor (rule #1). On top of that a
//! second rule supplies innovation, either as a random state flip (the
//! original model) or as extinction of the least fit existing product plus
//! random creation of a new one (the fitness-feedback variant).
//!
//! Updates are synchronous: every `Δ_k` is evaluated on the state at time
//! `t` before any product changes.

use std::collections::HashSet;
use std::fmt;

use crate::error::ModelError;
use crate::rng::{self, Pcg64, RandomSource};

/// Existence flags `σ_i(t)` for every product slot.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProductState {
    states: Vec<bool>,
}

impl ProductState {
    /// All `n` products absent.
    pub fn empty(n: usize) -> Self {
        Self {
            states: vec![false; n],
        }
    }

    pub fn from_bools(states: Vec<bool>) -> Self {
        Self { states }
    }

    /// Builds a state from 0/1 values; anything else is rejected.
    pub fn from_bits(bits: &[u8]) -> Result<Self, ModelError> {
        let states = bits
            .iter()
            .enumerate()
            .map(|(i, &b)| match b {
                0 => Ok(false),
                1 => Ok(true),
                _ => Err(ModelError::config(
                    "state",
                    format!("element {i} is {b}, expected 0 or 1"),
                )),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { states })
    }

    pub fn n(&self) -> usize {
        self.states.len()
    }

    pub fn get(&self, i: usize) -> bool {
        self.states[i]
    }

    pub fn set(&mut self, i: usize, exists: bool) {
        self.states[i] = exists;
    }

    /// Number of existing products, `Σσ_i`.
    pub fn diversity(&self) -> usize {
        self.states.iter().filter(|&&s| s).count()
    }

    pub fn existing(&self) -> impl Iterator<Item = usize> + '_ {
        self.states
            .iter()
            .enumerate()
            .filter_map(|(i, &s)| s.then_some(i))
    }

    pub fn as_slice(&self) -> &[bool] {
        &self.states
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.states.iter().map(|&s| u8::from(s)).collect()
    }
}

impl fmt::Debug for ProductState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("ProductState(")?;
        for &s in &self.states {
            f.write_str(if s { "1" } else { "0" })?;
        }
        f.write_str(")")
    }
}

/// Sparse 0/1 third-order tensor `α_ijk`: the set of triples whose entry is 1.
///
/// Triples are kept sorted, plus two lookup tables: targets `k` per ordered
/// pair `(i, j)` and source pairs per target `k`.
#[derive(Clone, PartialEq, Eq)]
pub struct InteractionTensor {
    n: usize,
    triples: Vec<(usize, usize, usize)>,
    pair_offsets: Vec<u32>,
    pair_targets: Vec<u32>,
    target_offsets: Vec<u32>,
    target_sources: Vec<(u32, u32)>,
}

impl InteractionTensor {
    /// Validates and indexes a set of unit entries.
    pub fn new(
        n: usize,
        triples: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self, ModelError> {
        if n == 0 {
            return Err(ModelError::config("n", "must be positive"));
        }
        if n > u32::MAX as usize {
            return Err(ModelError::config("n", "too large"));
        }
        let mut seen = HashSet::new();
        let mut list = Vec::new();
        for (i, j, k) in triples {
            if i >= n || j >= n || k >= n {
                return Err(ModelError::InvalidTriple {
                    triple: (i, j, k),
                    reason: format!("index out of range 0..{n}"),
                });
            }
            if i == j {
                return Err(ModelError::InvalidTriple {
                    triple: (i, j, k),
                    reason: "a product cannot pair with itself".into(),
                });
            }
            if k == i || k == j {
                return Err(ModelError::InvalidTriple {
                    triple: (i, j, k),
                    reason: "target must differ from both ingredients".into(),
                });
            }
            if !seen.insert((i, j, k)) {
                return Err(ModelError::InvalidTriple {
                    triple: (i, j, k),
                    reason: "duplicate entry".into(),
                });
            }
            list.push((i, j, k));
        }
        list.sort_unstable();
        Ok(Self::index(n, list))
    }

    /// Tensor with no unit entries.
    pub fn zeros(n: usize) -> Self {
        Self::index(n, Vec::new())
    }

    fn index(n: usize, triples: Vec<(usize, usize, usize)>) -> Self {
        let mut pair_offsets = vec![0u32; n * n + 1];
        let mut target_offsets = vec![0u32; n + 1];
        for &(i, j, k) in &triples {
            pair_offsets[i * n + j + 1] += 1;
            target_offsets[k + 1] += 1;
        }
        for x in 1..pair_offsets.len() {
            pair_offsets[x] += pair_offsets[x - 1];
        }
        for x in 1..target_offsets.len() {
            target_offsets[x] += target_offsets[x - 1];
        }
        let mut pair_targets = vec![0u32; triples.len()];
        let mut target_sources = vec![(0u32, 0u32); triples.len()];
        let mut pair_fill = pair_offsets.clone();
        let mut target_fill = target_offsets.clone();
        for &(i, j, k) in &triples {
            let p = &mut pair_fill[i * n + j];
            pair_targets[*p as usize] = k as u32;
            *p += 1;
            let t = &mut target_fill[k];
            target_sources[*t as usize] = (i as u32, j as u32);
            *t += 1;
        }
        Self {
            n,
            triples,
            pair_offsets,
            pair_targets,
            target_offsets,
            target_sources,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of unit entries.
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    /// Unit entries in lexicographic `(i, j, k)` order.
    pub fn triples(&self) -> &[(usize, usize, usize)] {
        &self.triples
    }

    pub fn contains(&self, i: usize, j: usize, k: usize) -> bool {
        i < self.n && j < self.n && self.targets(i, j).contains(&(k as u32))
    }

    /// Products `k` with `α_ijk = 1`, ascending.
    pub fn targets(&self, i: usize, j: usize) -> &[u32] {
        let x = i * self.n + j;
        &self.pair_targets[self.pair_offsets[x] as usize..self.pair_offsets[x + 1] as usize]
    }

    /// Ordered pairs `(i, j)` with `α_ijk = 1`.
    pub fn sources(&self, k: usize) -> &[(u32, u32)] {
        &self.target_sources[self.target_offsets[k] as usize..self.target_offsets[k + 1] as usize]
    }
}

impl fmt::Debug for InteractionTensor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("InteractionTensor")
            .field("n", &self.n)
            .field("triples", &self.triples)
            .finish()
    }
}

/// Number of admissible triples `(i, j, k)` with `i ≠ j` and `k ∉ {i, j}`.
pub fn admissible_triples(n: usize) -> usize {
    if n < 3 {
        0
    } else {
        n * (n - 1) * (n - 2)
    }
}

/// Random tensor: every admissible triple is included independently with
/// probability `density`.
///
/// Consumes one uniform draw per admissible triple, visiting triples in
/// lexicographic `(i, j, k)` order.
pub fn build_random_tensor<R: RandomSource + ?Sized>(
    n: usize,
    density: f64,
    rng: &mut R,
) -> Result<InteractionTensor, ModelError> {
    if n < 3 {
        return Err(ModelError::config(
            "n",
            format!("{n} admits no triple with distinct indices; need n >= 3"),
        ));
    }
    check_probability("density", density)?;
    let mut triples = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                if rng.bernoulli(density) {
                    triples.push((i, j, k));
                }
            }
        }
    }
    Ok(InteractionTensor::index(n, triples))
}

/// Per-product fitness `f_i` in `[0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FitnessTable {
    values: Vec<f64>,
}

impl FitnessTable {
    pub fn new(values: Vec<f64>) -> Result<Self, ModelError> {
        if let Some((i, v)) = values
            .iter()
            .enumerate()
            .find(|(_, v)| !(0.0..1.0).contains(*v))
        {
            return Err(ModelError::config(
                "fitness",
                format!("value {v} at index {i} is outside [0, 1)"),
            ));
        }
        Ok(Self { values })
    }

    /// `n` fresh uniform draws, in index order.
    pub fn sample<R: RandomSource + ?Sized>(n: usize, rng: &mut R) -> Self {
        Self {
            values: (0..n).map(|_| rng.uniform()).collect(),
        }
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn resample<R: RandomSource + ?Sized>(&mut self, i: usize, rng: &mut R) {
        self.values[i] = rng.uniform();
    }

    /// Existing product with the smallest fitness; ties go to the lower index.
    pub fn least_fit(&self, state: &ProductState) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for i in state.existing() {
            let f = self.values[i];
            if best.is_none_or(|(_, b)| f < b) {
                best = Some((i, f));
            }
        }
        best.map(|(i, _)| i)
    }
}

/// Which second rule supplies innovation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Rule2Variant {
    /// Flip one random product with probability `p`.
    RandomFlip,
    /// Abolish the least fit existing product every step; create one random
    /// product with probability `p`.
    FitnessExtinction,
}

impl Rule2Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Rule2Variant::RandomFlip => "random-flip",
            Rule2Variant::FitnessExtinction => "fitness",
        }
    }
}

impl fmt::Display for Rule2Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Rule2Variant {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "random-flip" | "flip" => Ok(Rule2Variant::RandomFlip),
            "fitness" | "fitness-extinction" => Ok(Rule2Variant::FitnessExtinction),
            other => Err(ModelError::config(
                "rule2",
                format!("unknown variant {other:?}; expected random-flip or fitness"),
            )),
        }
    }
}

pub const DEFAULT_DENSITY: f64 = 0.1;

/// Parameters of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelConfig {
    pub n: usize,
    /// Innovation probability per time step.
    pub p: f64,
    /// Inclusion probability of each admissible triple in `α⁺`.
    pub density_plus: f64,
    /// Inclusion probability of each admissible triple in `α⁻`.
    pub density_minus: f64,
    pub rule2: Rule2Variant,
    pub seed: u64,
    /// Products set to 1 at `t = 0`, chosen uniformly at random.
    pub initial_diversity: usize,
    /// Product whose 0/1 trajectory is recorded alongside the diversity.
    pub tracked_product: usize,
}

impl Default for ModelConfig {
    fn default() -> Self {
        Self {
            n: 100,
            p: 0.0002,
            density_plus: DEFAULT_DENSITY,
            density_minus: DEFAULT_DENSITY,
            rule2: Rule2Variant::RandomFlip,
            seed: 1,
            initial_diversity: 50,
            tracked_product: 0,
        }
    }
}

impl ModelConfig {
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.n < 3 {
            return Err(ModelError::config(
                "n",
                format!("{} is below the minimum of 3", self.n),
            ));
        }
        check_probability("p", self.p)?;
        check_probability("density_plus", self.density_plus)?;
        check_probability("density_minus", self.density_minus)?;
        if self.initial_diversity == 0 || self.initial_diversity > self.n {
            return Err(ModelError::config(
                "initial_diversity",
                format!("{} must lie in 1..={}", self.initial_diversity, self.n),
            ));
        }
        if self.tracked_product >= self.n {
            return Err(ModelError::config(
                "tracked_product",
                format!("{} must be below n = {}", self.tracked_product, self.n),
            ));
        }
        Ok(())
    }
}

fn check_probability(field: &'static str, v: f64) -> Result<(), ModelError> {
    if (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ModelError::config(field, format!("{v} is outside [0, 1]")))
    }
}

/// What happened during one call to [`Economy::step`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepOutcome {
    /// `Σσ_i(t+1)`.
    pub diversity: usize,
    pub flipped_by_rule1: usize,
    pub extinct_product: Option<usize>,
    pub innovated_product: Option<usize>,
}

fn check_dims(
    state: &ProductState,
    plus: &InteractionTensor,
    minus: &InteractionTensor,
) -> Result<(), ModelError> {
    for found in [plus.n(), minus.n()] {
        if found != state.n() {
            return Err(ModelError::DimensionMismatch {
                expected: state.n(),
                found,
            });
        }
    }
    Ok(())
}

/// `Δ_k = Σ_ij (α⁺_ijk − α⁻_ijk) σ_i σ_j` over ordered pairs.
pub fn compute_delta(
    k: usize,
    state: &ProductState,
    alpha_plus: &InteractionTensor,
    alpha_minus: &InteractionTensor,
) -> Result<i64, ModelError> {
    check_dims(state, alpha_plus, alpha_minus)?;
    if k >= state.n() {
        return Err(ModelError::IndexOutOfRange {
            index: k,
            n: state.n(),
        });
    }
    let active = |&(i, j): &(u32, u32)| state.get(i as usize) && state.get(j as usize);
    let gain = alpha_plus.sources(k).iter().filter(|p| active(p)).count() as i64;
    let loss = alpha_minus.sources(k).iter().filter(|p| active(p)).count() as i64;
    Ok(gain - loss)
}

/// `Δ_k` for every product, walking only pairs of existing products.
fn all_deltas(
    state: &ProductState,
    plus: &InteractionTensor,
    minus: &InteractionTensor,
) -> Vec<i64> {
    let mut delta = vec![0i64; state.n()];
    let existing: Vec<usize> = state.existing().collect();
    for &i in &existing {
        for &j in &existing {
            if i == j {
                continue;
            }
            for &k in plus.targets(i, j) {
                delta[k as usize] += 1;
            }
            for &k in minus.targets(i, j) {
                delta[k as usize] -= 1;
            }
        }
    }
    delta
}

/// Synchronous rule #1: `σ_k → 1` if `Δ_k > 0`, `→ 0` if `Δ_k < 0`,
/// unchanged if `Δ_k = 0`, all `Δ` taken from the input state.
pub fn apply_rule1(
    state: &ProductState,
    alpha_plus: &InteractionTensor,
    alpha_minus: &InteractionTensor,
) -> Result<ProductState, ModelError> {
    check_dims(state, alpha_plus, alpha_minus)?;
    let delta = all_deltas(state, alpha_plus, alpha_minus);
    let states = delta
        .iter()
        .zip(state.as_slice())
        .map(|(&d, &s)| match d.signum() {
            1 => true,
            -1 => false,
            _ => s,
        })
        .collect();
    Ok(ProductState { states })
}

/// Original rule #2. One Bernoulli draw; on success one index draw and that
/// product's state is flipped.
pub fn apply_innovation_flip<R: RandomSource + ?Sized>(
    state: &ProductState,
    p: f64,
    rng: &mut R,
) -> ProductState {
    let mut next = state.clone();
    if rng.bernoulli(p) {
        let l = rng.index(next.n());
        next.set(l, !next.get(l));
    }
    next
}

/// Fitness-feedback rule #2.
///
/// The least fit existing product is abolished (no-op on an empty market).
/// Then, with probability `p`, a uniformly chosen product is set to exist
/// and gets a fresh fitness, whether or not it already existed. Draws:
/// Bernoulli trial, then index, then fitness.
pub fn apply_fitness_extinction<R: RandomSource + ?Sized>(
    state: &ProductState,
    fitness: &FitnessTable,
    p: f64,
    rng: &mut R,
) -> Result<(ProductState, FitnessTable), ModelError> {
    if fitness.n() != state.n() {
        return Err(ModelError::DimensionMismatch {
            expected: state.n(),
            found: fitness.n(),
        });
    }
    let mut next = state.clone();
    let mut fit = fitness.clone();
    if let Some(m) = fit.least_fit(&next) {
        next.set(m, false);
    }
    if rng.bernoulli(p) {
        let j = rng.index(next.n());
        next.set(j, true);
        fit.resample(j, rng);
    }
    Ok((next, fit))
}

/// Product state together with the incrementally maintained `Δ` vector.
#[derive(Debug, Clone)]
struct Market {
    state: ProductState,
    fitness: FitnessTable,
    plus: InteractionTensor,
    minus: InteractionTensor,
    delta: Vec<i64>,
    diversity: usize,
}

impl Market {
    fn new(
        state: ProductState,
        fitness: FitnessTable,
        plus: InteractionTensor,
        minus: InteractionTensor,
    ) -> Self {
        let delta = all_deltas(&state, &plus, &minus);
        let diversity = state.diversity();
        Self {
            state,
            fitness,
            plus,
            minus,
            delta,
            diversity,
        }
    }

    /// Adds or removes `x`, adjusting `Δ` for every pair it forms with the
    /// other existing products.
    fn set(&mut self, x: usize, exists: bool) {
        if self.state.get(x) == exists {
            return;
        }
        let sign = if exists { 1 } else { -1 };
        let n = self.state.n();
        for y in 0..n {
            if y == x || !self.state.get(y) {
                continue;
            }
            for (a, b) in [(x, y), (y, x)] {
                for &k in self.plus.targets(a, b) {
                    self.delta[k as usize] += sign;
                }
                for &k in self.minus.targets(a, b) {
                    self.delta[k as usize] -= sign;
                }
            }
        }
        self.state.set(x, exists);
        if exists {
            self.diversity += 1;
        } else {
            self.diversity -= 1;
        }
    }

    fn step<R: RandomSource + ?Sized>(
        &mut self,
        rule2: Rule2Variant,
        p: f64,
        rng: &mut R,
    ) -> StepOutcome {
        let n = self.state.n();
        let changes: Vec<(usize, bool)> = (0..n)
            .filter_map(|k| {
                let d = self.delta[k];
                let s = self.state.get(k);
                if d > 0 && !s {
                    Some((k, true))
                } else if d < 0 && s {
                    Some((k, false))
                } else {
                    None
                }
            })
            .collect();
        for &(k, exists) in &changes {
            self.set(k, exists);
        }

        let mut extinct_product = None;
        let mut innovated_product = None;
        match rule2 {
            Rule2Variant::RandomFlip => {
                if rng.bernoulli(p) {
                    let l = rng.index(n);
                    self.set(l, !self.state.get(l));
                    innovated_product = Some(l);
                }
            }
            Rule2Variant::FitnessExtinction => {
                for &(k, exists) in &changes {
                    if exists {
                        self.fitness.resample(k, rng);
                    }
                }
                if let Some(m) = self.fitness.least_fit(&self.state) {
                    self.set(m, false);
                    extinct_product = Some(m);
                }
                if rng.bernoulli(p) {
                    let j = rng.index(n);
                    self.set(j, true);
                    self.fitness.resample(j, rng);
                    innovated_product = Some(j);
                }
            }
        }

        StepOutcome {
            diversity: self.diversity,
            flipped_by_rule1: changes.len(),
            extinct_product,
            innovated_product,
        }
    }
}

/// A running Thurner-model economy: configuration, tensors, state, fitness
/// and its own seeded generator.
#[derive(Debug, Clone)]
pub struct Economy {
    config: ModelConfig,
    market: Market,
    rng: Pcg64,
    time: u64,
}

impl Economy {
    /// Seeds the generator from `config.seed`, then draws `α⁺`, `α⁻`, the
    /// initial set of existing products (partial Fisher-Yates) and the full
    /// fitness table, in that order.
    pub fn new(config: ModelConfig) -> Result<Self, ModelError> {
        config.validate()?;
        let mut rng = rng::seeded(config.seed);
        let plus = build_random_tensor(config.n, config.density_plus, &mut rng)?;
        let minus = build_random_tensor(config.n, config.density_minus, &mut rng)?;
        let mut slots: Vec<usize> = (0..config.n).collect();
        let mut state = ProductState::empty(config.n);
        for m in 0..config.initial_diversity {
            let pick = m + rng.index(config.n - m);
            slots.swap(m, pick);
            state.set(slots[m], true);
        }
        let fitness = FitnessTable::sample(config.n, &mut rng);
        Ok(Self {
            market: Market::new(state, fitness, plus, minus),
            config,
            rng,
            time: 0,
        })
    }

    /// Economy with explicitly given parts; the generator is still seeded
    /// from `config.seed`. `config.n` and `initial_diversity` are taken from
    /// the state.
    pub fn from_parts(
        mut config: ModelConfig,
        state: ProductState,
        fitness: FitnessTable,
        alpha_plus: InteractionTensor,
        alpha_minus: InteractionTensor,
    ) -> Result<Self, ModelError> {
        check_dims(&state, &alpha_plus, &alpha_minus)?;
        if fitness.n() != state.n() {
            return Err(ModelError::DimensionMismatch {
                expected: state.n(),
                found: fitness.n(),
            });
        }
        config.n = state.n();
        config.initial_diversity = state.diversity().max(1);
        config.validate()?;
        Ok(Self {
            market: Market::new(state, fitness, alpha_plus, alpha_minus),
            rng: rng::seeded(config.seed),
            config,
            time: 0,
        })
    }

    /// Rule #1, then the configured rule #2, using the internal generator.
    pub fn step(&mut self) -> StepOutcome {
        let Self {
            config,
            market,
            rng,
            time,
        } = self;
        *time += 1;
        market.step(config.rule2, config.p, rng)
    }

    /// Same as [`Economy::step`] with an external source of draws.
    ///
    /// Under `FitnessExtinction` the draw order is: one fitness per product
    /// created by rule #1 (ascending index), the innovation trial, then the
    /// innovation index and fitness.
    pub fn step_with<R: RandomSource + ?Sized>(&mut self, rng: &mut R) -> StepOutcome {
        self.time += 1;
        self.market.step(self.config.rule2, self.config.p, rng)
    }

    pub fn config(&self) -> &ModelConfig {
        &self.config
    }

    pub fn state(&self) -> &ProductState {
        &self.market.state
    }

    pub fn fitness(&self) -> &FitnessTable {
        &self.market.fitness
    }

    pub fn alpha_plus(&self) -> &InteractionTensor {
        &self.market.plus
    }

    pub fn alpha_minus(&self) -> &InteractionTensor {
        &self.market.minus
    }

    pub fn diversity(&self) -> usize {
        self.market.diversity
    }

    /// Steps taken so far.
    pub fn time(&self) -> u64 {
        self.time
    }

    #[cfg(test)]
    fn cached_delta(&self) -> &[i64] {
        &self.market.delta
    }
}

/// One recorded time step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StepRecord {
    /// 1 for the state after the first step.
    pub t: u64,
    pub diversity: u32,
    pub tracked_state: bool,
}

/// Buffered output of [`run`].
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Trajectory {
    /// `Σσ_i` after every step.
    pub diversity: Vec<u32>,
    /// State of the tracked product after every step.
    pub tracked: Vec<bool>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.diversity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.diversity.is_empty()
    }
}

/// Bytes held per buffered step.
pub const RECORD_BYTES: u64 = (std::mem::size_of::<u32>() + std::mem::size_of::<bool>()) as u64;

/// Default cap on memory used by [`run`]; use [`run_streaming`] beyond it.
pub const DEFAULT_MEMORY_BUDGET: u64 = 1 << 30;

/// Simulates `steps` steps, handing each record to `sink` as it is produced.
pub fn run_streaming<F, E>(config: &ModelConfig, steps: u64, mut sink: F) -> Result<(), E>
where
    F: FnMut(StepRecord) -> Result<(), E>,
    E: From<ModelError>,
{
    if steps == 0 {
        return Err(ModelError::config("steps", "must be at least 1").into());
    }
    let mut economy = Economy::new(config.clone())?;
    let tracked = config.tracked_product;
    for t in 1..=steps {
        let outcome = economy.step();
        sink(StepRecord {
            t,
            diversity: outcome.diversity as u32,
            tracked_state: economy.state().get(tracked),
        })?;
    }
    Ok(())
}

/// Simulates and buffers the whole trajectory, refusing runs larger than
/// [`DEFAULT_MEMORY_BUDGET`].
pub fn run(config: &ModelConfig, steps: u64) -> Result<Trajectory, ModelError> {
    run_with_budget(config, steps, DEFAULT_MEMORY_BUDGET)
}

pub fn run_with_budget(
    config: &ModelConfig,
    steps: u64,
    budget_bytes: u64,
) -> Result<Trajectory, ModelError> {
    let needed = steps.saturating_mul(RECORD_BYTES);
    if needed > budget_bytes {
        return Err(ModelError::MemoryBudget {
            needed,
            budget: budget_bytes,
        });
    }
    let mut out = Trajectory {
        diversity: Vec::with_capacity(steps as usize),
        tracked: Vec::with_capacity(steps as usize),
    };
    run_streaming(config, steps, |rec| {
        out.diversity.push(rec.diversity);
        out.tracked.push(rec.tracked_state);
        Ok::<_, ModelError>(())
    })?;
    Ok(out)
}
