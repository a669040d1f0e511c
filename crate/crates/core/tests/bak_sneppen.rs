use schumpeter_core::analysis::fit::{DEFAULT_COMPARISON_THRESHOLD, DEFAULT_TAU_MIN};
use schumpeter_core::analysis::{compare_families, PlateauList, Verdict};
use schumpeter_core::bak_sneppen::{run_bs, BsConfig, ExtinctionRule};

fn config(rule: ExtinctionRule, seed: u64) -> BsConfig {
    BsConfig {
        rule,
        seed,
        ..BsConfig::default()
    }
}

/// One-sample KS statistic against the uniform law on [0, 1).
fn ks_uniform(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max)
}

#[test]
fn selection_drives_fitness_above_threshold_band() {
    let run = run_bs(&config(ExtinctionRule::Minimum, 1)).unwrap();
    let low = run
        .final_lattice
        .values()
        .iter()
        .filter(|&&f| f < 0.55)
        .count();
    let frac = low as f64 / run.final_lattice.len() as f64;
    assert!(frac < 0.05, "{frac}");
}

#[test]
fn random_extinction_keeps_uniform_marginal() {
    for seed in 1..=3 {
        let run = run_bs(&config(ExtinctionRule::Random, seed)).unwrap();
        // Critical value of the KS statistic at significance 0.001 for n = 200.
        let d = ks_uniform(run.final_lattice.values());
        assert!(d < 1.949 / (200f64).sqrt(), "seed {seed}: D = {d}");
        assert!((run.mean_extinct_fitness - 0.5).abs() < 0.01);
    }
}

#[test]
fn avalanche_sizes_conserve_below_threshold_steps() {
    for rule in [ExtinctionRule::Minimum, ExtinctionRule::Random] {
        let run = run_bs(&config(rule, 2)).unwrap();
        assert_eq!(
            run.avalanches.sizes.iter().sum::<u64>(),
            run.below_threshold
        );
    }
}

#[test]
fn random_extinction_avalanches_are_not_power_law() {
    let control = run_bs(&config(ExtinctionRule::Random, 1)).unwrap();
    let c = compare_families(
        &PlateauList::new(control.avalanches.sizes).unwrap(),
        DEFAULT_TAU_MIN,
        DEFAULT_COMPARISON_THRESHOLD,
    )
    .unwrap();
    assert_eq!(c.verdict, Verdict::ExponentialPreferred);
}
