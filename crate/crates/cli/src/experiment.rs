//! Running experiments: simulate, analyze, write artifacts; and sweeps over
//! seeds, innovation rates or extinction rules.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use schumpeter_core::analysis::fit::DEFAULT_TAU_MIN;
use schumpeter_core::analysis::{
    compare_families, fit_powerlaw, AnalysisError, Comparison, FitReport, PlateauList,
    PlateauTracker, TauMin,
};
use schumpeter_core::bak_sneppen::{
    bs_step, bs_step_random_extinction, detect_avalanches, ExtinctionRule, FitnessLattice,
};
use schumpeter_core::model::{run_streaming, ModelConfig};
use schumpeter_core::rng;

use crate::config::{resolve, AnalysisConfig, Artifact, BsSettings, ExperimentConfig, Simulation};
use crate::error::{ExperimentError, EXIT_OK};
use crate::output::{self, CsvSink, KeyValues};

/// Chooses the cutoff (resolving `auto`) and compares the two families.
pub fn analyze_durations(
    plateaus: &PlateauList,
    analysis: &AnalysisConfig,
) -> Result<Comparison, AnalysisError> {
    let tau_min = match analysis.tau_min {
        TauMin::Fixed(t) => t,
        TauMin::Auto => match fit_powerlaw(plateaus, TauMin::Auto) {
            Ok(fit) => fit.tau_min,
            Err(AnalysisError::InsufficientData { .. }) => DEFAULT_TAU_MIN,
            Err(e) => return Err(e),
        },
    };
    compare_families(plateaus, tau_min, analysis.threshold)
}

/// Result of one simulation and its analysis.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    /// Length of the series the durations were extracted from.
    pub analyzed_steps: u64,
    /// Plateau durations (Thurner) or avalanche sizes (Bak-Sneppen).
    pub plateaus: PlateauList,
    pub comparison: Comparison,
    /// Comparison for the flat segments of the tracked product's staircase.
    pub tracked: Option<Comparison>,
    /// Everything written to `summary.txt`.
    pub values: KeyValues,
}

impl RunSummary {
    /// Fails with the data floor when no family comparison was possible.
    fn check_sufficient(&self) -> Result<(), ExperimentError> {
        if self.comparison.exponential.is_some() {
            return Ok(());
        }
        let tau_min = self.comparison.tau_min;
        Err(AnalysisError::InsufficientData {
            needed: schumpeter_core::analysis::fit::MIN_FIT_SAMPLES,
            found: self.plateaus.tail(tau_min).len(),
            tau_min,
        }
        .into())
    }
}

fn push_fit_values(kv: &mut KeyValues, c: &Comparison) {
    let exp = c.exponential.as_ref();
    let pl = c.power_law.as_ref();
    kv.push("verdict", c.verdict);
    kv.push("tau_min", c.tau_min);
    kv.push_opt("n_tail", exp.map(|f| f.n_tail));
    kv.push_opt("llr", c.log_likelihood_ratio);
    kv.push_opt("llr_per_sample", c.normalized_ratio);
    kv.push_opt("lambda", exp.map(|f| f.parameter));
    kv.push_opt("slope_semilog", exp.and_then(|f| f.regression_slope));
    kv.push_opt("r2_semilog", exp.map(|f| f.goodness));
    kv.push_opt("ks_exponential", exp.map(|f| f.ks_distance));
    kv.push_opt("alpha_mle", pl.map(|f| f.parameter));
    kv.push_opt("slope_loglog", pl.and_then(|f| f.regression_slope));
    kv.push_opt("r2_loglog", pl.map(|f| f.goodness));
    kv.push_opt("ks_powerlaw", pl.map(|f| f.ks_distance));
}

fn push_plateau_values(kv: &mut KeyValues, plateaus: &PlateauList) {
    kv.push("n_plateaus", plateaus.len());
    kv.push("plateau_total", plateaus.total());
    kv.push_opt("max_tau", plateaus.max());
    kv.push_opt("median_tau", plateaus.median());
}

fn fmt_fit(f: Option<&FitReport>, name: &str, slope_name: &str) -> String {
    match f {
        None => format!("  {name}: not fitted (too few durations above the cutoff)\n"),
        Some(f) => format!(
            "  {name}: parameter {:.6}, {slope_name} {}, R^2 {:.4}, KS {:.4}, ln L {:.2}\n",
            f.parameter,
            f.regression_slope
                .map_or("NA".to_string(), |s| format!("{s:.4}")),
            f.goodness,
            f.ks_distance,
            f.log_likelihood
        ),
    }
}

fn render_report(title: &str, summary: &RunSummary, config_toml: &str) -> String {
    let c = &summary.comparison;
    let p = &summary.plateaus;
    let mut s = format!("{title}\n{}\n\n", "=".repeat(title.len()));
    s += &format!("program: {}\n", output::VERSION);
    s += &format!("analyzed steps: {}\n", summary.analyzed_steps);
    s += &format!(
        "durations: {} (sum {}, median {}, max {})\n\n",
        p.len(),
        p.total(),
        p.median().map_or("NA".into(), |v| v.to_string()),
        p.max().map_or("NA".into(), |v| v.to_string())
    );
    s += &format!("verdict: {} at tau_min = {}\n", c.verdict, c.tau_min);
    if let Some(r) = c.normalized_ratio {
        s += &format!("  log-likelihood ratio per duration (power law - exponential): {r:.4}\n");
    }
    s += &fmt_fit(c.exponential.as_ref(), "exponential", "semi-log slope");
    s += &fmt_fit(c.power_law.as_ref(), "power law", "log-log slope");
    if let Some(t) = &summary.tracked {
        s += &format!(
            "\ntracked product staircase: {} at tau_min = {}\n",
            t.verdict, t.tau_min
        );
    }
    s += "\nconfiguration:\n";
    s += config_toml;
    s
}

fn write_summary(
    dir: &Path,
    config: &ExperimentConfig,
    title: &str,
    summary: &RunSummary,
) -> Result<(), ExperimentError> {
    let config_toml = config.resolved.to_toml();
    let mut kv = summary.values.clone();
    kv.push("version", output::VERSION);
    for (k, v) in config.echo_lines() {
        kv.push(k, v);
    }
    output::write_text(&dir.join(output::SUMMARY_FILE), &kv.render())?;
    output::write_text(&dir.join(output::CONFIG_FILE), &config_toml)?;
    output::write_text(
        &dir.join(output::REPORT_FILE),
        &render_report(title, summary, &config_toml),
    )
}

fn write_durations(
    dir: &Path,
    config: &ExperimentConfig,
    plateaus: &PlateauList,
) -> Result<(), ExperimentError> {
    if config.outputs.wants(Artifact::Plateaus) {
        output::write_plateaus(dir, plateaus)?;
    }
    if config.outputs.wants(Artifact::Histogram) {
        output::write_histogram(dir, plateaus, config.analysis.binning)?;
    }
    Ok(())
}

fn prepare_dir(dir: &Path) -> Result<(), ExperimentError> {
    std::fs::create_dir_all(dir).map_err(|e| {
        ExperimentError::config("out", format!("cannot create {}: {e}", dir.display()))
    })
}

fn run_thurner(
    model: &ModelConfig,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<RunSummary, ExperimentError> {
    let burn_in = config.burn_in_steps();
    let mut diversity = PlateauTracker::new(burn_in as usize);
    let mut staircase = PlateauTracker::new(burn_in as usize);
    let mut activity = 0u64;
    let mut series = config
        .outputs
        .wants(Artifact::Timeseries)
        .then(|| {
            CsvSink::create(
                dir.join(output::TIMESERIES_FILE),
                &["t", "diversity", "tracked_state"],
            )
        })
        .transpose()?;
    let mut stairs = config
        .outputs
        .wants(Artifact::Staircase)
        .then(|| CsvSink::create(dir.join(output::STAIRCASE_FILE), &["t", "activity"]))
        .transpose()?;
    run_streaming(model, config.steps, |rec| {
        diversity.push(rec.diversity);
        activity += u64::from(rec.tracked_state);
        staircase.push(activity);
        if let Some(w) = series.as_mut() {
            w.row((rec.t, rec.diversity, u8::from(rec.tracked_state)))?;
        }
        if let Some(w) = stairs.as_mut() {
            w.row((rec.t, activity))?;
        }
        Ok::<_, ExperimentError>(())
    })?;
    for w in [series, stairs].into_iter().flatten() {
        w.finish()?;
    }

    let analyzed_steps = diversity.analyzed_len() as u64;
    let plateaus = diversity.finish()?;
    let comparison = analyze_durations(&plateaus, &config.analysis)?;
    let tracked = staircase
        .finish()
        .ok()
        .and_then(|segments| analyze_durations(&segments, &config.analysis).ok());

    let mut kv = KeyValues::default();
    kv.push("model", "thurner");
    kv.push("seed", model.seed);
    kv.push("n", model.n);
    kv.push("p", model.p);
    kv.push("rule2", model.rule2.as_str());
    kv.push("steps", config.steps);
    kv.push("burn_in_steps", burn_in);
    kv.push("analyzed_steps", analyzed_steps);
    push_plateau_values(&mut kv, &plateaus);
    push_fit_values(&mut kv, &comparison);
    kv.push("tracked_product", model.tracked_product);
    kv.push("tracked_activity", activity);
    kv.push_opt("tracked_verdict", tracked.as_ref().map(|c| c.verdict));
    kv.push_opt(
        "tracked_alpha_mle",
        tracked
            .as_ref()
            .and_then(|c| c.power_law.as_ref())
            .map(|f| f.parameter),
    );

    Ok(RunSummary {
        analyzed_steps,
        plateaus,
        comparison,
        tracked,
        values: kv,
    })
}

fn run_bak_sneppen(
    bs: &BsSettings,
    rule: ExtinctionRule,
    config: &ExperimentConfig,
    dir: &Path,
) -> Result<RunSummary, ExperimentError> {
    let burn_in = config.burn_in_steps();
    let mut rng = rng::seeded(bs.seed);
    let mut lattice = FitnessLattice::random(bs.lattice_size, &mut rng)?;
    let mut sink = config
        .outputs
        .wants(Artifact::Timeseries)
        .then(|| {
            CsvSink::create(
                dir.join(output::EXTINCTIONS_FILE),
                &["t", "site", "fitness"],
            )
        })
        .transpose()?;
    let mut values = Vec::with_capacity((config.steps - burn_in) as usize);
    for t in 1..=config.steps {
        let e = match rule {
            ExtinctionRule::Minimum => bs_step(&mut lattice, &mut rng),
            ExtinctionRule::Random => bs_step_random_extinction(&mut lattice, &mut rng),
        };
        if t > burn_in {
            values.push(e.fitness);
        }
        if let Some(w) = sink.as_mut() {
            w.row((t, e.site, e.fitness))?;
        }
    }
    if let Some(w) = sink {
        w.finish()?;
    }

    let avalanches = detect_avalanches(&values, bs.f0)?;
    let below = values.iter().filter(|&&v| v < bs.f0).count() as u64;
    let mean_fitness = values.iter().sum::<f64>() / values.len() as f64;
    let plateaus = PlateauList::new(avalanches.sizes)?;
    let comparison = analyze_durations(&plateaus, &config.analysis)?;

    let mut kv = KeyValues::default();
    kv.push("model", "bak-sneppen");
    kv.push("extinction", rule.as_str());
    kv.push("seed", bs.seed);
    kv.push("lattice_size", bs.lattice_size);
    kv.push("f0", bs.f0);
    kv.push("steps", config.steps);
    kv.push("burn_in_steps", burn_in);
    kv.push("analyzed_steps", values.len());
    kv.push("below_threshold", below);
    kv.push("mean_extinct_fitness", mean_fitness);
    push_plateau_values(&mut kv, &plateaus);
    push_fit_values(&mut kv, &comparison);

    Ok(RunSummary {
        analyzed_steps: values.len() as u64,
        plateaus,
        comparison,
        tracked: None,
        values: kv,
    })
}

/// Runs a configuration describing exactly one simulation into `dir`.
fn run_single(
    config: &ExperimentConfig,
    dir: &Path,
    rule: Option<ExtinctionRule>,
) -> Result<RunSummary, ExperimentError> {
    prepare_dir(dir)?;
    let (summary, title) = match &config.simulation {
        Simulation::Thurner(model) => (
            run_thurner(model, config, dir)?,
            format!(
                "Thurner model, N = {}, p = {}, seed {}",
                model.n, model.p, model.seed
            ),
        ),
        Simulation::BakSneppen(bs) => {
            let rule = rule.unwrap_or(bs.rules[0]);
            (
                run_bak_sneppen(bs, rule, config, dir)?,
                format!(
                    "Bak-Sneppen, {} extinction, L = {}, f0 = {}, seed {}",
                    rule.as_str(),
                    bs.lattice_size,
                    bs.f0,
                    bs.seed
                ),
            )
        }
    };
    write_durations(dir, config, &summary.plateaus)?;
    if config.outputs.wants(Artifact::Summary) {
        write_summary(dir, config, &title, &summary)?;
    }
    summary.check_sufficient()?;
    Ok(summary)
}

/// One point of a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub label: String,
    pub seed: u64,
    pub p: Option<f64>,
    pub rule: Option<ExtinctionRule>,
    /// Settings for this point alone, with its own output directory.
    pub config: ExperimentConfig,
}

/// Expands sweep lists into individual runs, each in its own subdirectory.
pub fn sweep_points(config: &ExperimentConfig) -> Result<Vec<SweepPoint>, ExperimentError> {
    let seeds = config.replicate_seeds.clone().unwrap_or_else(|| {
        vec![match &config.simulation {
            Simulation::Thurner(m) => m.seed,
            Simulation::BakSneppen(b) => b.seed,
        }]
    });
    let mut points = Vec::new();
    let variants: Vec<(String, Option<f64>, Option<ExtinctionRule>)> = match &config.simulation {
        Simulation::Thurner(m) => config
            .p_values
            .clone()
            .unwrap_or_else(|| vec![m.p])
            .into_iter()
            .map(|p| (format!("p{p}"), Some(p), None))
            .collect(),
        Simulation::BakSneppen(b) => b
            .rules
            .iter()
            .map(|&r| (format!("bs-{}", r.as_str()), None, Some(r)))
            .collect(),
    };
    for (prefix, p, rule) in variants {
        for &seed in &seeds {
            let label = format!("{prefix}_seed{seed}");
            let mut raw = config.resolved.clone();
            raw.seed = Some(seed);
            raw.seeds = None;
            raw.p_values = None;
            if let Some(p) = p {
                raw.p = Some(p);
            }
            if let Some(r) = rule {
                raw.extinction = Some(r.as_str().into());
            }
            raw.out = Some(config.outputs.dir.join(&label));
            points.push(SweepPoint {
                label,
                seed,
                p,
                rule,
                config: resolve(raw)?,
            });
        }
    }
    Ok(points)
}

/// One sweep row.
#[derive(Debug)]
pub struct RunOutcome {
    pub point: SweepPoint,
    pub result: Result<RunSummary, ExperimentError>,
}

impl RunOutcome {
    pub fn dir(&self) -> &Path {
        &self.point.config.outputs.dir
    }
}

#[derive(Debug)]
pub struct SweepReport {
    pub rows: Vec<RunOutcome>,
    pub aggregate: KeyValues,
}

impl SweepReport {
    /// Exit status of the first failed row, or success.
    pub fn exit_code(&self) -> i32 {
        self.rows
            .iter()
            .find_map(|r| r.result.as_ref().err().map(ExperimentError::exit_code))
            .unwrap_or(EXIT_OK)
    }
}

fn mean_std(values: &[f64]) -> (Option<f64>, Option<f64>) {
    if values.is_empty() {
        return (None, None);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() > 1)
        .then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    (Some(mean), std)
}

fn row_value(r: &RunOutcome, key: &str) -> Option<f64> {
    r.result.as_ref().ok()?.values.get(key)?.parse().ok()
}

const AGGREGATED: [&str; 4] = ["alpha_mle", "slope_loglog", "lambda", "r2_semilog"];

/// Runs every sweep point on a pool of `jobs` threads. A failing point marks
/// its row failed; the others still run.
pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport, ExperimentError> {
    let points = sweep_points(config)?;
    prepare_dir(&config.outputs.dir)?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| ExperimentError::config("jobs", e.to_string()))?;
    let rows: Vec<RunOutcome> = pool.install(|| {
        points
            .into_par_iter()
            .map(|point| {
                let result = run_single(&point.config, &point.config.outputs.dir, point.rule);
                RunOutcome { point, result }
            })
            .collect()
    });

    let dir = &config.outputs.dir;
    let mut csv = CsvSink::create(
        dir.join(output::SWEEP_FILE),
        &[
            "label",
            "p",
            "seed",
            "status",
            "verdict",
            "tau_min",
            "n_plateaus",
            "alpha_mle",
            "slope_loglog",
            "lambda",
            "r2_semilog",
            "error",
        ],
    )?;
    for r in &rows {
        let p = r.point.p.map_or("NA".to_string(), |p| p.to_string());
        let (status, error) = match &r.result {
            Ok(_) => ("ok", String::new()),
            Err(e) => ("failed", e.to_string()),
        };
        let get = |k: &str| {
            r.result
                .as_ref()
                .ok()
                .and_then(|s| s.values.get(k))
                .unwrap_or("NA")
                .to_string()
        };
        csv.row((
            &r.point.label,
            p,
            r.point.seed,
            status,
            get("verdict"),
            get("tau_min"),
            get("n_plateaus"),
            get("alpha_mle"),
            get("slope_loglog"),
            get("lambda"),
            get("r2_semilog"),
            error,
        ))?;
    }
    csv.finish()?;

    let mut kv = KeyValues::default();
    let failed = rows.iter().filter(|r| r.result.is_err()).count();
    kv.push("n_runs", rows.len());
    kv.push("n_failed", failed);
    for verdict in ["ExponentialPreferred", "PowerLawPreferred", "Inconclusive"] {
        let count = rows
            .iter()
            .filter(|r| {
                r.result
                    .as_ref()
                    .is_ok_and(|s| s.comparison.verdict.to_string() == verdict)
            })
            .count();
        kv.push(format!("n_{verdict}"), count);
    }
    for key in AGGREGATED {
        let values: Vec<f64> = rows.iter().filter_map(|r| row_value(r, key)).collect();
        let (mean, std) = mean_std(&values);
        kv.push_opt(format!("{key}_mean"), mean);
        kv.push_opt(format!("{key}_std"), std);
    }
    kv.push("version", output::VERSION);
    for (k, v) in config.echo_lines() {
        kv.push(k, v);
    }
    output::write_text(&dir.join(output::SWEEP_SUMMARY_FILE), &kv.render())?;
    output::write_text(&dir.join(output::CONFIG_FILE), &config.resolved.to_toml())?;
    Ok(SweepReport {
        rows,
        aggregate: kv,
    })
}

/// Whether the configuration expands to more than one run.
pub fn is_sweep(config: &ExperimentConfig) -> bool {
    config.replicate_seeds.is_some()
        || config.p_values.is_some()
        || matches!(&config.simulation, Simulation::BakSneppen(b) if b.rules.len() > 1)
}

/// Outcome of [`run_experiment`].
#[derive(Debug)]
pub enum Experiment {
    Single(Box<RunSummary>),
    Sweep(SweepReport),
}

/// Runs a configuration: one simulation into the output directory, or a
/// sweep with one subdirectory per point.
pub fn run_experiment(config: &ExperimentConfig) -> Result<Experiment, ExperimentError> {
    if is_sweep(config) {
        run_sweep(config).map(Experiment::Sweep)
    } else {
        run_single(config, &config.outputs.dir, None).map(|s| Experiment::Single(Box::new(s)))
    }
}

#[derive(serde::Deserialize)]
struct TimeseriesRow {
    #[allow(dead_code)]
    t: u64,
    diversity: u32,
    tracked_state: u8,
}

/// Re-runs the analysis on an existing `timeseries.csv`, writing plateau,
/// histogram and summary artifacts into the configured output directory.
pub fn analyze_file(path: &Path, config: &ExperimentConfig) -> Result<RunSummary, ExperimentError> {
    let mut reader = csv::Reader::from_path(path).map_err(|e| ExperimentError::Input {
        path: path.to_path_buf(),
        line: 0,
        reason: e.to_string(),
    })?;
    let mut diversity = Vec::new();
    let mut tracked = Vec::new();
    for (i, row) in reader.deserialize::<TimeseriesRow>().enumerate() {
        let row = row.map_err(|e| ExperimentError::Input {
            path: path.to_path_buf(),
            line: e.position().map_or(i + 2, |p| p.line() as usize),
            reason: e.to_string(),
        })?;
        if row.tracked_state > 1 {
            return Err(ExperimentError::Input {
                path: path.to_path_buf(),
                line: i + 2,
                reason: format!("tracked_state {} is not 0 or 1", row.tracked_state),
            });
        }
        diversity.push(row.diversity);
        tracked.push(row.tracked_state == 1);
    }
    let burn_in = (config.burn_in_fraction * diversity.len() as f64).floor() as usize;
    let mut plateaus = PlateauTracker::new(burn_in);
    let mut staircase = PlateauTracker::new(burn_in);
    let mut activity = 0u64;
    for (&d, &on) in diversity.iter().zip(&tracked) {
        plateaus.push(d);
        activity += u64::from(on);
        staircase.push(activity);
    }
    let analyzed_steps = plateaus.analyzed_len() as u64;
    let plateaus = plateaus.finish()?;
    let comparison = analyze_durations(&plateaus, &config.analysis)?;
    let tracked = staircase
        .finish()
        .ok()
        .and_then(|s| analyze_durations(&s, &config.analysis).ok());

    let mut kv = KeyValues::default();
    kv.push("source", path.display());
    kv.push("steps", diversity.len());
    kv.push("burn_in_steps", burn_in);
    kv.push("analyzed_steps", analyzed_steps);
    push_plateau_values(&mut kv, &plateaus);
    push_fit_values(&mut kv, &comparison);
    kv.push_opt("tracked_verdict", tracked.as_ref().map(|c| c.verdict));
    let summary = RunSummary {
        analyzed_steps,
        plateaus,
        comparison,
        tracked,
        values: kv,
    };

    let dir: PathBuf = config.outputs.dir.clone();
    prepare_dir(&dir)?;
    write_durations(&dir, config, &summary.plateaus)?;
    if config.outputs.wants(Artifact::Summary) {
        write_summary(
            &dir,
            config,
            &format!("Analysis of {}", path.display()),
            &summary,
        )?;
    }
    summary.check_sufficient()?;
    Ok(summary)
}
