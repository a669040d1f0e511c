//! Experiment configuration: a flat TOML file whose keys mirror the command
//! line flags, layered as built-in defaults < preset < file < flags.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use schumpeter_core::analysis::fit::{DEFAULT_COMPARISON_THRESHOLD, DEFAULT_TAU_MIN};
use schumpeter_core::analysis::{Binning, TauMin};
use schumpeter_core::bak_sneppen::{self, ExtinctionRule};
use schumpeter_core::model::{ModelConfig, Rule2Variant, DEFAULT_DENSITY};
use serde::{Deserialize, Serialize};

use crate::error::ExperimentError;

/// Integer or string, so `tau_min = 2` and `tau_min = "auto"` both parse.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum IntOrText {
    Int(u64),
    Text(String),
}

impl fmt::Display for IntOrText {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            IntOrText::Int(i) => write!(f, "{i}"),
            IntOrText::Text(s) => f.write_str(s),
        }
    }
}

/// Every setting, all optional. Used for the config file, for flag
/// overrides and for presets.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawConfig {
    /// `thurner` or `bak-sneppen`.
    pub model: Option<String>,
    pub n: Option<usize>,
    pub p: Option<f64>,
    pub density_plus: Option<f64>,
    pub density_minus: Option<f64>,
    pub rule2: Option<String>,
    pub seed: Option<u64>,
    pub initial_diversity: Option<usize>,
    pub track_product: Option<usize>,
    pub steps: Option<u64>,
    pub burn_in: Option<f64>,
    pub tau_min: Option<IntOrText>,
    pub binning: Option<String>,
    pub threshold: Option<f64>,
    pub out: Option<PathBuf>,
    pub artifacts: Option<Vec<String>>,
    pub jobs: Option<usize>,
    pub seeds: Option<Vec<u64>>,
    pub p_values: Option<Vec<f64>>,
    pub lattice_size: Option<usize>,
    pub f0: Option<f64>,
    /// `minimum`, `random` or `both`.
    pub extinction: Option<String>,
}

macro_rules! overlay_fields {
    ($base:ident, $top:ident, $($f:ident),*) => {
        $( if $top.$f.is_some() { $base.$f = $top.$f; } )*
    };
}

impl RawConfig {
    /// Fields set in `top` replace those in `self`.
    pub fn overlay(mut self, top: RawConfig) -> RawConfig {
        overlay_fields!(
            self,
            top,
            model,
            n,
            p,
            density_plus,
            density_minus,
            rule2,
            seed,
            initial_diversity,
            track_product,
            steps,
            burn_in,
            tau_min,
            binning,
            threshold,
            out,
            artifacts,
            jobs,
            seeds,
            p_values,
            lattice_size,
            f0,
            extinction
        );
        self
    }

    pub fn from_toml(text: &str) -> Result<RawConfig, String> {
        toml::from_str(text).map_err(|e| e.message().to_string())
    }

    pub fn load(path: &Path) -> Result<RawConfig, ExperimentError> {
        let text = std::fs::read_to_string(path).map_err(|e| ExperimentError::ConfigFile {
            path: path.to_path_buf(),
            reason: e.to_string(),
        })?;
        Self::from_toml(&text).map_err(|reason| ExperimentError::ConfigFile {
            path: path.to_path_buf(),
            reason,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

/// CSV and report files an experiment may write.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Artifact {
    /// `timeseries.csv` (Thurner) or `extinctions.csv` (Bak-Sneppen).
    Timeseries,
    Plateaus,
    Histogram,
    /// `summary.txt`, `report.txt` and `config.toml`.
    Summary,
    /// `staircase.csv`: cumulative activity of the tracked product.
    Staircase,
}

pub const DEFAULT_ARTIFACTS: [Artifact; 4] = [
    Artifact::Timeseries,
    Artifact::Plateaus,
    Artifact::Histogram,
    Artifact::Summary,
];

impl Artifact {
    pub fn as_str(self) -> &'static str {
        match self {
            Artifact::Timeseries => "timeseries",
            Artifact::Plateaus => "plateaus",
            Artifact::Histogram => "histogram",
            Artifact::Summary => "summary",
            Artifact::Staircase => "staircase",
        }
    }
}

impl FromStr for Artifact {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "timeseries" => Ok(Artifact::Timeseries),
            "plateaus" => Ok(Artifact::Plateaus),
            "histogram" => Ok(Artifact::Histogram),
            "summary" => Ok(Artifact::Summary),
            "staircase" => Ok(Artifact::Staircase),
            other => Err(ExperimentError::config(
                "artifacts",
                format!("unknown artifact {other:?}"),
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnalysisConfig {
    /// Binning of the emitted `histogram.csv`.
    pub binning: Binning,
    pub tau_min: TauMin,
    /// `|ΔlnL|/m` below which the family comparison is inconclusive.
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    pub artifacts: Vec<Artifact>,
}

impl OutputConfig {
    pub fn wants(&self, a: Artifact) -> bool {
        self.artifacts.contains(&a)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BsSettings {
    pub lattice_size: usize,
    pub f0: f64,
    pub rules: Vec<ExtinctionRule>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Simulation {
    Thurner(ModelConfig),
    BakSneppen(BsSettings),
}

/// A fully resolved and validated experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub simulation: Simulation,
    pub steps: u64,
    pub burn_in_fraction: f64,
    pub analysis: AnalysisConfig,
    pub outputs: OutputConfig,
    /// Seeds to replicate over; `None` runs the single configured seed.
    pub replicate_seeds: Option<Vec<u64>>,
    /// Innovation probabilities to sweep over (Thurner only).
    pub p_values: Option<Vec<f64>>,
    pub jobs: usize,
    /// Every setting with its resolved value, for echoing into reports.
    pub resolved: RawConfig,
}

/// Built-in defaults: a small random-flip Thurner run.
pub fn defaults() -> RawConfig {
    RawConfig {
        model: Some("thurner".into()),
        n: Some(100),
        p: Some(0.0002),
        density_plus: Some(DEFAULT_DENSITY),
        density_minus: Some(DEFAULT_DENSITY),
        rule2: Some(Rule2Variant::RandomFlip.as_str().into()),
        seed: Some(1),
        initial_diversity: None,
        track_product: Some(0),
        steps: Some(10_000),
        burn_in: Some(0.1),
        tau_min: Some(IntOrText::Int(DEFAULT_TAU_MIN)),
        binning: Some("log:2".into()),
        threshold: Some(DEFAULT_COMPARISON_THRESHOLD),
        out: Some(PathBuf::from("out")),
        artifacts: Some(
            DEFAULT_ARTIFACTS
                .iter()
                .map(|a| a.as_str().to_string())
                .collect(),
        ),
        jobs: Some(1),
        seeds: None,
        p_values: None,
        lattice_size: Some(bak_sneppen::DEFAULT_LATTICE_SIZE),
        f0: Some(bak_sneppen::DEFAULT_THRESHOLD),
        extinction: Some("minimum".into()),
    }
}

fn required<T: Clone>(v: &Option<T>, field: &str) -> Result<T, ExperimentError> {
    v.clone()
        .ok_or_else(|| ExperimentError::config(field, "missing value"))
}

fn check_range(
    field: &str,
    v: f64,
    lo: f64,
    hi: f64,
    hi_inclusive: bool,
) -> Result<(), ExperimentError> {
    let ok = v >= lo && if hi_inclusive { v <= hi } else { v < hi };
    if ok {
        Ok(())
    } else {
        let close = if hi_inclusive { ']' } else { ')' };
        Err(ExperimentError::config(
            field,
            format!("{v} is outside [{lo}, {hi}{close}"),
        ))
    }
}

/// Layers `base` (defaults or a preset), an optional file and flag overrides,
/// then validates the result.
pub fn parse_config(
    base: RawConfig,
    file: Option<&Path>,
    flags: RawConfig,
) -> Result<ExperimentConfig, ExperimentError> {
    let mut raw = defaults().overlay(base);
    if let Some(path) = file {
        raw = raw.overlay(RawConfig::load(path)?);
    }
    raw = raw.overlay(flags);
    resolve(raw)
}

/// Validates a complete set of settings.
pub fn resolve(mut raw: RawConfig) -> Result<ExperimentConfig, ExperimentError> {
    let n = required(&raw.n, "n")?;
    if raw.initial_diversity.is_none() {
        raw.initial_diversity = Some((n / 2).max(1));
    }

    let p = required(&raw.p, "p")?;
    check_range("p", p, 0.0, 1.0, true)?;
    let steps = required(&raw.steps, "steps")?;
    if steps == 0 {
        return Err(ExperimentError::config("steps", "must be at least 1"));
    }
    let burn_in_fraction = required(&raw.burn_in, "burn_in")?;
    check_range("burn_in", burn_in_fraction, 0.0, 1.0, false)?;
    if (burn_in_fraction * steps as f64).floor() as u64 >= steps {
        return Err(ExperimentError::config(
            "burn_in",
            "leaves no steps to analyze",
        ));
    }

    let tau_min = match required(&raw.tau_min, "tau_min")? {
        IntOrText::Int(0) => return Err(ExperimentError::config("tau_min", "must be at least 1")),
        IntOrText::Int(t) => TauMin::Fixed(t),
        IntOrText::Text(s) => s.parse().map_err(|_| {
            ExperimentError::config(
                "tau_min",
                format!("{s:?} is not a positive integer or \"auto\""),
            )
        })?,
    };
    let binning_text = required(&raw.binning, "binning")?;
    let binning: Binning = binning_text.parse().map_err(|_| {
        ExperimentError::config(
            "binning",
            format!("cannot parse {binning_text:?}; expected linear[:width] or log[:ratio]"),
        )
    })?;
    match binning {
        Binning::Linear(0) => {
            return Err(ExperimentError::config(
                "binning",
                "linear width must be >= 1",
            ))
        }
        Binning::Logarithmic(r) if !(r > 1.0 && r.is_finite()) => {
            return Err(ExperimentError::config(
                "binning",
                "log ratio must exceed 1",
            ))
        }
        _ => {}
    }
    let threshold = required(&raw.threshold, "threshold")?;
    if !(threshold >= 0.0 && threshold.is_finite()) {
        return Err(ExperimentError::config(
            "threshold",
            format!("{threshold} must be non-negative"),
        ));
    }

    let mut artifacts = required(&raw.artifacts, "artifacts")?
        .iter()
        .map(|s| s.parse())
        .collect::<Result<Vec<Artifact>, _>>()?;
    artifacts.sort();
    artifacts.dedup();

    let jobs = required(&raw.jobs, "jobs")?;
    if jobs == 0 {
        return Err(ExperimentError::config("jobs", "must be at least 1"));
    }
    if let Some(seeds) = &raw.seeds {
        if seeds.is_empty() {
            return Err(ExperimentError::config("seeds", "sweep list is empty"));
        }
    }
    if let Some(ps) = &raw.p_values {
        if ps.is_empty() {
            return Err(ExperimentError::config("p_values", "sweep list is empty"));
        }
        for &v in ps {
            check_range("p_values", v, 0.0, 1.0, true)?;
        }
    }

    let seed = required(&raw.seed, "seed")?;
    let simulation = match required(&raw.model, "model")?.as_str() {
        "thurner" => {
            let rule2: Rule2Variant = required(&raw.rule2, "rule2")?.parse().map_err(
                |e: schumpeter_core::ModelError| ExperimentError::config("rule2", e.to_string()),
            )?;
            let model = ModelConfig {
                n,
                p,
                density_plus: required(&raw.density_plus, "density_plus")?,
                density_minus: required(&raw.density_minus, "density_minus")?,
                rule2,
                seed,
                initial_diversity: required(&raw.initial_diversity, "initial_diversity")?,
                tracked_product: required(&raw.track_product, "track_product")?,
            };
            model.validate()?;
            Simulation::Thurner(model)
        }
        "bak-sneppen" => {
            let lattice_size = required(&raw.lattice_size, "lattice_size")?;
            if lattice_size < 3 {
                return Err(ExperimentError::config(
                    "lattice_size",
                    format!("{lattice_size} is below the minimum of 3"),
                ));
            }
            let f0 = required(&raw.f0, "f0")?;
            if !(f0 > 0.0 && f0 < 1.0) {
                return Err(ExperimentError::config(
                    "f0",
                    format!("{f0} is outside (0, 1)"),
                ));
            }
            let rules = match required(&raw.extinction, "extinction")?.as_str() {
                "minimum" => vec![ExtinctionRule::Minimum],
                "random" => vec![ExtinctionRule::Random],
                "both" => vec![ExtinctionRule::Minimum, ExtinctionRule::Random],
                other => {
                    return Err(ExperimentError::config(
                        "extinction",
                        format!("unknown rule {other:?}; expected minimum, random or both"),
                    ))
                }
            };
            if raw.p_values.is_some() {
                return Err(ExperimentError::config(
                    "p_values",
                    "not applicable to bak-sneppen",
                ));
            }
            Simulation::BakSneppen(BsSettings {
                lattice_size,
                f0,
                rules,
                seed,
            })
        }
        other => {
            return Err(ExperimentError::config(
                "model",
                format!("unknown model {other:?}; expected thurner or bak-sneppen"),
            ))
        }
    };

    Ok(ExperimentConfig {
        simulation,
        steps,
        burn_in_fraction,
        analysis: AnalysisConfig {
            binning,
            tau_min,
            threshold,
        },
        outputs: OutputConfig {
            dir: required(&raw.out, "out")?,
            artifacts,
        },
        replicate_seeds: raw.seeds.clone(),
        p_values: raw.p_values.clone(),
        jobs,
        resolved: raw,
    })
}

impl ExperimentConfig {
    /// Number of steps discarded before analysis.
    pub fn burn_in_steps(&self) -> u64 {
        (self.burn_in_fraction * self.steps as f64).floor() as u64
    }

    /// The resolved settings as `key=value` lines, keys sorted as in the file.
    pub fn echo_lines(&self) -> Vec<(String, String)> {
        let value = toml::Value::try_from(&self.resolved).expect("config serializes");
        let table = value.as_table().expect("config is a table");
        table
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    toml::Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (format!("config.{k}"), text)
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flags(text: &str) -> RawConfig {
        RawConfig::from_toml(text).unwrap()
    }

    #[test]
    fn fully_defaulted_config_is_valid() {
        let c = parse_config(RawConfig::default(), None, RawConfig::default()).unwrap();
        let Simulation::Thurner(m) = &c.simulation else {
            panic!("default model is thurner")
        };
        assert_eq!(m.n, 100);
        assert_eq!(m.initial_diversity, 50);
        assert_eq!(m.density_plus, 0.1);
        assert_eq!(c.steps, 10_000);
        assert_eq!(c.analysis.tau_min, TauMin::Fixed(2));
        assert_eq!(c.outputs.artifacts, DEFAULT_ARTIFACTS.to_vec());
    }

    #[test]
    fn flags_override_file() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "n = 40\np = 0.1\nseed = 9\n").unwrap();
        let c = parse_config(RawConfig::default(), Some(&path), flags("p = 0.3")).unwrap();
        let Simulation::Thurner(m) = c.simulation else {
            unreachable!()
        };
        assert_eq!((m.n, m.p, m.seed, m.initial_diversity), (40, 0.3, 9, 20));
    }

    #[test]
    fn unknown_key_is_named() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "n = 40\nbogus_key = 1\n").unwrap();
        let err =
            parse_config(RawConfig::default(), Some(&path), RawConfig::default()).unwrap_err();
        assert!(err.to_string().contains("bogus_key"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn malformed_file_is_config_error() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.toml");
        std::fs::write(&path, "n = = 3").unwrap();
        let err =
            parse_config(RawConfig::default(), Some(&path), RawConfig::default()).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = parse_config(
            RawConfig::default(),
            Some(Path::new("/nonexistent/c.toml")),
            RawConfig::default(),
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn out_of_range_values_name_their_field() {
        for (text, field) in [
            ("p = 1.5", "invalid p"),
            ("burn_in = 1.0", "invalid burn_in"),
            ("density_plus = -0.1", "invalid density_plus"),
            ("initial_diversity = 500", "invalid initial_diversity"),
            ("tau_min = 0", "invalid tau_min"),
            ("tau_min = \"soon\"", "invalid tau_min"),
            ("binning = \"cubic\"", "invalid binning"),
            ("rule2 = \"coinflip\"", "invalid rule2"),
            ("steps = 0", "invalid steps"),
            ("seeds = []", "invalid seeds"),
            ("artifacts = [\"movie\"]", "invalid artifacts"),
            ("model = \"ising\"", "invalid model"),
            ("model = \"bak-sneppen\"\nf0 = 1.0", "invalid f0"),
        ] {
            let err = parse_config(RawConfig::default(), None, flags(text)).unwrap_err();
            assert!(err.to_string().starts_with(field), "{text}: {err}");
            assert_eq!(err.exit_code(), 2, "{text}");
        }
    }

    #[test]
    fn tau_min_accepts_auto() {
        let c = parse_config(RawConfig::default(), None, flags("tau_min = \"auto\"")).unwrap();
        assert_eq!(c.analysis.tau_min, TauMin::Auto);
    }

    #[test]
    fn resolved_config_round_trips_through_toml() {
        let c = parse_config(
            RawConfig::default(),
            None,
            flags("n = 30\np_values = [0.1, 0.2]"),
        )
        .unwrap();
        let text = c.resolved.to_toml();
        let again = resolve(RawConfig::from_toml(&text).unwrap()).unwrap();
        assert_eq!(again, c);
    }

    #[test]
    fn echo_lists_every_setting() {
        let c = parse_config(RawConfig::default(), None, RawConfig::default()).unwrap();
        let lines = c.echo_lines();
        assert!(lines.contains(&("config.n".into(), "100".into())));
        assert!(lines.contains(&("config.rule2".into(), "random-flip".into())));
    }
}
