use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use schumpeter_cli::config::{IntOrText, RawConfig};
use schumpeter_cli::experiment::{is_sweep, Experiment, RunSummary, SweepReport};
use schumpeter_cli::{analyze_file, parse_config, run_experiment, ExperimentError, Preset};

#[derive(Parser)]
#[command(
    name = "schumpeter",
    version,
    about = "Creative-destruction and Bak-Sneppen simulation experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one simulation (or the sweep its settings describe) and analyze it.
    Simulate(Overrides),
    /// Run independent simulations over --seeds and/or --p-values.
    Sweep(Overrides),
    /// Re-run the analysis on an existing timeseries.csv.
    Analyze {
        input: PathBuf,
        #[command(flatten)]
        overrides: Overrides,
    },
    /// Run a named experiment: fig1, fig2, fig3 or bs-control.
    Preset {
        name: String,
        #[command(flatten)]
        overrides: Overrides,
    },
}

#[derive(Args, Default)]
struct Overrides {
    /// TOML file with any of the settings below (snake_case keys).
    #[arg(long)]
    config: Option<PathBuf>,
    /// thurner or bak-sneppen.
    #[arg(long)]
    model: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    /// Innovation probability per step.
    #[arg(long)]
    p: Option<f64>,
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    density_plus: Option<f64>,
    #[arg(long)]
    density_minus: Option<f64>,
    /// random-flip or fitness.
    #[arg(long)]
    rule2: Option<String>,
    #[arg(long)]
    initial_diversity: Option<usize>,
    /// Fraction of steps discarded before analysis.
    #[arg(long)]
    burn_in: Option<f64>,
    /// Positive integer or "auto".
    #[arg(long)]
    tau_min: Option<String>,
    /// linear[:width] or log[:ratio].
    #[arg(long)]
    binning: Option<String>,
    /// Minimum |log-likelihood ratio| per duration for a verdict.
    #[arg(long)]
    threshold: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated: timeseries, plateaus, histogram, summary, staircase.
    #[arg(long, value_delimiter = ',')]
    artifacts: Option<Vec<String>>,
    /// Sweep points run concurrently.
    #[arg(long)]
    jobs: Option<usize>,
    #[arg(long)]
    track_product: Option<usize>,
    /// Comma-separated seeds to replicate over.
    #[arg(long, value_delimiter = ',')]
    seeds: Option<Vec<u64>>,
    /// Comma-separated innovation probabilities to sweep over.
    #[arg(long, value_delimiter = ',')]
    p_values: Option<Vec<f64>>,
    /// Bak-Sneppen lattice size.
    #[arg(long)]
    lattice_size: Option<usize>,
    /// Bak-Sneppen avalanche threshold.
    #[arg(long)]
    f0: Option<f64>,
    /// Bak-Sneppen extinction rule: minimum, random or both.
    #[arg(long)]
    extinction: Option<String>,
}

impl Overrides {
    fn into_raw(self) -> (Option<PathBuf>, RawConfig) {
        let tau_min = self.tau_min.map(|s| match s.parse::<u64>() {
            Ok(t) => IntOrText::Int(t),
            Err(_) => IntOrText::Text(s),
        });
        let raw = RawConfig {
            model: self.model,
            n: self.n,
            p: self.p,
            density_plus: self.density_plus,
            density_minus: self.density_minus,
            rule2: self.rule2,
            seed: self.seed,
            initial_diversity: self.initial_diversity,
            track_product: self.track_product,
            steps: self.steps,
            burn_in: self.burn_in,
            tau_min,
            binning: self.binning,
            threshold: self.threshold,
            out: self.out,
            artifacts: self.artifacts,
            jobs: self.jobs,
            seeds: self.seeds,
            p_values: self.p_values,
            lattice_size: self.lattice_size,
            f0: self.f0,
            extinction: self.extinction,
        };
        (self.config, raw)
    }
}

fn print_single(s: &RunSummary) {
    let get = |k| s.values.get(k).unwrap_or("NA");
    println!(
        "verdict={} tau_min={} n_plateaus={} alpha_mle={} slope_loglog={} lambda={}",
        get("verdict"),
        get("tau_min"),
        get("n_plateaus"),
        get("alpha_mle"),
        get("slope_loglog"),
        get("lambda")
    );
}

fn print_sweep(report: &SweepReport) {
    for row in &report.rows {
        match &row.result {
            Ok(s) => {
                print!("{}: ", row.point.label);
                print_single(s);
            }
            Err(e) => println!("{}: failed: {e}", row.point.label),
        }
    }
}

fn run(command: Command) -> Result<i32, ExperimentError> {
    let (base, overrides, sweep_required) = match command {
        Command::Simulate(o) => (RawConfig::default(), o, false),
        Command::Sweep(o) => (RawConfig::default(), o, true),
        Command::Preset { name, overrides } => {
            (name.parse::<Preset>()?.settings(), overrides, false)
        }
        Command::Analyze { input, overrides } => {
            let (file, flags) = overrides.into_raw();
            let config = parse_config(RawConfig::default(), file.as_deref(), flags)?;
            print_single(&analyze_file(&input, &config)?);
            return Ok(0);
        }
    };
    let (file, flags) = overrides.into_raw();
    let config = parse_config(base, file.as_deref(), flags)?;
    if sweep_required && !is_sweep(&config) {
        return Err(ExperimentError::config(
            "seeds",
            "a sweep needs --seeds, --p-values or --extinction both",
        ));
    }
    match run_experiment(&config)? {
        Experiment::Single(s) => {
            print_single(&s);
            Ok(0)
        }
        Experiment::Sweep(report) => {
            print_sweep(&report);
            Ok(report.exit_code())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
