//! Experiment harness for the Thurner creative-destruction model and the
//! Bak-Sneppen reference: configuration, presets, sweeps and artifact output.

pub mod config;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;

pub use config::{parse_config, ExperimentConfig, RawConfig};
pub use error::ExperimentError;
pub use experiment::{analyze_file, run_experiment, run_sweep, Experiment};
pub use presets::Preset;
