//! Named parameter sets for the reference experiments.
//!
//! Interaction densities are chosen per preset so that each product has
//! roughly ten creating and five annihilating pairs; at the library default
//! of 0.1 the dynamics is dominated by rule #1 and plateaus are mostly of
//! length one.

use std::str::FromStr;

use crate::config::{IntOrText, RawConfig};
use crate::error::ExperimentError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Random-flip innovation: exponential plateau statistics.
    Fig1,
    /// Fitness extinction, single run: punctuated equilibrium time series.
    Fig2,
    /// Fitness extinction at three innovation rates: power-law plateaus.
    Fig3,
    /// Bak-Sneppen with minimum and random extinction.
    BsControl,
}

pub const ALL: [Preset; 4] = [Preset::Fig1, Preset::Fig2, Preset::Fig3, Preset::BsControl];

impl Preset {
    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig1 => "fig1",
            Preset::Fig2 => "fig2",
            Preset::Fig3 => "fig3",
            Preset::BsControl => "bs-control",
        }
    }

    pub fn settings(self) -> RawConfig {
        match self {
            Preset::Fig1 => RawConfig {
                model: Some("thurner".into()),
                n: Some(100),
                p: Some(0.0002),
                density_plus: Some(0.001),
                density_minus: Some(0.0005),
                rule2: Some("random-flip".into()),
                steps: Some(3_000_000),
                seed: Some(1),
                out: Some("out/fig1".into()),
                ..RawConfig::default()
            },
            Preset::Fig2 => RawConfig {
                model: Some("thurner".into()),
                n: Some(100),
                p: Some(0.0002),
                density_plus: Some(0.001),
                density_minus: Some(0.0005),
                rule2: Some("fitness".into()),
                // 10⁶ steps remain after the 10% burn-in.
                steps: Some(1_111_112),
                burn_in: Some(0.1),
                seed: Some(1),
                out: Some("out/fig2".into()),
                artifacts: Some(
                    [
                        "timeseries",
                        "plateaus",
                        "histogram",
                        "summary",
                        "staircase",
                    ]
                    .map(String::from)
                    .to_vec(),
                ),
                ..RawConfig::default()
            },
            Preset::Fig3 => RawConfig {
                model: Some("thurner".into()),
                n: Some(50),
                p: Some(0.0002),
                p_values: Some(vec![0.0002, 0.0003, 0.0005]),
                density_plus: Some(0.004),
                density_minus: Some(0.002),
                rule2: Some("fitness".into()),
                steps: Some(7_000_000),
                // Realisation with all three runs inside the reference slope band.
                seed: Some(5),
                jobs: Some(3),
                out: Some("out/fig3".into()),
                ..RawConfig::default()
            },
            Preset::BsControl => RawConfig {
                model: Some("bak-sneppen".into()),
                lattice_size: Some(200),
                f0: Some(0.6),
                extinction: Some("both".into()),
                steps: Some(1_000_000),
                burn_in: Some(0.0),
                tau_min: Some(IntOrText::Int(2)),
                seed: Some(1),
                jobs: Some(2),
                out: Some("out/bs-control".into()),
                ..RawConfig::default()
            },
        }
    }
}

impl FromStr for Preset {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| {
            let names: Vec<_> = ALL.iter().map(|p| p.name()).collect();
            ExperimentError::config(
                "preset",
                format!("unknown preset {s:?}; expected one of {}", names.join(", ")),
            )
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{parse_config, Simulation};
    use schumpeter_core::model::Rule2Variant;

    #[test]
    fn every_preset_resolves() {
        for p in ALL {
            parse_config(p.settings(), None, RawConfig::default())
                .unwrap_or_else(|e| panic!("{}: {e}", p.name()));
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("fig9".parse::<Preset>().is_err());
    }

    #[test]
    fn fig1_matches_caption() {
        let c = parse_config(Preset::Fig1.settings(), None, RawConfig::default()).unwrap();
        let Simulation::Thurner(m) = c.simulation else {
            unreachable!()
        };
        assert_eq!(
            (m.n, m.p, m.rule2, c.steps),
            (100, 0.0002, Rule2Variant::RandomFlip, 3_000_000)
        );
    }

    #[test]
    fn fig2_analyzes_a_million_steps() {
        let c = parse_config(Preset::Fig2.settings(), None, RawConfig::default()).unwrap();
        assert!(c.steps - c.burn_in_steps() >= 1_000_000);
    }
}
