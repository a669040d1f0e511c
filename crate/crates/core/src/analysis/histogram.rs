//! Histograms of positive integer data (waiting times, avalanche sizes).
//!
//! Bins are half-open integer intervals `[lo, hi)`; the width of a bin is the
//! number of integers it holds.

use std::fmt;
use std::str::FromStr;

use super::AnalysisError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Binning {
    /// Bins of fixed integer `width`, starting at the smallest datum.
    Linear(u64),
    /// Edges `1, r, r², …` rounded up to integers; repeated edges are merged.
    Logarithmic(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Counts,
    /// Count divided by total count and bin width, so `Σ value·width = 1`.
    Density,
}

/// Binned counts with both raw and density values available.
#[derive(Debug, Clone, PartialEq)]
pub struct Histogram {
    edges: Vec<u64>,
    counts: Vec<u64>,
    normalization: Normalization,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bin {
    pub lo: u64,
    pub hi: u64,
    pub count: u64,
    pub density: f64,
}

impl Bin {
    pub fn width(&self) -> u64 {
        self.hi - self.lo
    }

    /// Geometric mean of the first and last integer in the bin.
    pub fn log_center(&self) -> f64 {
        ((self.lo as f64) * ((self.hi - 1) as f64)).sqrt()
    }

    /// Arithmetic mean of the first and last integer in the bin.
    pub fn center(&self) -> f64 {
        0.5 * (self.lo as f64 + (self.hi - 1) as f64)
    }
}

impl Histogram {
    pub fn edges(&self) -> &[u64] {
        &self.edges
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn bins(&self) -> impl Iterator<Item = Bin> + '_ {
        let total = self.total() as f64;
        self.edges
            .windows(2)
            .zip(&self.counts)
            .map(move |(e, &count)| Bin {
                lo: e[0],
                hi: e[1],
                count,
                density: count as f64 / (total * (e[1] - e[0]) as f64),
            })
    }

    /// Bin heights under the histogram's normalization.
    pub fn values(&self) -> Vec<f64> {
        match self.normalization {
            Normalization::Counts => self.counts.iter().map(|&c| c as f64).collect(),
            Normalization::Density => self.bins().map(|b| b.density).collect(),
        }
    }
}

fn linear_edges(min: u64, max: u64, width: u64) -> Vec<u64> {
    let mut edges = vec![min];
    let mut e = min;
    while e <= max {
        e += width;
        edges.push(e);
    }
    edges
}

fn log_edges(max: u64, ratio: f64) -> Vec<u64> {
    let mut edges = vec![1u64];
    let mut x = 1.0f64;
    while *edges.last().unwrap() <= max {
        x *= ratio;
        let e = x.ceil() as u64;
        if e > *edges.last().unwrap() {
            edges.push(e);
        }
    }
    edges
}

pub fn histogram(
    data: &[u64],
    binning: Binning,
    normalization: Normalization,
) -> Result<Histogram, AnalysisError> {
    if data.is_empty() {
        return Err(AnalysisError::InvalidBinning("no data".into()));
    }
    if let Some(&value) = data.iter().find(|&&d| d == 0) {
        return Err(AnalysisError::InvalidDatum { value });
    }
    let min = *data.iter().min().unwrap();
    let max = *data.iter().max().unwrap();
    let edges = match binning {
        Binning::Linear(width) => {
            if width == 0 {
                return Err(AnalysisError::InvalidBinning(
                    "linear width must be >= 1".into(),
                ));
            }
            linear_edges(min, max, width)
        }
        Binning::Logarithmic(ratio) => {
            if !(ratio > 1.0 && ratio.is_finite()) {
                return Err(AnalysisError::InvalidBinning(format!(
                    "logarithmic ratio {ratio} must exceed 1"
                )));
            }
            log_edges(max, ratio)
        }
    };
    let mut counts = vec![0u64; edges.len() - 1];
    for &d in data {
        // Index of the last edge <= d.
        let bin = edges.partition_point(|&e| e <= d) - 1;
        counts[bin] += 1;
    }
    Ok(Histogram {
        edges,
        counts,
        normalization,
    })
}

impl fmt::Display for Binning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Binning::Linear(w) => write!(f, "linear:{w}"),
            Binning::Logarithmic(r) => write!(f, "log:{r}"),
        }
    }
}

impl FromStr for Binning {
    type Err = AnalysisError;

    /// `linear`, `linear:<width>`, `log` or `log:<ratio>`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        let bad = || AnalysisError::InvalidBinning(format!("cannot parse {s:?}"));
        match kind {
            "linear" => Ok(Binning::Linear(match arg {
                Some(a) => a.parse().map_err(|_| bad())?,
                None => 1,
            })),
            "log" => Ok(Binning::Logarithmic(match arg {
                Some(a) => a.parse().map_err(|_| bad())?,
                None => 2.0,
            })),
            _ => Err(bad()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn unit_width_linear_bins() {
        let h = histogram(&[1, 1, 2, 3], Binning::Linear(1), Normalization::Counts).unwrap();
        assert_eq!(h.edges(), &[1, 2, 3, 4]);
        assert_eq!(h.counts(), &[2, 1, 1]);
    }

    #[test]
    fn log_edges_are_rounded_up_and_deduplicated() {
        let h = histogram(
            &[1, 2, 3, 40],
            Binning::Logarithmic(1.5),
            Normalization::Counts,
        )
        .unwrap();
        // 1, 1.5, 2.25, 3.375, 5.06, 7.59, 11.4, 17.1, 25.6, 38.4, 57.7
        assert_eq!(h.edges(), &[1, 2, 3, 4, 6, 8, 12, 18, 26, 39, 58]);
        assert_eq!(h.total(), 4);
        assert_eq!(h.counts()[9], 1);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(matches!(
            histogram(&[1, 0], Binning::Linear(1), Normalization::Counts),
            Err(AnalysisError::InvalidDatum { value: 0 })
        ));
        assert!(histogram(&[], Binning::Linear(1), Normalization::Counts).is_err());
        assert!(histogram(&[1], Binning::Linear(0), Normalization::Counts).is_err());
        assert!(histogram(&[1], Binning::Logarithmic(1.0), Normalization::Counts).is_err());
    }

    #[test]
    fn parses_binning_flags() {
        assert_eq!("linear".parse::<Binning>().unwrap(), Binning::Linear(1));
        assert_eq!("linear:5".parse::<Binning>().unwrap(), Binning::Linear(5));
        assert_eq!("log".parse::<Binning>().unwrap(), Binning::Logarithmic(2.0));
        assert_eq!(
            "log:1.5".parse::<Binning>().unwrap(),
            Binning::Logarithmic(1.5)
        );
        assert!("cubic".parse::<Binning>().is_err());
    }

    #[test]
    fn geometric_density_matches_analytic_mass() {
        // P(τ = t) = (1-q) q^(t-1), t >= 1; mass in [lo, hi) = q^(lo-1) - q^(hi-1).
        let q: f64 = 0.95;
        let samples = 100_000;
        let mut rng = rand_pcg::Pcg64::seed_from_u64(2024);
        let data: Vec<u64> = (0..samples)
            .map(|_| {
                let u: f64 = rng.gen();
                1 + ((1.0 - u).ln() / q.ln()).floor() as u64
            })
            .collect();
        let h = histogram(&data, Binning::Logarithmic(2.0), Normalization::Density).unwrap();
        let mut checked = 0;
        for b in h.bins() {
            let mass = q.powi(b.lo as i32 - 1) - q.powi(b.hi as i32 - 1);
            if mass * samples as f64 >= 5000.0 {
                let expected = mass / b.width() as f64;
                assert!(
                    (b.density - expected).abs() <= 0.05 * expected,
                    "bin [{}, {}): {} vs {}",
                    b.lo,
                    b.hi,
                    b.density,
                    expected
                );
                checked += 1;
            }
        }
        assert!(checked >= 4, "only {checked} bins checked");
    }

    proptest! {
        #[test]
        fn density_integrates_to_one(
            data in prop::collection::vec(1u64..5000, 1..400),
            width in 1u64..50,
            ratio in 1.1f64..4.0,
        ) {
            for binning in [Binning::Linear(width), Binning::Logarithmic(ratio)] {
                let h = histogram(&data, binning, Normalization::Density).unwrap();
                let mass: f64 = h.bins().map(|b| b.density * b.width() as f64).sum();
                prop_assert!((mass - 1.0).abs() < 1e-9);
                prop_assert_eq!(h.total(), data.len() as u64);
                prop_assert!(h.edges().windows(2).all(|e| e[0] < e[1]));
                prop_assert_eq!(h.counts().len(), h.edges().len() - 1);
            }
        }
    }
}
