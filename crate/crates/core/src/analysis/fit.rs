//! Exponential and power-law fits of waiting-time data, and a likelihood
//! comparison between the two families.
//!
//! Durations are integers, so both families are fitted as discrete laws on
//! `τ ≥ τ_min`:
//!
//! - exponential: `P(τ) = (1 − e^{−λ}) e^{−λ(τ − τ_min)}` (shifted geometric);
//! - power law: `P(τ) = τ^{−α} / ζ(α, τ_min)`.
//!
//! Each fit also reports a least-squares line through the density histogram,
//! semi-log for the exponential and log-log for the power law, which is what
//! a straight line drawn on those plots measures.

use std::fmt;
use std::str::FromStr;

use super::histogram::{histogram, Bin, Binning, Normalization};
use super::zeta::hurwitz_zeta;
use super::{AnalysisError, PlateauList};

/// Fewest durations `≥ τ_min` a fit accepts.
pub const MIN_FIT_SAMPLES: usize = 100;

/// Regressions use every non-empty bin up to the last one holding at least
/// this many counts.
pub const MIN_TAIL_BIN_COUNT: u64 = 10;

pub const DEFAULT_TAU_MIN: u64 = 2;

pub const DEFAULT_LOG_RATIO: f64 = 2.0;

/// `|ΔlnL| / m` below this is reported as inconclusive.
pub const DEFAULT_COMPARISON_THRESHOLD: f64 = 0.01;

const AUTO_TAU_MIN_CANDIDATES: usize = 200;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    Exponential,
    PowerLaw,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::Exponential => "Exponential",
            Family::PowerLaw => "PowerLaw",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FitReport {
    pub family: Family,
    /// Rate `λ` for the exponential, exponent `α` for the power law.
    pub parameter: f64,
    pub tau_min: u64,
    /// R² of the histogram regression, in `[0, 1]`.
    pub goodness: f64,
    pub log_likelihood: f64,
    /// Durations `≥ τ_min` used by the fit.
    pub n_tail: usize,
    /// Slope of the histogram regression: `d ln P / dτ` (exponential) or
    /// `d log P / d log τ` (power law). `None` with fewer than two bins.
    pub regression_slope: Option<f64>,
    /// Kolmogorov-Smirnov distance between the tail and the fitted law.
    pub ks_distance: f64,
}

/// Lower cutoff policy for the power-law fit.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TauMin {
    Fixed(u64),
    /// Cutoff minimising the KS distance over candidate values.
    Auto,
}

impl fmt::Display for TauMin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TauMin::Fixed(t) => write!(f, "{t}"),
            TauMin::Auto => f.write_str("auto"),
        }
    }
}

impl FromStr for TauMin {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "auto" {
            return Ok(TauMin::Auto);
        }
        match s.parse::<u64>() {
            Ok(t) if t >= 1 => Ok(TauMin::Fixed(t)),
            _ => Err(AnalysisError::InvalidArgument {
                field: "tau_min",
                reason: format!("{s:?} is neither a positive integer nor \"auto\""),
            }),
        }
    }
}

fn tail_of(durations: &PlateauList, tau_min: u64) -> Result<Vec<u64>, AnalysisError> {
    if tau_min == 0 {
        return Err(AnalysisError::InvalidArgument {
            field: "tau_min",
            reason: "must be at least 1".into(),
        });
    }
    let tail = durations.tail(tau_min);
    if tail.len() < MIN_FIT_SAMPLES {
        return Err(AnalysisError::InsufficientData {
            needed: MIN_FIT_SAMPLES,
            found: tail.len(),
            tau_min,
        });
    }
    Ok(tail)
}

/// Ordinary least squares `y = a + b x`; returns `(b, R²)`.
pub(crate) fn least_squares(points: &[(f64, f64)]) -> Option<(f64, f64)> {
    if points.len() < 2 {
        return None;
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let syy: f64 = points.iter().map(|p| (p.1 - my).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 {
        1.0
    } else {
        (sxy * sxy / (sxx * syy)).clamp(0.0, 1.0)
    };
    Some((slope, r2))
}

/// Non-empty bins up to the last bin with at least [`MIN_TAIL_BIN_COUNT`]
/// counts, ignoring bins that start below `tau_min`.
pub fn bulk_bins(bins: impl Iterator<Item = Bin>, tau_min: u64) -> Vec<Bin> {
    let bins: Vec<Bin> = bins.filter(|b| b.lo >= tau_min).collect();
    let Some(last) = bins.iter().rposition(|b| b.count >= MIN_TAIL_BIN_COUNT) else {
        return Vec::new();
    };
    bins.into_iter()
        .take(last + 1)
        .filter(|b| b.count > 0)
        .collect()
}

/// Bin width for the semi-log regression: half the fitted decay length.
pub fn exponential_bin_width(rate: f64) -> u64 {
    ((0.5 / rate).round() as u64).max(1)
}

/// Semi-log regression of the density histogram: `(d ln P/dτ, R²)`.
pub fn semilog_regression(tail: &[u64], tau_min: u64, width: u64) -> Option<(f64, f64)> {
    let h = histogram(tail, Binning::Linear(width), Normalization::Density).ok()?;
    let points: Vec<(f64, f64)> = bulk_bins(h.bins(), tau_min)
        .iter()
        .map(|b| (b.center(), b.density.ln()))
        .collect();
    least_squares(&points)
}

/// Log-log regression of the logarithmically binned density histogram:
/// `(d log P/d log τ, R²)`.
pub fn loglog_regression(tail: &[u64], tau_min: u64, ratio: f64) -> Option<(f64, f64)> {
    let h = histogram(tail, Binning::Logarithmic(ratio), Normalization::Density).ok()?;
    let points: Vec<(f64, f64)> = bulk_bins(h.bins(), tau_min)
        .iter()
        .map(|b| (b.log_center().ln(), b.density.ln()))
        .collect();
    least_squares(&points)
}

/// Sorted distinct values with their multiplicities.
fn value_counts(sorted: &[u64]) -> Vec<(u64, usize)> {
    let mut out: Vec<(u64, usize)> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some((last, c)) if *last == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out
}

/// KS distance between the empirical tail and a discrete law given by its
/// survival function `P(τ > x)`, evaluated at every observed value.
fn ks_distance(counts: &[(u64, usize)], m: usize, survival: impl Fn(u64) -> f64) -> f64 {
    let mut below = 0usize;
    let mut d: f64 = 0.0;
    for &(v, c) in counts {
        below += c;
        let empirical = below as f64 / m as f64;
        let model = 1.0 - survival(v);
        d = d.max((empirical - model).abs());
    }
    d
}

/// Exponential (shifted geometric) fit on `τ ≥ τ_min`.
///
/// The rate is the exact discrete maximum-likelihood value
/// `λ = ln(1 + 1/(τ̄ − τ_min))`.
pub fn fit_exponential(durations: &PlateauList, tau_min: u64) -> Result<FitReport, AnalysisError> {
    let tail = tail_of(durations, tau_min)?;
    let m = tail.len();
    let excess: f64 = tail.iter().map(|&t| (t - tau_min) as f64).sum();
    let mean_excess = excess / m as f64;
    if mean_excess == 0.0 {
        return Err(AnalysisError::Degenerate(format!(
            "all {m} durations equal tau_min = {tau_min}; the rate is unbounded"
        )));
    }
    let rate = (1.0 / mean_excess).ln_1p();
    let log_q = -rate;
    let log_1mq = (-(-rate).exp_m1()).ln();
    let log_likelihood = m as f64 * log_1mq + log_q * excess;

    let (regression_slope, goodness) =
        match semilog_regression(&tail, tau_min, exponential_bin_width(rate)) {
            Some((s, r2)) => (Some(s), r2),
            None => (None, 0.0),
        };

    let mut sorted = tail;
    sorted.sort_unstable();
    let ks = ks_distance(&value_counts(&sorted), m, |x| {
        (log_q * (x + 1 - tau_min) as f64).exp()
    });

    Ok(FitReport {
        family: Family::Exponential,
        parameter: rate,
        tau_min,
        goodness,
        log_likelihood,
        n_tail: m,
        regression_slope,
        ks_distance: ks,
    })
}

/// Closed-form approximation to the discrete power-law MLE,
/// `1 + m / Σ ln(τ / (τ_min − ½))`.
pub fn hill_exponent(tail: &[u64], tau_min: u64) -> f64 {
    let shift = tau_min as f64 - 0.5;
    let s: f64 = tail.iter().map(|&t| (t as f64 / shift).ln()).sum();
    1.0 + tail.len() as f64 / s
}

fn powerlaw_log_likelihood(alpha: f64, m: usize, sum_ln: f64, tau_min: u64) -> f64 {
    -alpha * sum_ln - m as f64 * hurwitz_zeta(alpha, tau_min as f64).ln()
}

/// Exact discrete maximum-likelihood exponent, by golden-section search of
/// the (concave) log-likelihood.
pub fn powerlaw_mle(tail: &[u64], tau_min: u64) -> f64 {
    let m = tail.len();
    let sum_ln: f64 = tail.iter().map(|&t| (t as f64).ln()).sum();
    let f = |a: f64| powerlaw_log_likelihood(a, m, sum_ln, tau_min);
    let (mut lo, mut hi) = (1.0 + 1e-9, 30.0);
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    while hi - lo > 1e-10 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = f(x1);
        }
    }
    0.5 * (lo + hi)
}

fn powerlaw_fixed(
    durations: &PlateauList,
    tau_min: u64,
    log_ratio: f64,
) -> Result<FitReport, AnalysisError> {
    let tail = tail_of(durations, tau_min)?;
    let m = tail.len();
    if tail.iter().all(|&t| t == tau_min) {
        return Err(AnalysisError::Degenerate(format!(
            "all {m} durations equal tau_min = {tau_min}; the exponent is unbounded"
        )));
    }
    let alpha = powerlaw_mle(&tail, tau_min);
    let sum_ln: f64 = tail.iter().map(|&t| (t as f64).ln()).sum();
    let log_likelihood = powerlaw_log_likelihood(alpha, m, sum_ln, tau_min);
    let (regression_slope, goodness) = match loglog_regression(&tail, tau_min, log_ratio) {
        Some((s, r2)) => (Some(s), r2),
        None => (None, 0.0),
    };
    let mut sorted = tail;
    sorted.sort_unstable();
    let norm = hurwitz_zeta(alpha, tau_min as f64);
    let ks = ks_distance(&value_counts(&sorted), m, |x| {
        hurwitz_zeta(alpha, (x + 1) as f64) / norm
    });
    Ok(FitReport {
        family: Family::PowerLaw,
        parameter: alpha,
        tau_min,
        goodness,
        log_likelihood,
        n_tail: m,
        regression_slope,
        ks_distance: ks,
    })
}

/// Discrete power-law fit; with [`TauMin::Auto`] the cutoff is the candidate
/// (among the smallest distinct observed values leaving at least
/// [`MIN_FIT_SAMPLES`] in the tail) with the smallest KS distance.
pub fn fit_powerlaw(durations: &PlateauList, tau_min: TauMin) -> Result<FitReport, AnalysisError> {
    fit_powerlaw_with_ratio(durations, tau_min, DEFAULT_LOG_RATIO)
}

pub fn fit_powerlaw_with_ratio(
    durations: &PlateauList,
    tau_min: TauMin,
    log_ratio: f64,
) -> Result<FitReport, AnalysisError> {
    match tau_min {
        TauMin::Fixed(t) => powerlaw_fixed(durations, t, log_ratio),
        TauMin::Auto => {
            let mut sorted = durations.durations().to_vec();
            sorted.sort_unstable();
            let counts = value_counts(&sorted);
            let mut remaining = sorted.len();
            let mut best: Option<FitReport> = None;
            let mut last_err = None;
            for &(v, c) in counts.iter().take(AUTO_TAU_MIN_CANDIDATES) {
                if remaining < MIN_FIT_SAMPLES {
                    break;
                }
                match powerlaw_fixed(durations, v, log_ratio) {
                    Ok(r) => {
                        if best.as_ref().is_none_or(|b| r.ks_distance < b.ks_distance) {
                            best = Some(r);
                        }
                    }
                    Err(e) => last_err = Some(e),
                }
                remaining -= c;
            }
            best.ok_or_else(|| {
                last_err.unwrap_or(AnalysisError::InsufficientData {
                    needed: MIN_FIT_SAMPLES,
                    found: sorted.len(),
                    tau_min: sorted.first().copied().unwrap_or(1),
                })
            })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    ExponentialPreferred,
    PowerLawPreferred,
    Inconclusive,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::ExponentialPreferred => "ExponentialPreferred",
            Verdict::PowerLawPreferred => "PowerLawPreferred",
            Verdict::Inconclusive => "Inconclusive",
        })
    }
}

impl FromStr for Verdict {
    type Err = AnalysisError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "ExponentialPreferred" => Ok(Verdict::ExponentialPreferred),
            "PowerLawPreferred" => Ok(Verdict::PowerLawPreferred),
            "Inconclusive" => Ok(Verdict::Inconclusive),
            _ => Err(AnalysisError::InvalidArgument {
                field: "verdict",
                reason: format!("unknown verdict {s:?}"),
            }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Comparison {
    pub verdict: Verdict,
    pub tau_min: u64,
    /// `ln L_powerlaw − ln L_exponential`; `None` below the data floor.
    pub log_likelihood_ratio: Option<f64>,
    /// Ratio divided by the number of tail durations.
    pub normalized_ratio: Option<f64>,
    pub exponential: Option<FitReport>,
    pub power_law: Option<FitReport>,
}

/// Log-likelihood-ratio comparison of the two families at a common cutoff.
///
/// Fewer than [`MIN_FIT_SAMPLES`] durations `≥ τ_min` yield `Inconclusive`
/// rather than an error; other fit failures propagate.
pub fn compare_families(
    durations: &PlateauList,
    tau_min: u64,
    threshold: f64,
) -> Result<Comparison, AnalysisError> {
    let inconclusive = Comparison {
        verdict: Verdict::Inconclusive,
        tau_min,
        log_likelihood_ratio: None,
        normalized_ratio: None,
        exponential: None,
        power_law: None,
    };
    if durations.tail(tau_min).len() < MIN_FIT_SAMPLES {
        return Ok(inconclusive);
    }
    let exponential = fit_exponential(durations, tau_min)?;
    let power_law = fit_powerlaw(durations, TauMin::Fixed(tau_min))?;
    let ratio = power_law.log_likelihood - exponential.log_likelihood;
    let normalized = ratio / exponential.n_tail as f64;
    let verdict = if normalized.abs() < threshold {
        Verdict::Inconclusive
    } else if ratio > 0.0 {
        Verdict::PowerLawPreferred
    } else {
        Verdict::ExponentialPreferred
    };
    Ok(Comparison {
        verdict,
        tau_min,
        log_likelihood_ratio: Some(ratio),
        normalized_ratio: Some(normalized),
        exponential: Some(exponential),
        power_law: Some(power_law),
    })
}
