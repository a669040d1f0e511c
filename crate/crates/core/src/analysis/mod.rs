//! Statistics of punctuated-equilibrium time series.

mod error;
pub mod fit;
pub mod histogram;
pub mod plateau;
pub mod zeta;

pub use error::AnalysisError;
pub use fit::{
    compare_families, fit_exponential, fit_powerlaw, Comparison, Family, FitReport, TauMin, Verdict,
};
pub use histogram::{histogram, Bin, Binning, Histogram, Normalization};
pub use plateau::{
    cumulative_activity, detect_plateaus, run_lengths, DiversitySeries, PlateauList, PlateauTracker,
};
