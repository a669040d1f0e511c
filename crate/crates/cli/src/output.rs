//! Artifact writers. All data files are CSV; summaries are flat
//! `key=value` text plus a human-readable report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use schumpeter_core::analysis::{histogram, Binning, Normalization, PlateauList};

use crate::error::ExperimentError;

pub const TIMESERIES_FILE: &str = "timeseries.csv";
pub const EXTINCTIONS_FILE: &str = "extinctions.csv";
pub const PLATEAUS_FILE: &str = "plateaus.csv";
pub const HISTOGRAM_FILE: &str = "histogram.csv";
pub const STAIRCASE_FILE: &str = "staircase.csv";
pub const SUMMARY_FILE: &str = "summary.txt";
pub const REPORT_FILE: &str = "report.txt";
pub const CONFIG_FILE: &str = "config.toml";
pub const SWEEP_FILE: &str = "sweep.csv";
pub const SWEEP_SUMMARY_FILE: &str = "sweep_summary.txt";

/// Name and version of this program, recorded in every summary.
pub const VERSION: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

/// CSV file written row by row.
pub struct CsvSink {
    path: PathBuf,
    writer: csv::Writer<File>,
}

fn csv_error(path: &Path, e: csv::Error) -> ExperimentError {
    let source = match e.into_kind() {
        csv::ErrorKind::Io(io) => io,
        other => std::io::Error::other(format!("{other:?}")),
    };
    ExperimentError::io(path, source)
}

impl CsvSink {
    pub fn create(path: PathBuf, header: &[&str]) -> Result<Self, ExperimentError> {
        let mut writer = csv::Writer::from_path(&path).map_err(|e| csv_error(&path, e))?;
        writer
            .write_record(header)
            .map_err(|e| csv_error(&path, e))?;
        Ok(Self { path, writer })
    }

    pub fn row<S: serde::Serialize>(&mut self, record: S) -> Result<(), ExperimentError> {
        self.writer
            .serialize(record)
            .map_err(|e| csv_error(&self.path, e))
    }

    pub fn finish(mut self) -> Result<(), ExperimentError> {
        self.writer
            .flush()
            .map_err(|e| ExperimentError::io(&self.path, e))
    }
}

pub fn write_plateaus(dir: &Path, plateaus: &PlateauList) -> Result<(), ExperimentError> {
    let mut sink = CsvSink::create(dir.join(PLATEAUS_FILE), &["tau"])?;
    for &tau in plateaus.durations() {
        sink.row([tau])?;
    }
    sink.finish()
}

/// Density histogram of every duration.
pub fn write_histogram(
    dir: &Path,
    plateaus: &PlateauList,
    binning: Binning,
) -> Result<(), ExperimentError> {
    let mut sink = CsvSink::create(
        dir.join(HISTOGRAM_FILE),
        &["bin_lo", "bin_hi", "count", "density"],
    )?;
    if !plateaus.is_empty() {
        let h = histogram(plateaus.durations(), binning, Normalization::Density)?;
        for b in h.bins() {
            sink.row((b.lo, b.hi, b.count, b.density))?;
        }
    }
    sink.finish()
}

pub fn write_text(path: &Path, text: &str) -> Result<(), ExperimentError> {
    let file = File::create(path).map_err(|e| ExperimentError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| ExperimentError::io(path, e))
}

/// Ordered `key=value` pairs.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues(pub Vec<(String, String)>);

impl KeyValues {
    pub fn push(&mut self, key: impl Into<String>, value: impl ToString) {
        self.0.push((key.into(), value.to_string()));
    }

    /// `value` or `NA` when absent.
    pub fn push_opt<T: ToString>(&mut self, key: impl Into<String>, value: Option<T>) {
        let v = value.map_or_else(|| "NA".to_string(), |v| v.to_string());
        self.0.push((key.into(), v));
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn render(&self) -> String {
        self.0.iter().map(|(k, v)| format!("{k}={v}\n")).collect()
    }

    /// Parses text written by [`KeyValues::render`].
    pub fn parse(text: &str) -> KeyValues {
        KeyValues(
            text.lines()
                .filter_map(|l| l.split_once('='))
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        )
    }
}
