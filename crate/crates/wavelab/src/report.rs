//! Log-log slope fits and machine-readable experiment reports.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::io::Write;
use std::path::Path;

/// Least-squares power-law fit of positive (x, y) samples, with the
/// target exponent the experiment is checking against.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SlopeReport {
    /// log of the abscissae (natural log).
    pub log_x: Vec<f64>,
    /// log of the ordinates.
    pub log_y: Vec<f64>,
    pub slope: f64,
    pub intercept: f64,
    pub target: f64,
    /// Max absolute deviation of the data from the fitted line, in log units.
    pub residual: f64,
    /// max/min over samples of y / x^target — uniformity of the compensated data.
    pub band_ratio: f64,
}

impl SlopeReport {
    pub fn slope_error(&self) -> f64 {
        (self.slope - self.target).abs()
    }
}

/// Fit log y = slope * log x + intercept by least squares.
/// Requires at least 3 strictly positive samples.
pub fn fit_slope(points: &[(f64, f64)], target: f64) -> Result<SlopeReport> {
    if points.len() < 3 {
        return Err(Error::DegenerateFit(points.len()));
    }
    if points.iter().any(|&(x, y)| !(x > 0.0) || !(y > 0.0)) {
        return Err(Error::InvalidParameter("fit_slope needs strictly positive samples".into()));
    }
    let log_x: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let log_y: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let m = points.len() as f64;
    let sx: f64 = log_x.iter().sum();
    let sy: f64 = log_y.iter().sum();
    let sxx: f64 = log_x.iter().map(|v| v * v).sum();
    let sxy: f64 = log_x.iter().zip(&log_y).map(|(a, b)| a * b).sum();
    let denom = m * sxx - sx * sx;
    if denom.abs() <= 1e-12 * (m * sxx).abs() || denom == 0.0 {
        return Err(Error::DegenerateFit(points.len()));
    }
    let slope = (m * sxy - sx * sy) / denom;
    let intercept = (sy - slope * sx) / m;
    let residual = log_x
        .iter()
        .zip(&log_y)
        .map(|(x, y)| (y - (slope * x + intercept)).abs())
        .fold(0.0, f64::max);
    let compensated: Vec<f64> =
        points.iter().map(|&(x, y)| y / x.powf(target)).collect();
    let cmax = compensated.iter().cloned().fold(f64::MIN, f64::max);
    let cmin = compensated.iter().cloned().fold(f64::MAX, f64::min);
    Ok(SlopeReport {
        log_x,
        log_y,
        slope,
        intercept,
        target,
        residual,
        band_ratio: cmax / cmin,
    })
}

/// Max/min ratio of a set of positive values (uniform-boundedness probe).
pub fn band_ratio(values: &[f64]) -> Result<f64> {
    if values.is_empty() || values.iter().any(|&v| !(v > 0.0)) {
        return Err(Error::InvalidParameter("band_ratio needs positive values".into()));
    }
    let max = values.iter().cloned().fold(f64::MIN, f64::max);
    let min = values.iter().cloned().fold(f64::MAX, f64::min);
    Ok(max / min)
}

/// JSON summary attached to every experiment's output.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Summary {
    pub experiment: String,
    /// Stable machine-readable id of the claim being measured.
    pub anchor: String,
    pub pass: bool,
    pub metrics: serde_json::Value,
}

impl Summary {
    pub fn new(experiment: &str, anchor: &str, pass: bool, metrics: serde_json::Value) -> Self {
        Self { experiment: experiment.into(), anchor: anchor.into(), pass, metrics }
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        let mut file = std::fs::File::create(path)?;
        serde_json::to_writer_pretty(&mut file, self)
            .map_err(|e| Error::Config(format!("JSON encode: {e}")))?;
        writeln!(file)?;
        Ok(())
    }
}

/// Write a CSV with a schema comment in row 1, a header row, then the rows.
pub fn write_csv_rows(path: &Path, schema: &str, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    let mut file = std::io::BufWriter::new(std::fs::File::create(path)?);
    writeln!(file, "# schema={schema}")?;
    writeln!(file, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|v| format!("{v:.17e}")).collect();
        writeln!(file, "{}", line.join(","))?;
    }
    file.flush()?;
    Ok(())
}
