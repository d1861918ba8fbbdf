//! Normal quantile diagnostics for the log-probabilities of a cutoff ensemble.
//!
//! Observed values are standardized as `(ln P - center) / sqrt(n σ1²)` and
//! compared with standard normal quantiles at a grid of percentiles.

use std::io::{self, Write};

use super::normal::inverse_normal_cdf;
use crate::ensemble::CutoffEnsemble;
use crate::error::{Error, Result};
use crate::keyboard::{log_moments, Keyboard};
use crate::output::Meta;

/// Centering used to standardize `ln P`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Centering {
    /// `n μ1 + ln s`, the exact mean of `ln P` over words of length `n`.
    #[default]
    SliceMean,
    /// `n μ1`, dropping the `ln s` term that vanishes after scaling as `n` grows.
    Asymptotic,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityOptions {
    /// Percentiles in `(0, 1)`.
    pub percentiles: Vec<f64>,
    pub centering: Centering,
}

impl Default for NormalityOptions {
    /// Percentiles 0.5%, 1%, ..., 99.5%.
    fn default() -> Self {
        NormalityOptions { percentiles: (1..200).map(|i| i as f64 / 200.0).collect(), centering: Centering::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct QuantilePoint {
    pub percentile: f64,
    pub theoretical: f64,
    pub observed: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct NormalityReport {
    pub points: Vec<QuantilePoint>,
    pub band: (f64, f64),
    /// Largest `|observed - theoretical|` over percentiles inside `band`.
    pub central_deviation: f64,
    pub center: f64,
    pub scale: f64,
}

impl NormalityReport {
    /// Largest deviation over percentiles in `[lo, hi]`.
    pub fn deviation_in(&self, lo: f64, hi: f64) -> f64 {
        band_deviation(&self.points, lo, hi)
    }

    /// CSV with columns `percentile,theoretical_z,observed_z`.
    pub fn write_csv<W: Write>(&self, mut w: W, meta: &Meta) -> io::Result<()> {
        meta.write_header(&mut w)?;
        writeln!(w, "percentile,theoretical_z,observed_z")?;
        for p in &self.points {
            writeln!(w, "{},{},{}", p.percentile, p.theoretical, p.observed)?;
        }
        Ok(())
    }
}

fn band_deviation(points: &[QuantilePoint], lo: f64, hi: f64) -> f64 {
    // Grid points are decimal fractions; allow for their rounding.
    const SLACK: f64 = 1e-12;
    points
        .iter()
        .filter(|p| p.percentile >= lo - SLACK && p.percentile <= hi + SLACK)
        .map(|p| (p.observed - p.theoretical).abs())
        .fold(0.0, f64::max)
}

pub fn normality_report(cut: &CutoffEnsemble, kb: &Keyboard, band: (f64, f64)) -> Result<NormalityReport> {
    normality_report_with(cut, kb, band, &NormalityOptions::default())
}

/// Standardizes every log-probability of `cut` and compares its quantiles
/// with standard normal quantiles.
pub fn normality_report_with(
    cut: &CutoffEnsemble,
    kb: &Keyboard,
    band: (f64, f64),
    options: &NormalityOptions,
) -> Result<NormalityReport> {
    if cut.fingerprint() != kb.fingerprint() {
        return Err(Error::KeyboardMismatch { left: cut.fingerprint(), right: kb.fingerprint() });
    }
    if !(0.0 < band.0 && band.0 < band.1 && band.1 < 1.0) {
        return Err(Error::InvalidArgument(format!("band {band:?} must satisfy 0 < lo < hi < 1")));
    }
    if options.percentiles.iter().any(|p| !(*p > 0.0 && *p < 1.0)) {
        return Err(Error::InvalidArgument("percentiles must lie in (0, 1)".into()));
    }
    let moments = log_moments(kb);
    if moments.sigma1_sq <= 0.0 {
        return Err(Error::InvalidArgument("letter log-probabilities have zero variance (equal keyboard)".into()));
    }
    let n = cut.n() as f64;
    if cut.n() == 0 {
        return Err(Error::InvalidArgument("cutoff length must be at least 1".into()));
    }
    let center = match options.centering {
        Centering::SliceMean => n * moments.mu1 + kb.space().ln(),
        Centering::Asymptotic => n * moments.mu1,
    };
    let scale = (n * moments.sigma1_sq).sqrt();

    let mut sorted = cut.log_probs().to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let points: Vec<QuantilePoint> = options
        .percentiles
        .iter()
        .map(|&p| QuantilePoint {
            percentile: p,
            theoretical: inverse_normal_cdf(p),
            observed: (empirical_quantile(&sorted, p) - center) / scale,
        })
        .collect();
    let central_deviation = band_deviation(&points, band.0, band.1);
    Ok(NormalityReport { points, band, central_deviation, center, scale })
}

/// Linear interpolation between order statistics at position `(N - 1) p`.
fn empirical_quantile(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let i = h.floor() as usize;
    if i + 1 >= sorted.len() {
        return sorted[sorted.len() - 1];
    }
    sorted[i] + (h - i as f64) * (sorted[i + 1] - sorted[i])
}
