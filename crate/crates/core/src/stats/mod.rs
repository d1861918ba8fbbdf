//! Analyses of ranked word probabilities and frequencies.

mod entropy;
mod normal;
mod normality;

use std::io::{self, Write};

pub use entropy::{closed_form_entropy, entropy_oracle, euler_gamma, log_spacing_limit};
pub use normal::inverse_normal_cdf;
pub use normality::{normality_report, normality_report_with, Centering, NormalityOptions, NormalityReport, QuantilePoint};

use crate::ensemble::{CutoffEnsemble, RankedEnsemble};
use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::output::Meta;

/// Minimum `hi - lo` for a tail fit.
pub const MIN_FIT_SPAN: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SourceKind {
    /// Model probabilities.
    Model,
    /// Counts from a sampling experiment.
    Sample,
    /// Counts from a text corpus.
    Corpus,
}

impl SourceKind {
    pub fn name(self) -> &'static str {
        match self {
            SourceKind::Model => "model",
            SourceKind::Sample => "sample",
            SourceKind::Corpus => "corpus",
        }
    }
}

/// Values by rank, rank 1 first. Values are positive and non-increasing.
#[derive(Clone, Debug, PartialEq)]
pub struct RankFrequencyTable {
    values: Vec<f64>,
    source: SourceKind,
}

impl RankFrequencyTable {
    pub fn new(values: Vec<f64>, source: SourceKind) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
            return Err(Error::InvalidArgument(format!("rank {} has non-positive value {v}", i + 1)));
        }
        if let Some(i) = values.windows(2).position(|w| w[1] > w[0]) {
            return Err(Error::InvalidArgument(format!("values increase between ranks {} and {}", i + 1, i + 2)));
        }
        Ok(RankFrequencyTable { values, source })
    }

    /// Probabilities of a ranked model ensemble.
    pub fn from_ranked(top: &RankedEnsemble) -> Result<Self> {
        RankFrequencyTable::new(top.log_probs().map(f64::exp).collect(), SourceKind::Model)
    }

    /// All probabilities of a cutoff ensemble, sorted.
    pub fn from_cutoff(cut: &CutoffEnsemble) -> Result<Self> {
        RankFrequencyTable::new(cut.sorted_desc().into_iter().map(f64::exp).collect(), SourceKind::Model)
    }

    pub fn source(&self) -> SourceKind {
        self.source
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Value at 1-based `rank`.
    pub fn value(&self, rank: usize) -> Option<f64> {
        rank.checked_sub(1).and_then(|i| self.values.get(i).copied())
    }

    /// `(rank, value)` rows.
    pub fn rows(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        self.values.iter().enumerate().map(|(i, &v)| (i + 1, v))
    }

    /// CSV with columns `rank,log10_rank,log10_value`.
    pub fn write_csv<W: Write>(&self, mut w: W, meta: &Meta) -> io::Result<()> {
        meta.clone().with("source", self.source.name()).write_header(&mut w)?;
        writeln!(w, "rank,log10_rank,log10_value")?;
        for (r, v) in self.rows() {
            writeln!(w, "{},{},{}", r, (r as f64).log10(), v.log10())?;
        }
        Ok(())
    }
}

/// How ranks are weighted in the log-log regression.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum FitWeighting {
    /// Each rank weighted by the width it covers on the log axis,
    /// `log10(r + 1/2) - log10(r - 1/2)`, so every decade counts equally.
    #[default]
    LogUniform,
    /// Every rank weighted equally.
    PerRank,
}

/// Least-squares line `log10(value) = intercept + slope * log10(rank)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TailFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub fit_range: (usize, usize),
    pub weighting: FitWeighting,
}

/// Log-uniform weighted fit over ranks `lo..=hi`.
pub fn fit_tail_slope(table: &RankFrequencyTable, lo: usize, hi: usize) -> Result<TailFit> {
    fit_tail_slope_weighted(table, lo, hi, FitWeighting::default())
}

pub fn fit_tail_slope_weighted(
    table: &RankFrequencyTable,
    lo: usize,
    hi: usize,
    weighting: FitWeighting,
) -> Result<TailFit> {
    if lo < 1 || hi > table.len() || hi < lo + MIN_FIT_SPAN {
        return Err(Error::InvalidArgument(format!(
            "fit range [{lo}, {hi}] invalid for a table of {} rows (need 1 <= lo, hi - lo >= {MIN_FIT_SPAN})",
            table.len()
        )));
    }
    let points: Vec<(f64, f64, f64)> = (lo..=hi)
        .map(|r| {
            let rf = r as f64;
            let w = match weighting {
                FitWeighting::LogUniform => (rf + 0.5).log10() - (rf - 0.5).log10(),
                FitWeighting::PerRank => 1.0,
            };
            (rf.log10(), table.values[r - 1].log10(), w)
        })
        .collect();
    let sw = compensated_sum(points.iter().map(|p| p.2));
    let mx = compensated_sum(points.iter().map(|p| p.2 * p.0)) / sw;
    let my = compensated_sum(points.iter().map(|p| p.2 * p.1)) / sw;
    let sxx = compensated_sum(points.iter().map(|p| p.2 * (p.0 - mx) * (p.0 - mx)));
    let sxy = compensated_sum(points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)));
    let syy = compensated_sum(points.iter().map(|p| p.2 * (p.1 - my) * (p.1 - my)));
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res = compensated_sum(points.iter().map(|p| {
        let e = p.1 - intercept - slope * p.0;
        p.2 * e * e
    }));
    let r_squared = if syy > 0.0 { 1.0 - ss_res / syy } else { 1.0 };
    Ok(TailFit { slope, intercept, r_squared, fit_range: (lo, hi), weighting })
}

/// Empirical constants of `C1 r^(-β) <= P_r <= C2 r^(-β)` over `r >= r_min`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sandwich {
    pub c1: f64,
    pub c2: f64,
    /// `C2 / C1`; 1 for an exact power law.
    pub ratio: f64,
    pub holds: bool,
}

pub fn sandwich_check(table: &RankFrequencyTable, beta: f64, r_min: usize) -> Sandwich {
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for (r, v) in table.rows().skip(r_min.saturating_sub(1)) {
        let scaled = v.ln() + beta * (r as f64).ln();
        lo = lo.min(scaled);
        hi = hi.max(scaled);
    }
    let (c1, c2) = (lo.exp(), hi.exp());
    let ratio = (hi - lo).exp();
    let holds = lo.is_finite() && hi.is_finite() && c1 > 0.0 && ratio.is_finite();
    Sandwich { c1, c2, ratio, holds }
}

/// Share of the cutoff ensemble's mass held by its `m` most probable words.
pub fn tail_mass(cut: &CutoffEnsemble, m: usize) -> Result<f64> {
    if m > cut.len() {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds ensemble size {}", cut.len())));
    }
    let sorted = cut.sorted_desc();
    let max = sorted[0];
    let weights: Vec<f64> = sorted.iter().map(|l| (l - max).exp()).collect();
    let top = compensated_sum(weights[..m].iter().copied());
    let all = compensated_sum(weights.iter().copied());
    Ok(top / all)
}

/// Census of one word length in a cutoff ensemble, with the values the
/// geometric length law predicts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LengthCensus {
    pub length: usize,
    pub count: u64,
    /// `K^i`
    pub expected_count: u64,
    pub mass: f64,
    /// `(1 - s)^i s`
    pub expected_mass: f64,
    pub mean_prob: f64,
    /// `((1 - s)/K)^i s`
    pub expected_mean_prob: f64,
}

pub fn length_law_check(cut: &CutoffEnsemble) -> Vec<LengthCensus> {
    let kb = cut.keyboard();
    let (k, s) = (kb.size(), kb.space());
    (0..=cut.n())
        .map(|i| {
            let level = cut.level(i);
            let mass = compensated_sum(level.iter().map(|l| l.exp()));
            LengthCensus {
                length: i,
                count: level.len() as u64,
                expected_count: (k as u64).pow(i as u32),
                mass,
                expected_mass: (1.0 - s).powi(i as i32) * s,
                mean_prob: mass / level.len() as f64,
                expected_mean_prob: ((1.0 - s) / k as f64).powi(i as i32) * s,
            }
        })
        .collect()
}

/// CSV with columns `length,count,mass,mean_prob`.
pub fn write_length_census<W: Write>(census: &[LengthCensus], mut w: W, meta: &Meta) -> io::Result<()> {
    meta.write_header(&mut w)?;
    writeln!(w, "length,count,mass,mean_prob")?;
    for c in census {
        writeln!(w, "{},{},{},{}", c.length, c.count, c.mass, c.mean_prob)?;
    }
    Ok(())
}
