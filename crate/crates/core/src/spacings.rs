//! Random divisions of the unit interval.
//!
//! `K - 1` i.i.d. points drawn from a density `h` on `[0, 1]` cut the interval
//! into `K` spacings. With the points sorted in descending order
//! `X_1 >= X_2 >= ... >= X_{K-1}` the spacings are
//!
//! ```text
//! D_1 = 1 - X_1,   D_i = X_{i-1} - X_i  (2 <= i <= K-1),   D_K = X_{K-1}
//! ```
//!
//! Sampling uses the inverse CDF of each density applied to uniform draws:
//! the triangular density has a closed-form inverse and the Beta(3, 2)
//! density is inverted by bisection on its polynomial CDF `x^3 (4 - 3x)`.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::rng::{substream, SPACINGS_STREAM_BASE};

/// Tolerance on `Σ D_i = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Bracket width at which the Beta(3, 2) inverse CDF stops bisecting.
const BETA_QUANTILE_TOLERANCE: f64 = 1e-12;

/// Draws are retried on a fresh stream when two points coincide.
const MAX_ATTEMPTS: u64 = 64;

#[derive(Clone, Debug, PartialEq)]
pub enum SpacingDistribution {
    /// `h(x) = 1`.
    Uniform,
    /// `h(x) = 12 x^2 (1 - x)`.
    Beta32,
    /// `h(x) = 4x` on `[0, 1/2]`, `4(1 - x)` on `[1/2, 1]`.
    Triangular,
    /// All spacings equal to `1/K` (Miller's keyboard).
    Equal,
    /// A fixed list of spacings.
    Explicit(Vec<f64>),
}

impl SpacingDistribution {
    /// Builds an `Explicit` distribution after validating the list.
    pub fn explicit(values: Vec<f64>) -> Result<Self> {
        validate_spacings(&values)?;
        Ok(SpacingDistribution::Explicit(values))
    }

    pub fn name(&self) -> &'static str {
        match self {
            SpacingDistribution::Uniform => "uniform",
            SpacingDistribution::Beta32 => "beta32",
            SpacingDistribution::Triangular => "triangular",
            SpacingDistribution::Equal => "equal",
            SpacingDistribution::Explicit(_) => "explicit",
        }
    }

    pub fn is_continuous(&self) -> bool {
        matches!(
            self,
            SpacingDistribution::Uniform | SpacingDistribution::Beta32 | SpacingDistribution::Triangular
        )
    }

    fn require_continuous(&self) -> Result<()> {
        if self.is_continuous() {
            Ok(())
        } else {
            Err(Error::NotContinuous { kind: self.name() })
        }
    }

    /// Density `h(x)` on `[0, 1]` (zero outside).
    pub fn density(&self, x: f64) -> Result<f64> {
        self.require_continuous()?;
        if !(0.0..=1.0).contains(&x) {
            return Ok(0.0);
        }
        Ok(match self {
            SpacingDistribution::Uniform => 1.0,
            SpacingDistribution::Beta32 => 12.0 * x * x * (1.0 - x),
            SpacingDistribution::Triangular => {
                if x <= 0.5 {
                    4.0 * x
                } else {
                    4.0 * (1.0 - x)
                }
            }
            _ => unreachable!(),
        })
    }

    pub fn cdf(&self, x: f64) -> Result<f64> {
        self.require_continuous()?;
        let x = x.clamp(0.0, 1.0);
        Ok(match self {
            SpacingDistribution::Uniform => x,
            SpacingDistribution::Beta32 => beta32_cdf(x),
            SpacingDistribution::Triangular => {
                if x <= 0.5 {
                    2.0 * x * x
                } else {
                    1.0 - 2.0 * (1.0 - x) * (1.0 - x)
                }
            }
            _ => unreachable!(),
        })
    }

    /// Inverse CDF, used to turn a uniform draw `u` in `[0, 1)` into a sample.
    pub fn quantile(&self, u: f64) -> Result<f64> {
        self.require_continuous()?;
        if !(0.0..=1.0).contains(&u) {
            return Err(Error::InvalidArgument(format!("quantile level {u} outside [0, 1]")));
        }
        Ok(match self {
            SpacingDistribution::Uniform => u,
            SpacingDistribution::Beta32 => beta32_quantile(u),
            SpacingDistribution::Triangular => {
                if u <= 0.5 {
                    (u / 2.0).sqrt()
                } else {
                    1.0 - ((1.0 - u) / 2.0).sqrt()
                }
            }
            _ => unreachable!(),
        })
    }
}

fn beta32_cdf(x: f64) -> f64 {
    x * x * x * (4.0 - 3.0 * x)
}

/// Bisection on the strictly increasing CDF.
fn beta32_quantile(u: f64) -> f64 {
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    while hi - lo > BETA_QUANTILE_TOLERANCE {
        let mid = 0.5 * (lo + hi);
        if beta32_cdf(mid) < u {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// `count` i.i.d. draws from `dist`, deterministic in `seed`.
pub fn sample_iid(dist: &SpacingDistribution, count: usize, seed: u64) -> Result<Vec<f64>> {
    dist.require_continuous()?;
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    let mut rng = substream(seed, SPACINGS_STREAM_BASE);
    draw_points(dist, count, &mut rng)
}

fn draw_points(dist: &SpacingDistribution, count: usize, rng: &mut ChaCha8Rng) -> Result<Vec<f64>> {
    (0..count).map(|_| dist.quantile(rng.gen::<f64>())).collect()
}

/// The `K` spacings of a random division of `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Spacings {
    values: Vec<f64>,
    seed: u64,
    distribution: SpacingDistribution,
}

impl Spacings {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn distribution(&self) -> &SpacingDistribution {
        &self.distribution
    }
}

/// Draws the spacings for `dist` with `k` parts.
///
/// Continuous kinds draw `k - 1` points on stream `seed`/0; if two points
/// coincide (a zero spacing) the whole draw is repeated on stream 1, 2, ...
pub fn make_spacings(dist: &SpacingDistribution, k: usize, seed: u64) -> Result<Spacings> {
    if k < 2 {
        return Err(Error::InvalidSpacings(format!("need at least 2 spacings, got {k}")));
    }
    let values = match dist {
        SpacingDistribution::Equal => vec![1.0 / k as f64; k],
        SpacingDistribution::Explicit(v) => {
            if v.len() != k {
                return Err(Error::InvalidSpacings(format!(
                    "explicit list has {} values, expected {k}",
                    v.len()
                )));
            }
            v.clone()
        }
        _ => draw_spacings(dist, k, seed)?,
    };
    validate_spacings(&values)?;
    Ok(Spacings { values, seed, distribution: dist.clone() })
}

fn draw_spacings(dist: &SpacingDistribution, k: usize, seed: u64) -> Result<Vec<f64>> {
    for attempt in 0..MAX_ATTEMPTS {
        let mut rng = substream(seed, SPACINGS_STREAM_BASE + attempt);
        let points = draw_points(dist, k - 1, &mut rng)?;
        let gaps = spacings_from_points(&points);
        if gaps.iter().all(|&d| d > 0.0) {
            return Ok(gaps);
        }
    }
    Err(Error::InvalidSpacings(format!(
        "zero spacing in {MAX_ATTEMPTS} consecutive draws for k = {k}"
    )))
}

/// Gaps between `1`, the points sorted descending, and `0`.
pub fn spacings_from_points(points: &[f64]) -> Vec<f64> {
    let mut sorted = points.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut gaps = Vec::with_capacity(sorted.len() + 1);
    let mut upper = 1.0;
    for &x in &sorted {
        gaps.push(upper - x);
        upper = x;
    }
    gaps.push(upper);
    gaps
}

fn validate_spacings(values: &[f64]) -> Result<()> {
    if values.len() < 2 {
        return Err(Error::InvalidSpacings(format!("need at least 2 spacings, got {}", values.len())));
    }
    if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| !(**v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidSpacings(format!("spacing {} is {v}, must be positive", i + 1)));
    }
    let sum = compensated_sum(values.iter().copied());
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(Error::InvalidSpacings(format!("spacings sum to {sum}, not 1")));
    }
    Ok(())
}

/// Reads explicit spacings from a one-column text file body.
///
/// Blank lines and lines starting with `#` are ignored.
pub fn parse_spacings(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let v = line.parse::<f64>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() })?;
        out.push(v);
    }
    Ok(out)
}
