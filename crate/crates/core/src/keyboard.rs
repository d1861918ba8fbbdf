//! Keyboards and their exponent.
//!
//! The ranked word probabilities of a keyboard behave like `r^(-β)` where
//! `β > 1` is the unique root of `Σ q_i^(1/β) = 1`. The solver works in
//! `t = 1/β`: `g(t) = Σ q_i^t` is strictly decreasing with `g(0) = K > 1` and
//! `g(1) = 1 - s < 1`, so `(0, 1)` always brackets the root.

use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::numeric::compensated_sum;
use crate::spacings::Spacings;

/// Tolerance on `Σ q_i + s = 1`.
pub const SUM_TOLERANCE: f64 = 1e-12;

/// Default tolerance on the exponent equation residual.
pub const DEFAULT_BETA_TOLERANCE: f64 = 1e-12;

const MAX_BISECTIONS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct Keyboard {
    letters: Vec<f64>,
    space: f64,
}

impl Keyboard {
    pub fn new(letters: Vec<f64>, space: f64) -> Result<Self> {
        if letters.len() < 2 {
            return Err(Error::InvalidKeyboard(format!("need at least 2 letters, got {}", letters.len())));
        }
        if !(space > 0.0 && space < 1.0) {
            return Err(Error::InvalidKeyboard(format!("space probability {space} outside (0, 1)")));
        }
        if let Some((i, q)) = letters.iter().enumerate().find(|(_, q)| !(**q > 0.0 && q.is_finite())) {
            return Err(Error::InvalidKeyboard(format!("letter {} has probability {q}", i + 1)));
        }
        let total = compensated_sum(letters.iter().copied()) + space;
        if (total - 1.0).abs() > SUM_TOLERANCE {
            return Err(Error::InvalidKeyboard(format!("probabilities sum to {total}, not 1")));
        }
        Ok(Keyboard { letters, space })
    }

    /// Miller's keyboard: `K` letters of probability `(1 - s)/K` each.
    pub fn equal(k: usize, space: f64) -> Result<Self> {
        if !(space > 0.0 && space < 1.0) {
            return Err(Error::InvalidKeyboard(format!("space probability {space} outside (0, 1)")));
        }
        Keyboard::new(vec![(1.0 - space) / k as f64; k], space)
    }

    pub fn letters(&self) -> &[f64] {
        &self.letters
    }

    pub fn space(&self) -> f64 {
        self.space
    }

    /// Alphabet size `K`.
    pub fn size(&self) -> usize {
        self.letters.len()
    }

    pub fn log_letters(&self) -> Vec<f64> {
        self.letters.iter().map(|q| q.ln()).collect()
    }

    /// True when all letter probabilities are identical.
    pub fn is_equal(&self) -> bool {
        self.letters.iter().all(|&q| q == self.letters[0])
    }

    /// Short hex digest of the exact bit patterns of `s` and every `q_i`.
    pub fn fingerprint(&self) -> String {
        let mut h = Sha256::new();
        h.update((self.letters.len() as u64).to_le_bytes());
        h.update(self.space.to_bits().to_le_bytes());
        for q in &self.letters {
            h.update(q.to_bits().to_le_bytes());
        }
        h.finalize()[..8].iter().fold(String::with_capacity(16), |mut s, b| {
            let _ = write!(s, "{b:02x}");
            s
        })
    }

    /// Text form: a `s=<value>` header line, then one letter probability per line.
    ///
    /// Values use the shortest representation that parses back to the same
    /// `f64`, so `parse(to_text())` is bit-exact.
    pub fn to_text(&self) -> String {
        let mut out = format!("s={}\n", self.space);
        for q in &self.letters {
            let _ = writeln!(out, "{q}");
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (hline, header) = lines.next().ok_or(Error::Parse { line: 1, message: "empty keyboard file".into() })?;
        let space = header
            .trim()
            .strip_prefix("s=")
            .ok_or(Error::Parse { line: hline + 1, message: "expected `s=<value>` header".into() })?
            .trim()
            .parse::<f64>()
            .map_err(|e| Error::Parse { line: hline + 1, message: e.to_string() })?;
        let letters = lines
            .map(|(i, l)| l.trim().parse::<f64>().map_err(|e| Error::Parse { line: i + 1, message: e.to_string() }))
            .collect::<Result<Vec<_>>>()?;
        Keyboard::new(letters, space)
    }
}

/// `q_i = (1 - s) D_i`.
pub fn make_keyboard(spacings: &Spacings, space: f64) -> Result<Keyboard> {
    if !(space > 0.0 && space < 1.0) {
        return Err(Error::InvalidKeyboard(format!("space probability {space} outside (0, 1)")));
    }
    let letters = spacings.values().iter().map(|d| (1.0 - space) * d).collect();
    Keyboard::new(letters, space)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ExponentResult {
    pub beta: f64,
    /// `Σ q_i^(1/β) - 1` at the returned `beta`.
    pub residual: f64,
    pub iterations: usize,
}

fn exponent_residual(letters: &[f64], t: f64) -> f64 {
    compensated_sum(letters.iter().map(|q| q.powf(t))) - 1.0
}

/// Solves `Σ q_i^(1/β) = 1` by bisection on `t = 1/β` in `(0, 1)`.
///
/// Bisection runs until the bracket cannot shrink further (or 200 steps);
/// the result is an error if the best residual still exceeds `tol`.
pub fn solve_beta(kb: &Keyboard, tol: f64) -> Result<ExponentResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!("tolerance must be positive, got {tol}")));
    }
    let q = kb.letters();
    // g(lo) > 0 > g(hi)
    let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
    let (mut g_lo, mut g_hi) = (q.len() as f64 - 1.0, exponent_residual(q, 1.0));
    let mut iterations = 0;
    while iterations < MAX_BISECTIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        iterations += 1;
        let g = exponent_residual(q, mid);
        if g == 0.0 {
            return Ok(ExponentResult { beta: 1.0 / mid, residual: 0.0, iterations });
        }
        if g > 0.0 {
            lo = mid;
            g_lo = g;
        } else {
            hi = mid;
            g_hi = g;
        }
    }
    let (t, residual) = if g_lo.abs() <= g_hi.abs() { (lo, g_lo) } else { (hi, g_hi) };
    if residual.abs() > tol || t <= 0.0 {
        return Err(Error::NoConvergence { iterations, residual });
    }
    Ok(ExponentResult { beta: 1.0 / t, residual, iterations })
}

/// Closed form for the equal-letter keyboard: `β = 1 - ln(1 - s)/ln K`.
pub fn miller_beta(k: usize, space: f64) -> Result<f64> {
    if k < 2 {
        return Err(Error::InvalidArgument(format!("alphabet size must be at least 2, got {k}")));
    }
    if !(space > 0.0 && space < 1.0) {
        return Err(Error::InvalidArgument(format!("space probability {space} outside (0, 1)")));
    }
    Ok(1.0 - (1.0 - space).ln() / (k as f64).ln())
}

/// Closed form for the two-letter keyboard with `q_2 = q_1^2`:
/// `β = ln q_1 / ln((√5 - 1)/2)`. Requires `0 < q_1 < (√5 - 1)/2`.
pub fn fibonacci_beta(q1: f64) -> Result<f64> {
    let golden = (5f64.sqrt() - 1.0) / 2.0;
    if !(q1 > 0.0 && q1 < golden) {
        return Err(Error::InvalidArgument(format!("q1 = {q1} outside (0, {golden})")));
    }
    Ok(q1.ln() / golden.ln())
}

/// `m̄_K = Σ log_K q_i / K`.
pub fn mean_log_letter(kb: &Keyboard) -> f64 {
    let k = kb.size() as f64;
    compensated_sum(kb.letters().iter().map(|q| q.ln())) / (k * k.ln())
}

/// Mean and population variance of `ln q_i` under the counting measure.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LogMoments {
    pub mu1: f64,
    pub sigma1_sq: f64,
}

pub fn log_moments(kb: &Keyboard) -> LogMoments {
    let k = kb.size() as f64;
    let logs = kb.log_letters();
    let mu1 = compensated_sum(logs.iter().copied()) / k;
    let sigma1_sq = compensated_sum(logs.iter().map(|l| (l - mu1) * (l - mu1))) / k;
    LogMoments { mu1, sigma1_sq }
}

/// `(1/K) Σ ln(K D_i)`; tends to `H(h) - γ` for spacings drawn from density `h`.
pub fn shao_hahn_statistic(spacings: &Spacings) -> f64 {
    let k = spacings.len() as f64;
    compensated_sum(spacings.values().iter().map(|d| (k * d).ln())) / k
}
