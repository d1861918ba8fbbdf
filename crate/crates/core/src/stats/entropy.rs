//! Differential entropy `-∫ h ln h` of the spacing densities.

use crate::error::{Error, Result};
use crate::spacings::SpacingDistribution;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Adaptive Simpson tolerance per panel.
const QUADRATURE_TOLERANCE: f64 = 1e-11;
const MAX_DEPTH: u32 = 50;

/// `-∫_0^1 h(x) ln h(x) dx` by adaptive Simpson quadrature.
///
/// `[0, 1]` is split at `1/2` so the triangular kink sits on a panel edge;
/// `h ln h` is taken as 0 where `h = 0`.
pub fn entropy_oracle(dist: &SpacingDistribution) -> Result<f64> {
    if !dist.is_continuous() {
        return Err(Error::NotContinuous { kind: dist.name() });
    }
    let f = |x: f64| -> f64 {
        let h = dist.density(x).expect("continuous kind");
        if h > 0.0 {
            -h * h.ln()
        } else {
            0.0
        }
    };
    Ok(adaptive_simpson(&f, 0.0, 0.5, QUADRATURE_TOLERANCE) + adaptive_simpson(&f, 0.5, 1.0, QUADRATURE_TOLERANCE))
}

/// Closed-form entropy where one exists.
///
/// Beta(a, b) entropy is `ln B(a,b) - (a-1)(ψ(a) - ψ(a+b)) - (b-1)(ψ(b) - ψ(a+b))`;
/// at integer arguments `ψ(n) = H_{n-1} - γ`.
pub fn closed_form_entropy(dist: &SpacingDistribution) -> Option<f64> {
    match dist {
        SpacingDistribution::Uniform => Some(0.0),
        SpacingDistribution::Triangular => Some(0.5 - std::f64::consts::LN_2),
        SpacingDistribution::Beta32 => {
            let digamma = |n: u32| (1..n).map(|j| 1.0 / j as f64).sum::<f64>() - EULER_GAMMA;
            // B(3, 2) = Γ(3)Γ(2)/Γ(5) = 1/12
            let ln_beta = (1.0f64 / 12.0).ln();
            Some(ln_beta - 2.0 * (digamma(3) - digamma(5)) - (digamma(2) - digamma(5)))
        }
        _ => None,
    }
}

/// Limit of `(1/K) Σ ln(K D_i)`: the entropy minus the Euler constant.
pub fn log_spacing_limit(dist: &SpacingDistribution) -> Result<f64> {
    Ok(entropy_oracle(dist)? - EULER_GAMMA)
}

pub fn euler_gamma() -> f64 {
    EULER_GAMMA
}

fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let m = 0.5 * (a + b);
    let (fa, fm, fb) = (f(a), f(m), f(b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, MAX_DEPTH)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let (lm, rm) = (0.5 * (a + m), 0.5 * (m + b));
    let (flm, frm) = (f(lm), f(rm));
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let delta = left + right - whole;
    if depth == 0 || delta.abs() <= 15.0 * tol {
        return left + right + delta / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}
