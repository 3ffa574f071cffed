//! Interpolation functions `q, r, h, g` and the `σ, w` assignment.
//!
//! Everything here works in `e0`-normalized units: the eigenvalues `λ̂` sum to
//! one and `|f̂ᵢ| ≤ λ̂ᵢ` inside the box the construction targets.

use crate::error::{ClosureError, Result};

/// `x + y` below which `g` is defined as zero.
pub const VERTEX_TOL: f64 = 1e-13;
/// Slack on `|f| ≤ x` before an input is rejected.
pub const BOX_SLACK: f64 = 1e-12;

/// `f² / x`, taken as zero when both vanish.
fn ratio(f: f64, x: f64) -> f64 {
    if x <= 1e-14 && f.abs() <= BOX_SLACK {
        0.0
    } else {
        f * f / x
    }
}

fn check_box(x: f64, y: f64, fx: f64, fy: f64) -> Result<()> {
    for (v, f) in [(x, fx), (y, fy)] {
        if !(v >= -1e-14) || !(f.abs() <= v + BOX_SLACK) {
            return Err(ClosureError::DomainError(format!(
                "|f| <= x violated: x = {v}, f = {f}"
            )));
        }
    }
    Ok(())
}

pub(crate) fn q_raw(x: f64, y: f64, fx: f64, fy: f64) -> f64 {
    (x - ratio(fx, x)) * (y - ratio(fy, y))
}

pub(crate) fn r_raw(x: f64, y: f64, fx: f64, fy: f64) -> f64 {
    -(1.0 - ratio(fx, x) - ratio(fy, y))
}

pub(crate) fn h_raw(x: f64, y: f64, fx: f64, fy: f64) -> f64 {
    4.0 / 3.0 * q_raw(x, y, fx, fy) * r_raw(x, y, fx, fy)
}

pub(crate) fn g_raw(x: f64, y: f64, fx: f64, fy: f64) -> f64 {
    let s = x + y;
    if s < VERTEX_TOL {
        return 0.0;
    }
    2.0 * q_raw(x, y, fx, fy) * (s - 1.0 - r_raw(x, y, fx, fy)) / (3.0 * s * s)
}

/// `q = (x - fx²/x)(y - fy²/y)`.
pub fn q_func(x: f64, y: f64, fx: f64, fy: f64) -> Result<f64> {
    check_box(x, y, fx, fy)?;
    Ok(q_raw(x, y, fx, fy))
}

/// `r = -(1 - fx²/x - fy²/y)`.
pub fn r_func(x: f64, y: f64, fx: f64, fy: f64) -> Result<f64> {
    check_box(x, y, fx, fy)?;
    Ok(r_raw(x, y, fx, fy))
}

/// `h = (4/3) q r`.
pub fn h_func(x: f64, y: f64, fx: f64, fy: f64) -> Result<f64> {
    check_box(x, y, fx, fy)?;
    Ok(h_raw(x, y, fx, fy))
}

/// `g = 2q(x + y - 1 - r) / (3(x + y)²)`, zero at the vertex `x = y = 0`.
pub fn g_func(x: f64, y: f64, fx: f64, fy: f64) -> Result<f64> {
    check_box(x, y, fx, fy)?;
    Ok(g_raw(x, y, fx, fy))
}

/// Normalized `(σ̂, ŵ)` for eigenvalues `lambda_hat` and flux components `f_hat`.
pub fn sigma_weights(lambda_hat: [f64; 3], f_hat: [f64; 3]) -> Result<([f64; 3], [f64; 3])> {
    let sum: f64 = lambda_hat.iter().sum();
    if (sum - 1.0).abs() > 1e-10 {
        return Err(ClosureError::DomainError(format!(
            "normalized eigenvalues sum to {sum}, not 1"
        )));
    }
    for i in 0..3 {
        check_box(lambda_hat[i], lambda_hat[i], f_hat[i], f_hat[i])?;
    }
    Ok(sigma_weights_raw(lambda_hat, f_hat))
}

/// [`sigma_weights`] without input validation; outside the box the formulas
/// are evaluated as written.
pub(crate) fn sigma_weights_raw(l: [f64; 3], f: [f64; 3]) -> ([f64; 3], [f64; 3]) {
    let g01 = g_raw(l[0], l[1], f[0], f[1]);
    let g02 = g_raw(l[0], l[2], f[0], f[2]);
    let g12 = g_raw(l[1], l[2], f[1], f[2]);
    let sigma = [l[0] - g01 - g02, l[1] - g01 - g12, l[2] - g02 - g12];
    let w = [
        sigma[0] + 2.0 * g12,
        sigma[1] + 2.0 * g02,
        sigma[2] + 2.0 * g01,
    ];
    (sigma, w)
}

/// `3λᵢ² + λᵢ(λⱼ + λₖ) - λⱼλₖ > 0` for every axis.
pub fn sigma_positive(l: [f64; 3]) -> bool {
    (0..3).all(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        3.0 * l[i] * l[i] + l[i] * (l[j] + l[k]) - l[j] * l[k] > 0.0
    })
}

/// `min_i (wᵢσᵢ - fᵢ²)` in normalized units.
pub fn discriminant(sigma: [f64; 3], w: [f64; 3], f: [f64; 3]) -> f64 {
    (0..3)
        .map(|i| w[i] * sigma[i] - f[i] * f[i])
        .fold(f64::INFINITY, f64::min)
}
