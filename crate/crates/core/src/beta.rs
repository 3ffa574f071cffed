//! Beta kernels on `[-1, 1]` and the 1D moment problem they solve.
//!
//! A kernel is parameterized by its mean position `γ ∈ [0, 1]` and a
//! concentration parameter `δ ≥ 0`, with `ξ = γ/δ` and `η = (1-γ)/δ` the usual
//! beta exponents. The two degenerate limits are kept as explicit branches:
//! `δ → 0` is a single point mass and `δ → ∞` a pair of masses at `±1`.

use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::error::{ClosureError, Result};

/// Smallest `δ` represented by the smooth branch.
pub const DELTA_MIN: f64 = 1e-10;
/// Gap on normalized 1D moments below which a Dirac branch is selected.
pub const BRANCH_GUARD: f64 = 1e-10;
/// Slack allowed on the 1D realizability inequalities.
pub const REALIZABILITY_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Branch {
    Smooth,
    /// All mass at `mu`.
    DiracSingle {
        mu: f64,
    },
    /// Mass `weight_plus` at `+1` and `1 - weight_plus` at `-1`.
    DiracPair {
        weight_plus: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BetaShape {
    pub gamma: f64,
    pub delta: f64,
    pub branch: Branch,
}

impl BetaShape {
    pub fn smooth(gamma: f64, delta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&gamma) || !(delta > DELTA_MIN) || !delta.is_finite() {
            return Err(ClosureError::DomainError(format!(
                "smooth beta shape needs 0 <= gamma <= 1 and delta > {DELTA_MIN}, got ({gamma}, {delta})"
            )));
        }
        Ok(BetaShape {
            gamma,
            delta,
            branch: Branch::Smooth,
        })
    }

    /// The constant density `1/2`.
    pub fn uniform() -> Self {
        BetaShape {
            gamma: 0.5,
            delta: 0.5,
            branch: Branch::Smooth,
        }
    }

    pub fn dirac(mu: f64) -> Self {
        let mu = mu.clamp(-1.0, 1.0);
        BetaShape {
            gamma: 0.5 * (1.0 + mu),
            delta: 0.0,
            branch: Branch::DiracSingle { mu },
        }
    }

    pub fn dirac_pair(weight_plus: f64) -> Self {
        let weight_plus = weight_plus.clamp(0.0, 1.0);
        BetaShape {
            gamma: weight_plus,
            delta: f64::INFINITY,
            branch: Branch::DiracPair { weight_plus },
        }
    }

    pub fn is_smooth(&self) -> bool {
        matches!(self.branch, Branch::Smooth)
    }

    /// Beta exponents `(ξ, η)` of the smooth branch.
    pub fn exponents(&self) -> (f64, f64) {
        (self.gamma / self.delta, (1.0 - self.gamma) / self.delta)
    }
}

/// Density `((1+μ)/2)^(ξ-1) ((1-μ)/2)^(η-1) / (2 B(ξ, η))`.
pub fn beta_pdf(mu: f64, shape: &BetaShape) -> Result<f64> {
    if !shape.is_smooth() {
        return Err(ClosureError::DiracEvaluation);
    }
    if !(-1.0..=1.0).contains(&mu) {
        return Err(ClosureError::DomainError(format!("|mu| > 1: {mu}")));
    }
    let (xi, eta) = shape.exponents();
    Ok(pdf_with(0.5 * (1.0 + mu), 0.5 * (1.0 - mu), xi, eta))
}

/// Density evaluated from `x = (1+μ)/2` and `1 - x` given separately, which
/// avoids cancellation next to the endpoints.
pub(crate) fn pdf_with(x: f64, one_minus_x: f64, xi: f64, eta: f64) -> f64 {
    let ln_b = ln_gamma(xi) + ln_gamma(eta) - ln_gamma(xi + eta);
    let ln_x = if xi == 1.0 { 0.0 } else { (xi - 1.0) * x.ln() };
    let ln_y = if eta == 1.0 {
        0.0
    } else {
        (eta - 1.0) * one_minus_x.ln()
    };
    0.5 * (ln_x + ln_y - ln_b).exp()
}

/// `∫ μ^k f(μ) dμ` for `k = 0..=3`.
pub fn beta_moment(k: u32, shape: &BetaShape) -> Result<f64> {
    if k > 3 {
        return Err(ClosureError::UnsupportedOrder(k));
    }
    let m = match shape.branch {
        Branch::DiracSingle { mu } => mu.powi(k as i32),
        Branch::DiracPair { weight_plus } => {
            if k % 2 == 0 {
                1.0
            } else {
                2.0 * weight_plus - 1.0
            }
        }
        Branch::Smooth => {
            let (g, d) = (shape.gamma, shape.delta);
            let m1 = 2.0 * g - 1.0;
            match k {
                0 => 1.0,
                1 => m1,
                2 => 4.0 * g * (g - 1.0) / (1.0 + d) + 1.0,
                // (ξ-η)(ξ²-2ξη+3ξ+η²+3η+2) / ((ξ+η)(ξ+η+1)(ξ+η+2)) with ξ+η = 1/δ
                _ => m1 * (m1 * m1 + 3.0 * d + 2.0 * d * d) / ((1.0 + d) * (1.0 + 2.0 * d)),
            }
        }
    };
    Ok(m)
}

/// Recovers the kernel with first and second moments `m1`, `m2`.
///
/// `γ = (1 + m1)/2` and `δ = (m2 - m1²)/(1 - m2)`; the Dirac branches are
/// chosen when `m2 - m1²` or `1 - m2` falls below [`BRANCH_GUARD`].
pub fn shape_from_moments(m1: f64, m2: f64) -> Result<BetaShape> {
    if !m1.is_finite()
        || !m2.is_finite()
        || m1 * m1 > m2 + REALIZABILITY_SLACK
        || m2 > 1.0 + REALIZABILITY_SLACK
    {
        return Err(ClosureError::Unrealizable1D { m1, m2 });
    }
    if m2 - m1 * m1 <= BRANCH_GUARD {
        return Ok(BetaShape::dirac(m1));
    }
    if 1.0 - m2 <= BRANCH_GUARD {
        return Ok(BetaShape::dirac_pair(0.5 * (1.0 + m1)));
    }
    let gamma = (0.5 * (1.0 + m1)).clamp(0.0, 1.0);
    let delta = (m2 - m1 * m1) / (1.0 - m2);
    BetaShape::smooth(gamma, delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uniform_density() {
        for mu in [-1.0, -0.3, 0.0, 0.8, 1.0] {
            assert_relative_eq!(
                beta_pdf(mu, &BetaShape::uniform()).unwrap(),
                0.5,
                epsilon = 1e-15
            );
        }
    }

    #[test]
    fn symmetric_beta22_peak() {
        let s = BetaShape::smooth(0.5, 0.25).unwrap();
        assert_relative_eq!(beta_pdf(0.0, &s).unwrap(), 0.75, epsilon = 1e-14);
    }

    #[test]
    fn dirac_branches_have_no_density() {
        assert_eq!(
            beta_pdf(0.0, &BetaShape::dirac_pair(0.5)),
            Err(ClosureError::DiracEvaluation)
        );
        assert_eq!(
            beta_pdf(0.0, &BetaShape::dirac(0.2)),
            Err(ClosureError::DiracEvaluation)
        );
        assert!(matches!(
            beta_pdf(1.5, &BetaShape::uniform()),
            Err(ClosureError::DomainError(_))
        ));
    }

    #[test]
    fn uniform_moments() {
        let u = BetaShape::uniform();
        assert_eq!(beta_moment(0, &u).unwrap(), 1.0);
        assert_eq!(beta_moment(1, &u).unwrap(), 0.0);
        assert_relative_eq!(beta_moment(2, &u).unwrap(), 1.0 / 3.0, epsilon = 1e-15);
        assert_eq!(beta_moment(3, &u).unwrap(), 0.0);
        assert_eq!(beta_moment(4, &u), Err(ClosureError::UnsupportedOrder(4)));
    }

    #[test]
    fn dirac_moments() {
        let d = BetaShape::dirac(-0.4);
        for k in 0..4 {
            assert_relative_eq!(
                beta_moment(k, &d).unwrap(),
                (-0.4f64).powi(k as i32),
                epsilon = 1e-15
            );
        }
        assert_eq!(beta_moment(3, &BetaShape::dirac_pair(0.75)).unwrap(), 0.5);
        assert_eq!(beta_moment(2, &BetaShape::dirac_pair(0.75)).unwrap(), 1.0);
    }

    #[test]
    fn third_moment_matches_exponent_form() {
        for (g, d) in [(0.3, 0.7), (0.9, 0.05), (0.1, 3.0), (0.5, 0.2)] {
            let s = BetaShape::smooth(g, d).unwrap();
            let (xi, eta) = s.exponents();
            let sum = xi + eta;
            let want = (xi - eta)
                * (xi * xi - 2.0 * xi * eta + 3.0 * xi + eta * eta + 3.0 * eta + 2.0)
                / (sum * (sum + 1.0) * (sum + 2.0));
            assert_relative_eq!(beta_moment(3, &s).unwrap(), want, epsilon = 1e-13);
        }
    }

    #[test]
    fn recover_uniform() {
        let s = shape_from_moments(0.0, 1.0 / 3.0).unwrap();
        assert!(s.is_smooth());
        assert_relative_eq!(s.gamma, 0.5, epsilon = 1e-15);
        assert_relative_eq!(s.delta, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn recover_limits() {
        assert_eq!(
            shape_from_moments(1.0, 1.0).unwrap().branch,
            Branch::DiracSingle { mu: 1.0 }
        );
        assert_eq!(
            shape_from_moments(0.0, 1.0).unwrap().branch,
            Branch::DiracPair { weight_plus: 0.5 }
        );
        assert_eq!(
            shape_from_moments(0.3, 0.09).unwrap().branch,
            Branch::DiracSingle { mu: 0.3 }
        );
    }

    #[test]
    fn unrealizable_inputs() {
        assert!(matches!(
            shape_from_moments(0.5, 0.2),
            Err(ClosureError::Unrealizable1D { .. })
        ));
        assert!(matches!(
            shape_from_moments(0.0, 1.1),
            Err(ClosureError::Unrealizable1D { .. })
        ));
    }
}
