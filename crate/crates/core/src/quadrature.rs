//! Quadrature rules on `[-1, 1]`.

use nalgebra::{DMatrix, SymmetricEigen};
use statrs::function::gamma::ln_gamma;

/// Nodes and weights of a Gauss rule.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }
}

/// Gauss–Jacobi rule for the weight `(1-x)^alpha (1+x)^beta`, computed with
/// the Golub–Welsch eigenvalue method.
///
/// With `normalized` the weights sum to one, i.e. the rule integrates against
/// the probability density proportional to the weight.
pub fn gauss_jacobi(n: usize, alpha: f64, beta: f64, normalized: bool) -> GaussRule {
    assert!(n >= 1, "a Gauss rule needs at least one node");
    assert!(
        alpha > -1.0 && beta > -1.0,
        "Jacobi exponents must exceed -1"
    );
    let ab = alpha + beta;
    let mut jac = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        let kf = k as f64;
        jac[(k, k)] = if k == 0 {
            (beta - alpha) / (ab + 2.0)
        } else {
            (beta * beta - alpha * alpha) / ((2.0 * kf + ab) * (2.0 * kf + ab + 2.0))
        };
        if k + 1 < n {
            let m = kf + 1.0;
            let b = if k == 0 {
                4.0 * (1.0 + alpha) * (1.0 + beta) / ((2.0 + ab).powi(2) * (3.0 + ab))
            } else {
                let s = 2.0 * m + ab;
                4.0 * m * (m + alpha) * (m + beta) * (m + ab) / (s * s * (s + 1.0) * (s - 1.0))
            };
            let off = b.sqrt();
            jac[(k, k + 1)] = off;
            jac[(k + 1, k)] = off;
        }
    }
    let eig = SymmetricEigen::new(jac);
    let mass = if normalized {
        1.0
    } else {
        ((ab + 1.0) * std::f64::consts::LN_2 + ln_gamma(alpha + 1.0) + ln_gamma(beta + 1.0)
            - ln_gamma(ab + 2.0))
        .exp()
    };
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|i| (eig.eigenvalues[i], mass * eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    GaussRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
    }
}

pub fn gauss_legendre(n: usize) -> GaussRule {
    gauss_jacobi(n, 0.0, 0.0, false)
}

/// Double-exponential (tanh-sinh) quadrature over `[-1, 1]`.
///
/// The integrand receives `(x, 1 + x, 1 - x)` with the last two computed
/// without cancellation, so integrable endpoint singularities can be
/// evaluated accurately. Step halving continues until two successive levels
/// agree to `tol` (relative) or `max_level` is reached.
pub fn tanh_sinh(f: impl Fn(f64, f64, f64) -> f64, tol: f64, max_level: u32) -> f64 {
    use std::f64::consts::FRAC_PI_2;
    let t_max = 6.5;
    let eval = |t: f64| -> f64 {
        let u = FRAC_PI_2 * t.sinh();
        let x = u.tanh();
        let one_plus = 2.0 / (1.0 + (-2.0 * u).exp());
        let one_minus = 2.0 / (1.0 + (2.0 * u).exp());
        let w = FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
        if w == 0.0 || one_plus == 0.0 || one_minus == 0.0 {
            return 0.0;
        }
        let v = w * f(x, one_plus, one_minus);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    let mut h = 0.5;
    let mut sum = eval(0.0);
    let mut k = 1;
    while k as f64 * h <= t_max {
        sum += eval(k as f64 * h) + eval(-(k as f64) * h);
        k += 1;
    }
    let mut estimate = sum * h;
    for _ in 0..max_level {
        h *= 0.5;
        let mut k = 1;
        while k as f64 * h <= t_max {
            sum += eval(k as f64 * h) + eval(-(k as f64) * h);
            k += 2;
        }
        let next = sum * h;
        let done = (next - estimate).abs() <= tol * next.abs().max(1e-300);
        estimate = next;
        if done {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_integrates_polynomials() {
        let r = gauss_legendre(8);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 2.0, epsilon = 1e-14);
        assert_relative_eq!(r.integrate(|x| x.powi(14)), 2.0 / 15.0, epsilon = 1e-14);
        assert!(r.integrate(|x| x.powi(7)).abs() < 1e-15);
    }

    #[test]
    fn legendre_three_point_nodes() {
        let r = gauss_legendre(3);
        assert_relative_eq!(r.nodes[2], (0.6f64).sqrt(), epsilon = 1e-15);
        assert_relative_eq!(r.weights[1], 8.0 / 9.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_weight_mass() {
        // ∫ (1-x)^a (1+x)^b = 2^{a+b+1} B(a+1, b+1)
        let r = gauss_jacobi(5, 0.5, -0.5, false);
        assert_relative_eq!(
            r.weights.iter().sum::<f64>(),
            std::f64::consts::PI,
            epsilon = 1e-13
        );
        let r = gauss_jacobi(5, 0.5, -0.5, true);
        assert_relative_eq!(r.weights.iter().sum::<f64>(), 1.0, epsilon = 1e-14);
    }

    #[test]
    fn jacobi_chebyshev_moments() {
        // a = b = -1/2 gives the Chebyshev weight; ∫ x² / sqrt(1 - x²) = π/2
        let r = gauss_jacobi(6, -0.5, -0.5, false);
        assert_relative_eq!(
            r.integrate(|x| x * x),
            std::f64::consts::FRAC_PI_2,
            epsilon = 1e-14
        );
    }

    #[test]
    fn tanh_sinh_handles_endpoint_singularity() {
        let v = tanh_sinh(|_, p, _| p.powf(-0.5), 1e-14, 12);
        assert_relative_eq!(v, 2.0 * 2f64.sqrt(), epsilon = 1e-12);
        let v = tanh_sinh(|x, _, _| x * x, 1e-14, 12);
        assert_relative_eq!(v, 2.0 / 3.0, epsilon = 1e-13);
    }
}
