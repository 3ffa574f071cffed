//! The three-term axisymmetric ansatz `Σ (w_i / 2π) f(Ω·R_i)` and its moments.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

use crate::beta::{beta_moment, beta_pdf, BetaShape, Branch};
use crate::eigen::complement_basis;
use crate::error::{ClosureError, Result};
use crate::moments::{build_moments, MomentState};
use crate::quadrature::gauss_jacobi;
use crate::tensor::ThirdMoments;

/// Default number of polar nodes for [`spherical_moments_quadrature`].
pub const DEFAULT_QUAD_ORDER: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzTerm {
    pub weight: f64,
    pub axis: Vector3<f64>,
    pub shape: BetaShape,
}

impl AnsatzTerm {
    pub fn new(weight: f64, axis: Vector3<f64>, shape: BetaShape) -> Result<Self> {
        if (axis.norm() - 1.0).abs() > 1e-12 {
            return Err(ClosureError::DomainError(format!(
                "ansatz axis is not a unit vector: {axis:?}"
            )));
        }
        if weight < -1e-14 || !weight.is_finite() {
            return Err(ClosureError::DomainError(format!(
                "ansatz weight must be non-negative, got {weight}"
            )));
        }
        Ok(AnsatzTerm {
            weight: weight.max(0.0),
            axis,
            shape,
        })
    }
}

/// Pointwise value of the ansatz in direction `omega`.
///
/// Terms with zero weight are skipped; any other Dirac term makes the value
/// undefined.
pub fn eval_ansatz(omega: &Vector3<f64>, terms: &[AnsatzTerm]) -> Result<f64> {
    let mut sum = 0.0;
    for t in terms.iter().filter(|t| t.weight != 0.0) {
        let mu = omega.dot(&t.axis).clamp(-1.0, 1.0);
        sum += t.weight / (2.0 * PI) * beta_pdf(mu, &t.shape)?;
    }
    Ok(sum)
}

/// Moments of an ansatz up to third order.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnsatzMoments {
    pub e0: f64,
    pub e1: Vector3<f64>,
    pub e2: Matrix3<f64>,
    pub e3: ThirdMoments,
}

impl AnsatzMoments {
    pub fn to_state(&self) -> Result<MomentState> {
        build_moments(self.e0, self.e1, self.e2)
    }
}

/// Moments assembled term by term from the closed-form 1D beta moments.
///
/// Around its own axis `R` a term contributes `w m2` to `RRᵀ`, `w(1 - m2)/2`
/// to each transverse direction, `w m3` to `R⊗R⊗R`, `w(m1 - m3)/2` to every
/// (transverse, transverse, axial) pair; all entries odd in a transverse
/// direction vanish.
pub fn spherical_moments(terms: &[AnsatzTerm]) -> Result<AnsatzMoments> {
    let mut out = AnsatzMoments {
        e0: 0.0,
        e1: Vector3::zeros(),
        e2: Matrix3::zeros(),
        e3: ThirdMoments::zeros(),
    };
    for t in terms {
        let w = t.weight;
        let r = t.axis;
        let m1 = beta_moment(1, &t.shape)?;
        let m2 = beta_moment(2, &t.shape)?;
        let m3 = beta_moment(3, &t.shape)?;
        let rr = r * r.transpose();
        let transverse = Matrix3::identity() - rr;
        out.e0 += w;
        out.e1 += r * (w * m1);
        out.e2 += rr * (w * m2) + transverse * (0.5 * w * (1.0 - m2));
        out.e3.add_sym_outer(w * m3, &r, &r, &r);
        // sym(P ⊗ R) summed over an orthonormal transverse pair (u, v)
        let (u, v) = complement_basis(&r);
        let c = 0.5 * w * (m1 - m3) * 3.0;
        out.e3.add_sym_outer(c, &u, &u, &r);
        out.e3.add_sym_outer(c, &v, &v, &r);
    }
    Ok(out)
}

/// Moments by direct quadrature over the sphere, each term in its own polar
/// frame.
///
/// The polar direction uses an `order`-point Gauss–Jacobi rule matched to the
/// term's beta exponents (Dirac terms use their point masses), the azimuth a
/// uniform `2 * order`-point rule.
pub fn spherical_moments_quadrature(terms: &[AnsatzTerm], order: usize) -> Result<AnsatzMoments> {
    let order = order.max(2);
    let mut out = AnsatzMoments {
        e0: 0.0,
        e1: Vector3::zeros(),
        e2: Matrix3::zeros(),
        e3: ThirdMoments::zeros(),
    };
    let n_phi = 2 * order;
    for t in terms.iter().filter(|t| t.weight != 0.0) {
        let polar: Vec<(f64, f64)> = match t.shape.branch {
            Branch::Smooth => {
                let (xi, eta) = t.shape.exponents();
                let rule = gauss_jacobi(order, eta - 1.0, xi - 1.0, true);
                rule.nodes.into_iter().zip(rule.weights).collect()
            }
            Branch::DiracSingle { mu } => vec![(mu, 1.0)],
            Branch::DiracPair { weight_plus } => {
                vec![(1.0, weight_plus), (-1.0, 1.0 - weight_plus)]
            }
        };
        let r = t.axis;
        let (u, v) = complement_basis(&r);
        for &(mu, wq) in &polar {
            let s = (1.0 - mu * mu).max(0.0).sqrt();
            for j in 0..n_phi {
                let phi = 2.0 * PI * (j as f64 + 0.5) / n_phi as f64;
                let omega = r * mu + (u * phi.cos() + v * phi.sin()) * s;
                let weight = t.weight * wq / n_phi as f64;
                out.e0 += weight;
                out.e1 += omega * weight;
                out.e2 += omega * omega.transpose() * weight;
                out.e3.add_sym_outer(weight, &omega, &omega, &omega);
            }
        }
    }
    Ok(out)
}
