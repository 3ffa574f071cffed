//! Known moments of the specific intensity up to second order.
//!
//! A state is stored as `(e0, e1, e2)` with `e2` a full symmetric matrix whose
//! trace equals `e0`. The flat 9-component form follows the basis
//! `[1, Ωx, Ωy, Ωz, Ωx², ΩxΩy, ΩxΩz, Ωy², ΩyΩz]`; the missing `Ωz²` entry is
//! recovered from the trace.

use nalgebra::{Matrix3, Rotation3, Unit, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{ClosureError, Result};

/// Relative trace drift that is silently repaired by [`build_moments`].
pub const TRACE_TOL: f64 = 1e-10;

/// Number of independent scalars in a second-order moment state.
pub const STATE_DIM: usize = 9;

/// Index pairs of the second-moment entries stored in the flat vector.
pub const E2_SLOTS: [(usize, usize); 5] = [(0, 0), (0, 1), (0, 2), (1, 1), (1, 2)];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MomentState {
    e0: f64,
    e1: Vector3<f64>,
    e2: Matrix3<f64>,
}

/// Validates and normalizes a moment triple.
///
/// The second moment is symmetrized by averaging; a trace drift up to
/// `1e-10 * e0` is removed by rescaling the diagonal, anything larger is an
/// error.
pub fn build_moments(e0: f64, e1: Vector3<f64>, e2: Matrix3<f64>) -> Result<MomentState> {
    if !e0.is_finite() || e1.iter().any(|v| !v.is_finite()) || e2.iter().any(|v| !v.is_finite()) {
        return Err(ClosureError::NonFinite);
    }
    if e0 <= 0.0 {
        return Err(ClosureError::NonPositiveEnergy(e0));
    }
    let mut sym = (e2 + e2.transpose()) * 0.5;
    let trace = sym.trace();
    if (trace - e0).abs() > TRACE_TOL * e0 {
        return Err(ClosureError::TraceMismatch { e0, trace });
    }
    if trace != e0 && trace > 0.0 {
        let scale = e0 / trace;
        for i in 0..3 {
            sym[(i, i)] *= scale;
        }
    }
    sym[(2, 2)] = e0 - sym[(0, 0)] - sym[(1, 1)];
    Ok(MomentState { e0, e1, e2: sym })
}

impl MomentState {
    /// Isotropic state `I = e0 / 4π`.
    pub fn equilibrium(e0: f64) -> Self {
        MomentState {
            e0,
            e1: Vector3::zeros(),
            // zz filled from the trace as in build_moments
            e2: Matrix3::from_diagonal(&Vector3::new(e0 / 3.0, e0 / 3.0, e0 - e0 / 3.0 - e0 / 3.0)),
        }
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn e1(&self) -> &Vector3<f64> {
        &self.e1
    }

    pub fn e2(&self) -> &Matrix3<f64> {
        &self.e2
    }

    /// Flat 9-vector in the `[1, Ω, ΩΩ]` ordering.
    pub fn to_vector(&self) -> [f64; STATE_DIM] {
        let mut v = [0.0; STATE_DIM];
        v[0] = self.e0;
        v[1..4].copy_from_slice(self.e1.as_slice());
        for (slot, &(i, j)) in E2_SLOTS.iter().enumerate() {
            v[4 + slot] = self.e2[(i, j)];
        }
        v
    }

    /// Inverse of [`MomentState::to_vector`], with full validation.
    pub fn from_vector(v: &[f64; STATE_DIM]) -> Result<Self> {
        let (e0, e1, e2) = unpack(v);
        build_moments(e0, e1, e2)
    }

    /// Returns a copy scaled so that `e0 = 1`.
    pub fn normalized(&self) -> MomentState {
        MomentState {
            e0: 1.0,
            e1: self.e1 / self.e0,
            e2: self.e2 / self.e0,
        }
    }
}

/// Splits a flat vector into `(e0, e1, e2)` without any validation.
pub(crate) fn unpack(v: &[f64; STATE_DIM]) -> (f64, Vector3<f64>, Matrix3<f64>) {
    let e0 = v[0];
    let e1 = Vector3::new(v[1], v[2], v[3]);
    let mut e2 = Matrix3::zeros();
    for (slot, &(i, j)) in E2_SLOTS.iter().enumerate() {
        e2[(i, j)] = v[4 + slot];
        e2[(j, i)] = v[4 + slot];
    }
    e2[(2, 2)] = e0 - v[4] - v[7];
    (e0, e1, e2)
}

/// A proper rotation of R³ (orthogonal, determinant +1).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rotation {
    matrix: Matrix3<f64>,
}

impl Rotation {
    pub const TOL: f64 = 1e-12;

    pub fn new(matrix: Matrix3<f64>) -> Result<Self> {
        let ortho = (matrix.transpose() * matrix - Matrix3::identity())
            .abs()
            .max();
        let det = matrix.determinant();
        if ortho > Self::TOL || (det - 1.0).abs() > Self::TOL {
            return Err(ClosureError::DomainError(format!(
                "not a proper rotation (orthogonality defect {ortho:e}, det {det})"
            )));
        }
        Ok(Rotation { matrix })
    }

    pub fn identity() -> Self {
        Rotation {
            matrix: Matrix3::identity(),
        }
    }

    pub fn from_axis_angle(axis: &Vector3<f64>, angle: f64) -> Self {
        let r = Rotation3::from_axis_angle(&Unit::new_normalize(*axis), angle);
        Rotation {
            matrix: *r.matrix(),
        }
    }

    /// Some rotation `Q` with `Q n = e_x`.
    pub fn aligning_to_x(n: &Vector3<f64>) -> Self {
        let n = n.normalize();
        let ex = Vector3::x();
        let r = Rotation3::rotation_between(&n, &ex).unwrap_or_else(|| {
            Rotation3::from_axis_angle(&Vector3::z_axis(), std::f64::consts::PI)
        });
        Rotation {
            matrix: *r.matrix(),
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.matrix
    }

    pub fn inverse(&self) -> Self {
        Rotation {
            matrix: self.matrix.transpose(),
        }
    }

    pub fn compose(&self, other: &Rotation) -> Self {
        Rotation {
            matrix: self.matrix * other.matrix,
        }
    }
}

/// Active rotation of a state: `e1 -> Q e1`, `e2 -> Q e2 Qᵀ`.
pub fn rotate_moments(m: &MomentState, rot: &Rotation) -> MomentState {
    let q = rot.matrix();
    let e2 = q * m.e2 * q.transpose();
    let mut e2 = (e2 + e2.transpose()) * 0.5;
    e2[(2, 2)] = m.e0 - e2[(0, 0)] - e2[(1, 1)];
    MomentState {
        e0: m.e0,
        e1: q * m.e1,
        e2,
    }
}

/// The linear map induced by a rotation on flat 9-vectors.
///
/// Any vector of `[1, Ω, ΩΩ]`-type moments transforms this way, including the
/// directional flux vectors, so `rotate_vector(&m.to_vector(), q)` equals
/// `rotate_moments(&m, q).to_vector()` up to rounding.
pub fn rotate_vector(v: &[f64; STATE_DIM], rot: &Rotation) -> [f64; STATE_DIM] {
    let (e0, e1, e2) = unpack(v);
    let q = rot.matrix();
    let e1 = q * e1;
    let e2 = q * e2 * q.transpose();
    let mut out = [0.0; STATE_DIM];
    out[0] = e0;
    out[1..4].copy_from_slice(e1.as_slice());
    for (slot, &(i, j)) in E2_SLOTS.iter().enumerate() {
        out[4 + slot] = 0.5 * (e2[(i, j)] + e2[(j, i)]);
    }
    out
}
