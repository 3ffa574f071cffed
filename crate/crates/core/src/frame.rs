//! Eigenframe of the second moment and the realizability test built on it.

use nalgebra::{Matrix3, Vector3};

use crate::eigen::{complement_basis, sym3_eigen};
use crate::error::{ClosureError, Result};
use crate::moments::MomentState;

/// Relative eigenvalue gap below which eigenvalues are treated as equal.
pub const DEGENERACY_TOL: f64 = 1e-9;
/// Relative size of a negative eigenvalue that is clamped to zero.
pub const NEG_EIGEN_TOL: f64 = 1e-14;
/// Relative size of a first-moment component treated as zero.
pub const FLUX_ZERO_TOL: f64 = 1e-12;

/// Eigenvalues (descending), right-handed eigenvectors and rotated first moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureFrame {
    pub lambda: [f64; 3],
    /// Columns are the eigen-axes `R1, R2, R3`; `det = +1`.
    pub rot: Matrix3<f64>,
    /// `f[i] = e1 · R_i`.
    pub f: [f64; 3],
}

impl ClosureFrame {
    pub fn axis(&self, i: usize) -> Vector3<f64> {
        self.rot.column(i).into_owned()
    }
}

/// Builds the eigenframe of `m.e2` with the deterministic basis conventions.
///
/// Inside a cluster of eigenvalues closer than `1e-9 * e0` the basis is turned
/// so that its first vector follows the projection of `e1` on the cluster;
/// when that projection vanishes the lab axis with the largest overlap (lowest
/// index on ties) is used instead, and the rule is repeated on what remains.
/// If the projection exceeds the cluster eigenvalue, aligning with it would
/// leave no realizable 1D problem on that axis, so the basis is chosen to
/// split it equally over the cluster instead (crossing beams stay on their
/// own axes).
/// Clustered eigenvalues are replaced by their mean. Each column then gets a
/// positive largest-magnitude component, and the last column is flipped if
/// needed to make the frame right-handed.
pub fn eigenframe(m: &MomentState) -> ClosureFrame {
    let e0 = m.e0();
    let e1 = m.e1();
    let (mut lambda, vecs) = sym3_eigen(m.e2());
    let mut cols = [
        vecs.column(0).into_owned(),
        vecs.column(1).into_owned(),
        vecs.column(2).into_owned(),
    ];

    let mut start = 0;
    while start < 3 {
        let mut end = start + 1;
        while end < 3 && lambda[end - 1] - lambda[end] < DEGENERACY_TOL * e0 {
            end += 1;
        }
        if end - start > 1 {
            let mean = lambda[start..end].iter().sum::<f64>() / (end - start) as f64;
            let oriented = orient_cluster(&cols[start..end], e1, e0, mean);
            cols[start..end].copy_from_slice(&oriented);
            lambda[start..end].iter_mut().for_each(|l| *l = mean);
        }
        start = end;
    }

    for c in cols.iter_mut() {
        if c[leading_index(c)] < 0.0 {
            *c = -*c;
        }
    }
    let mut rot = Matrix3::from_columns(&cols);
    if rot.determinant() < 0.0 {
        rot.set_column(2, &(-cols[2]));
    }

    for l in lambda.iter_mut() {
        if *l < 0.0 && *l >= -NEG_EIGEN_TOL * e0 {
            *l = 0.0;
        }
    }
    let fv = rot.transpose() * e1;
    ClosureFrame {
        lambda,
        rot,
        f: [fv[0], fv[1], fv[2]],
    }
}

/// Index of the largest-magnitude component, lowest index on near ties.
fn leading_index(c: &Vector3<f64>) -> usize {
    let mut k = 0;
    for j in 1..3 {
        if c[j].abs() > c[k].abs() + 1e-15 {
            k = j;
        }
    }
    k
}

fn orient_cluster(
    basis: &[Vector3<f64>],
    e1: &Vector3<f64>,
    e0: f64,
    lam: f64,
) -> Vec<Vector3<f64>> {
    let proj: Vector3<f64> = basis.iter().map(|s| s * s.dot(e1)).sum();
    let norm = proj.norm();
    if norm > lam + DEGENERACY_TOL * e0 {
        return equal_split(basis, &(proj / norm));
    }
    let mut span: Vec<Vector3<f64>> = basis.to_vec();
    let mut out = Vec::with_capacity(basis.len());
    while span.len() > 1 {
        let proj: Vector3<f64> = span.iter().map(|s| s * s.dot(e1)).sum();
        let dir = if proj.norm() >= FLUX_ZERO_TOL * e0 {
            proj.normalize()
        } else {
            lab_axis_direction(&span)
        };
        span = remove_direction(&span, &dir);
        out.push(dir);
    }
    out.push(span[0]);
    out
}

/// Normalized projection of the lab axis with the largest overlap on `span`
/// (lowest index on ties).
fn lab_axis_direction(span: &[Vector3<f64>]) -> Vector3<f64> {
    let overlaps: Vec<Vector3<f64>> = (0..3)
        .map(|k| span.iter().map(|s| s * s[k]).sum::<Vector3<f64>>())
        .collect();
    let best = overlaps.iter().map(|p| p.norm()).fold(0.0, f64::max);
    let k = (0..3)
        .find(|&k| overlaps[k].norm() >= best - 1e-12)
        .unwrap_or(0);
    overlaps[k].normalize()
}

/// Basis of `span` in which the unit vector `dir` has equal components.
///
/// Used when aligning with the first moment would put more flux on one axis
/// than its eigenvalue allows.
fn equal_split(span: &[Vector3<f64>], dir: &Vector3<f64>) -> Vec<Vector3<f64>> {
    let rest = remove_direction(span, dir);
    if rest.len() == 1 {
        let mut q = rest[0];
        if q[leading_index(&q)] < 0.0 {
            q = -q;
        }
        let s = std::f64::consts::FRAC_1_SQRT_2;
        return vec![(dir + q) * s, (dir - q) * s];
    }
    let u = lab_axis_direction(&rest);
    let v = dir.cross(&u);
    let a = (2.0f64 / 3.0).sqrt();
    (0..3)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * k as f64 / 3.0;
            dir / 3f64.sqrt() + (u * t.cos() + v * t.sin()) * a
        })
        .collect()
}

/// Orthonormal basis of `span ∩ dir⊥`, where `dir` lies in `span`.
fn remove_direction(span: &[Vector3<f64>], dir: &Vector3<f64>) -> Vec<Vector3<f64>> {
    match span.len() {
        3 => {
            let (u, w) = complement_basis(dir);
            vec![u, w]
        }
        _ => {
            let best = span
                .iter()
                .map(|s| s - dir * dir.dot(s))
                .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
                .expect("non-empty span");
            vec![best.normalize()]
        }
    }
}

/// `e0 - Σ f_i² / λ_i`, non-negative exactly for realizable states.
///
/// A term with `λ_i ≈ 0` is dropped when `f_i ≈ 0` too; otherwise the state
/// lies outside the realizable set altogether and an error is returned.
pub fn realizability_margin(m: &MomentState) -> Result<f64> {
    margin_in_frame(&eigenframe(m), m.e0())
}

pub(crate) fn margin_in_frame(frame: &ClosureFrame, e0: f64) -> Result<f64> {
    let mut sum = 0.0;
    for i in 0..3 {
        let (l, f) = (frame.lambda[i], frame.f[i]);
        if l < -NEG_EIGEN_TOL * e0 {
            return Err(ClosureError::NegativeEigenvalue { lambda: l, e0 });
        }
        if l <= NEG_EIGEN_TOL * e0 {
            if f.abs() > FLUX_ZERO_TOL * e0 {
                return Err(ClosureError::BoundaryViolation { axis: i, f });
            }
            continue;
        }
        sum += f * f / l;
    }
    Ok(e0 - sum)
}
