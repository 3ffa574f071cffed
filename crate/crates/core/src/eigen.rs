//! Closed-form eigen-decomposition of symmetric 3×3 matrices.
//!
//! Eigenvalues come from the trigonometric solution of the characteristic
//! cubic followed by one Newton step each. The eigenvector of the best
//! separated eigenvalue is taken from a cross product of rows of `A - λI`;
//! the remaining pair is obtained from a 2×2 Jacobi rotation inside the
//! orthogonal complement, which stays accurate for close eigenvalues.

use nalgebra::{Matrix3, Vector3};
use std::f64::consts::PI;

/// Eigenvalues sorted in descending order.
pub fn sym3_eigenvalues(a: &Matrix3<f64>) -> [f64; 3] {
    let scale = a.abs().max();
    if scale == 0.0 {
        return [0.0; 3];
    }
    let b = a / scale;
    let mut lam = trig_eigenvalues(&b);
    for l in lam.iter_mut() {
        *l = newton_polish(&b, *l);
    }
    lam.sort_by(|x, y| y.total_cmp(x));
    lam.map(|l| l * scale)
}

fn trig_eigenvalues(a: &Matrix3<f64>) -> [f64; 3] {
    let off = a[(0, 1)].powi(2) + a[(0, 2)].powi(2) + a[(1, 2)].powi(2);
    let q = a.trace() / 3.0;
    let p2 =
        (a[(0, 0)] - q).powi(2) + (a[(1, 1)] - q).powi(2) + (a[(2, 2)] - q).powi(2) + 2.0 * off;
    let p = (p2 / 6.0).sqrt();
    if p <= f64::EPSILON * 1e-3 {
        return [q, q, q];
    }
    let b = (a - Matrix3::identity() * q) / p;
    let r = (b.determinant() / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let l1 = q + 2.0 * p * phi.cos();
    let l3 = q + 2.0 * p * (phi + 2.0 * PI / 3.0).cos();
    let l2 = 3.0 * q - l1 - l3;
    [l1, l2, l3]
}

/// One Newton step on `det(A - λI)`, kept only if it lowers the residual.
fn newton_polish(a: &Matrix3<f64>, lam: f64) -> f64 {
    let tr = a.trace();
    let minors = a[(0, 0)] * a[(1, 1)] - a[(0, 1)] * a[(1, 0)] + a[(0, 0)] * a[(2, 2)]
        - a[(0, 2)] * a[(2, 0)]
        + a[(1, 1)] * a[(2, 2)]
        - a[(1, 2)] * a[(2, 1)];
    let det = a.determinant();
    let poly = |x: f64| ((-x + tr) * x - minors) * x + det;
    let dpoly = |x: f64| (-3.0 * x + 2.0 * tr) * x - minors;
    let d = dpoly(lam);
    if d.abs() < 1e-8 {
        return lam;
    }
    let next = lam - poly(lam) / d;
    if next.is_finite() && poly(next).abs() < poly(lam).abs() {
        next
    } else {
        lam
    }
}

/// Eigenvalues (descending) and a matching orthonormal eigenvector matrix.
///
/// The analytic eigenvalues only select the isolated eigenvector; the values
/// returned are the Rayleigh quotients of the final vectors, which keeps
/// clustered and vanishing eigenvalues accurate to rounding. The columns are
/// not yet sign-normalized and may form a left-handed frame.
pub fn sym3_eigen(a: &Matrix3<f64>) -> ([f64; 3], Matrix3<f64>) {
    let scale = a.abs().max();
    if a[(0, 1)] == 0.0 && a[(0, 2)] == 0.0 && a[(1, 2)] == 0.0 {
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
        let cols = idx.map(|i| Vector3::ith(i, 1.0));
        return (idx.map(|i| a[(i, i)]), Matrix3::from_columns(&cols));
    }
    let lam = sym3_eigenvalues(a);
    if lam[0] - lam[2] <= 1e-15 * scale {
        return (lam, Matrix3::identity());
    }
    let isolated = if lam[0] - lam[1] >= lam[1] - lam[2] {
        0
    } else {
        2
    };
    let v = rayleigh_polish(a, null_vector(&(a - Matrix3::identity() * lam[isolated])));
    let (u, w) = complement_basis(&v);
    let (big, small) = jacobi_pair(a, &u, &w);
    let mut pairs: Vec<(f64, Vector3<f64>)> = [v, big, small]
        .into_iter()
        .map(|c| (c.dot(&(a * c)), c))
        .collect();
    pairs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let cols = [pairs[0].1, pairs[1].1, pairs[2].1];
    (
        [pairs[0].0, pairs[1].0, pairs[2].0],
        Matrix3::from_columns(&cols),
    )
}

/// Unit vector in the (numerical) null space of a rank-2 matrix.
fn null_vector(m: &Matrix3<f64>) -> Vector3<f64> {
    let rows = [
        m.row(0).transpose().into_owned(),
        m.row(1).transpose().into_owned(),
        m.row(2).transpose().into_owned(),
    ];
    let cands = [
        rows[0].cross(&rows[1]),
        rows[0].cross(&rows[2]),
        rows[1].cross(&rows[2]),
    ];
    let best = cands
        .iter()
        .max_by(|a, b| a.norm_squared().total_cmp(&b.norm_squared()))
        .copied()
        .unwrap_or_else(Vector3::x);
    if best.norm_squared() > 0.0 {
        best.normalize()
    } else {
        Vector3::x()
    }
}

/// Two steps of Rayleigh-quotient inverse iteration. The trigonometric
/// eigenvalue can be off by `√ε` times the spread of a tight spectrum, which
/// the cross product turns into an eigenvector error of the same order.
fn rayleigh_polish(a: &Matrix3<f64>, mut v: Vector3<f64>) -> Vector3<f64> {
    for _ in 0..2 {
        let mu = v.dot(&(a * v));
        match (a - Matrix3::identity() * mu).lu().solve(&v) {
            Some(x) if x.iter().all(|c| c.is_finite()) && x.norm_squared() > 0.0 => {
                v = x.normalize()
            }
            _ => break,
        }
    }
    v
}

/// Orthonormal pair spanning the plane orthogonal to a unit vector.
pub(crate) fn complement_basis(v: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if v.x.abs() <= v.y.abs() && v.x.abs() <= v.z.abs() {
        Vector3::x()
    } else if v.y.abs() <= v.z.abs() {
        Vector3::y()
    } else {
        Vector3::z()
    };
    let u = (helper - v * v.dot(&helper)).normalize();
    let w = v.cross(&u);
    (u, w)
}

/// Diagonalizes the restriction of `a` to span(u, w); larger eigenvalue first.
fn jacobi_pair(
    a: &Matrix3<f64>,
    u: &Vector3<f64>,
    w: &Vector3<f64>,
) -> (Vector3<f64>, Vector3<f64>) {
    let auu = u.dot(&(a * u));
    let aww = w.dot(&(a * w));
    let auw = u.dot(&(a * w));
    let theta = 0.5 * (2.0 * auw).atan2(auu - aww);
    let (s, c) = theta.sin_cos();
    let big = u * c + w * s;
    let small = -u * s + w * c;
    (big, small)
}
