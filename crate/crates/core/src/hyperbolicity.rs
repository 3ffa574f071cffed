//! Flux Jacobians and real diagonalizability.

use nalgebra::{Matrix3, SMatrix, Vector3};

use crate::closure::{directional_flux, evaluate_closure, flux_vectors};
use crate::error::{ClosureError, Result};
use crate::interp::sigma_weights_raw;
use crate::moments::{
    build_moments, rotate_moments, rotate_vector, MomentState, Rotation, E2_SLOTS, STATE_DIM,
};
use crate::tensor::ThirdMoments;

pub type Mat9 = SMatrix<f64, STATE_DIM, STATE_DIM>;

/// Default relative threshold for the diagonalizability test.
pub const DIAG_TOL: f64 = 1e-9;
/// Default finite-difference step, relative to `e0`.
pub const FD_STEP: f64 = 1e-6;
/// Smallest normalized eigenvalue accepted by the analytic Jacobian.
pub const INTERIOR_TOL: f64 = 1e-12;

/// State components that are even / odd in `Ω`.
const EVEN: [usize; 6] = [0, 4, 5, 6, 7, 8];
const ODD: [usize; 3] = [1, 2, 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JacobianMatrix {
    pub entries: Mat9,
    pub direction: Vector3<f64>,
    /// Built from the closed-form derivatives at `E¹ = 0`.
    pub analytic: bool,
    /// `(a, b, c)` of an analytic Jacobian along one of its own axes; the
    /// speeds are then `±√a, ±√b, ±√c` and three zeros.
    pub closed_form: Option<[f64; 3]>,
}

impl JacobianMatrix {
    /// `Σ n_k J_k` over three axis Jacobians.
    pub fn combine(axes: &[JacobianMatrix; 3], n: &Vector3<f64>) -> JacobianMatrix {
        JacobianMatrix {
            entries: axes[0].entries * n[0] + axes[1].entries * n[1] + axes[2].entries * n[2],
            direction: *n,
            analytic: axes.iter().all(|j| j.analytic),
            closed_form: None,
        }
    }
}

/// Derivatives of the closed third moments at `E¹ = 0`, per eigen-axis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisCoefficients {
    pub sigma: [f64; 3],
    pub w: [f64; 3],
    /// `∂E³_jjj / ∂E¹_j = σ(3w - σ) / (w(σ + w))`.
    pub a: [f64; 3],
    /// `∂E³_iij / ∂E¹_j = (w - σ)² / (2w(σ + w))`.
    pub b: [f64; 3],
}

fn barycentric(lambda_hat: [f64; 3]) -> Result<[f64; 3]> {
    let sum: f64 = lambda_hat.iter().sum();
    if (sum - 1.0).abs() > 1e-10 || lambda_hat.iter().any(|l| !l.is_finite()) {
        return Err(ClosureError::DomainError(format!(
            "not a barycentric triple: {lambda_hat:?}"
        )));
    }
    if let Some(l) = lambda_hat.iter().find(|&&l| l <= INTERIOR_TOL) {
        return Err(ClosureError::DegenerateState(format!(
            "eigenvalue {l} on the triangle boundary"
        )));
    }
    Ok(lambda_hat.map(|l| l / sum))
}

pub fn axis_coefficients(lambda_hat: [f64; 3]) -> Result<AxisCoefficients> {
    let l = barycentric(lambda_hat)?;
    let (sigma, w) = sigma_weights_raw(l, [0.0; 3]);
    let a = [0, 1, 2].map(|j| sigma[j] * (3.0 * w[j] - sigma[j]) / (w[j] * (sigma[j] + w[j])));
    let b = [0, 1, 2].map(|j| 0.5 * (w[j] - sigma[j]).powi(2) / (w[j] * (sigma[j] + w[j])));
    Ok(AxisCoefficients { sigma, w, a, b })
}

fn diagonal_state(l: [f64; 3], e1: Vector3<f64>) -> Result<MomentState> {
    build_moments(1.0, e1, Matrix3::from_diagonal(&Vector3::from(l)))
}

fn closed_e3(m: &MomentState) -> Result<ThirdMoments> {
    evaluate_closure(m).map(|e| e.e3)
}

/// The three axis Jacobians `J_x, J_y, J_z` at `E⁰ = 1, E¹ = 0, 𝐄² = diag(λ̂)`.
///
/// The entries `∂E³_kjj / ∂E¹_k` are central differences of the closure with
/// step [`FD_STEP`]; the others are closed-form.
pub fn analytic_jacobians(lambda_hat: [f64; 3]) -> Result<[JacobianMatrix; 3]> {
    let c = axis_coefficients(lambda_hat)?;
    let l = barycentric(lambda_hat)?;
    let h = FD_STEP;
    let mut out = Vec::with_capacity(3);
    for k in 0..3 {
        let plus = closed_e3(&diagonal_state(l, Vector3::ith(k, h))?)?;
        let minus = closed_e3(&diagonal_state(l, Vector3::ith(k, -h))?)?;
        let coupling = |j: usize| (plus.get(k, j, j) - minus.get(k, j, j)) / (2.0 * h);
        out.push(JacobianMatrix {
            entries: axis_matrix(k, &c, coupling),
            direction: Vector3::ith(k, 1.0),
            analytic: true,
            closed_form: Some([c.a[k], c.b[(k + 1) % 3], c.b[(k + 2) % 3]]),
        });
    }
    Ok([out[0], out[1], out[2]])
}

/// Analytic Jacobian along lab axis `axis` (0, 1 or 2).
pub fn jacobian_analytic_e1zero(lambda_hat: [f64; 3], axis: usize) -> Result<JacobianMatrix> {
    if axis > 2 {
        return Err(ClosureError::DomainError(format!(
            "axis index {axis} out of range"
        )));
    }
    Ok(analytic_jacobians(lambda_hat)?[axis])
}

fn e2_slot(i: usize, j: usize) -> usize {
    let key = (i.min(j), i.max(j));
    E2_SLOTS
        .iter()
        .position(|&s| s == key)
        .expect("stored slot")
}

fn axis_matrix(k: usize, c: &AxisCoefficients, coupling: impl Fn(usize) -> f64) -> Mat9 {
    let mut j = Mat9::zeros();
    j[(0, 1 + k)] = 1.0;
    for i in 0..3 {
        if k == 2 && i == 2 {
            // E2_zz = E0 - E2_xx - E2_yy
            j[(3, 0)] = 1.0;
            j[(3, 4)] = -1.0;
            j[(3, 7)] = -1.0;
        } else {
            j[(1 + i, 4 + e2_slot(k, i))] = 1.0;
        }
    }
    for (slot, &(p, q)) in E2_SLOTS.iter().enumerate() {
        let row = 4 + slot;
        if k == p && p == q {
            j[(row, 1 + k)] = c.a[k];
        } else if k == p || p == q || k == q {
            let once = k ^ p ^ q;
            j[(row, 1 + once)] = if once == k { coupling(p) } else { c.b[once] };
        }
    }
    j
}

/// How [`jacobian_fd_with`] differentiates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FdMode {
    /// Central differences of `n·f` in every state component.
    Direct,
    /// Rotate `n` onto `e_x`, difference `f_x` there and rotate the result
    /// back. Differs from `Direct` only where the closure is not
    /// differentiable (degenerate eigenspaces).
    Aligned,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdOptions {
    /// Step relative to `e0`.
    pub step: f64,
    pub mode: FdMode,
    /// Combine steps `h` and `h/2` to cancel the `O(h²)` error term.
    pub richardson: bool,
}

impl Default for FdOptions {
    fn default() -> Self {
        FdOptions {
            step: FD_STEP,
            mode: FdMode::Direct,
            richardson: false,
        }
    }
}

/// Central-difference Jacobian of `n·f` at `m`.
pub fn jacobian_fd(m: &MomentState, n: &Vector3<f64>, step: f64) -> Result<JacobianMatrix> {
    jacobian_fd_with(
        m,
        n,
        &FdOptions {
            step,
            ..FdOptions::default()
        },
    )
}

pub fn jacobian_fd_with(
    m: &MomentState,
    n: &Vector3<f64>,
    opts: &FdOptions,
) -> Result<JacobianMatrix> {
    let n = n.normalize();
    let h = opts.step * m.e0();
    let estimate = |h: f64| -> Result<Mat9> {
        match opts.mode {
            FdMode::Direct => fd_matrix(m, &n, h),
            FdMode::Aligned => {
                let q = Rotation::aligning_to_x(&n);
                let jx = fd_matrix(&rotate_moments(m, &q), &Vector3::x(), h)?;
                Ok(transform_matrix(&q.inverse()) * jx * transform_matrix(&q))
            }
        }
    };
    let mut entries = estimate(h)?;
    if opts.richardson {
        entries = (estimate(0.5 * h)? * 4.0 - entries) / 3.0;
    }
    Ok(JacobianMatrix {
        entries,
        direction: n,
        analytic: false,
        closed_form: None,
    })
}

fn fd_matrix(m: &MomentState, n: &Vector3<f64>, h: f64) -> Result<Mat9> {
    let base = m.to_vector();
    let flux_at = |v: &[f64; STATE_DIM], col: usize| -> Result<[f64; STATE_DIM]> {
        let fail = |e: ClosureError| {
            ClosureError::ClosureFailure(format!("stencil point in component {col}: {e}"))
        };
        let s = MomentState::from_vector(v).map_err(fail)?;
        let e3 = closed_e3(&s).map_err(fail)?;
        Ok(directional_flux(&flux_vectors(&s, &e3), n))
    };
    let mut j = Mat9::zeros();
    for col in 0..STATE_DIM {
        let mut plus = base;
        let mut minus = base;
        plus[col] += h;
        minus[col] -= h;
        let (fp, fm) = (flux_at(&plus, col)?, flux_at(&minus, col)?);
        for row in 0..STATE_DIM {
            j[(row, col)] = (fp[row] - fm[row]) / (2.0 * h);
        }
    }
    Ok(j)
}

/// Matrix of the linear map `v ↦ rotate_vector(v, q)` on state and flux vectors.
pub fn transform_matrix(q: &Rotation) -> Mat9 {
    let mut t = Mat9::zeros();
    for c in 0..STATE_DIM {
        let mut e = [0.0; STATE_DIM];
        e[c] = 1.0;
        let col = rotate_vector(&e, q);
        for r in 0..STATE_DIM {
            t[(r, c)] = col[r];
        }
    }
    t
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Failure {
    /// A closed-form coefficient is not positive.
    NonPositiveCoefficient,
    ComplexEigenvalue,
    /// Some eigenvalue has fewer independent eigenvectors than its multiplicity.
    Defective,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Diagonalizability {
    pub ok: bool,
    /// Real parts of the eigenvalues, descending.
    pub speeds: [f64; STATE_DIM],
    /// Smallest distance between distinct eigenvalue clusters (∞ if only one).
    pub min_gap: f64,
    pub failure: Option<Failure>,
}

impl Diagonalizability {
    fn new(mut speeds: [f64; STATE_DIM], failure: Option<Failure>, radius: f64) -> Self {
        speeds.sort_by(|a, b| b.total_cmp(a));
        let clusters = cluster(&speeds.iter().rev().copied().collect::<Vec<_>>(), radius);
        let means: Vec<f64> = clusters
            .iter()
            .map(|c| c.iter().sum::<f64>() / c.len() as f64)
            .collect();
        let min_gap = means
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        Diagonalizability {
            ok: failure.is_none(),
            speeds,
            min_gap,
            failure,
        }
    }
}

/// Groups sorted values whose consecutive distance is at most `radius`.
fn cluster(sorted: &[f64], radius: f64) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::new();
    for &v in sorted {
        match out.last_mut() {
            Some(c) if v - c[c.len() - 1] <= radius => c.push(v),
            _ => out.push(vec![v]),
        }
    }
    out
}

/// Real-diagonalizability test of a Jacobian with relative threshold `tol`.
///
/// Axis-analytic Jacobians use their closed form. Matrices that only couple
/// the even and odd state components (`E¹ = 0` linearizations) reduce to the
/// 3×3 product of the coupling blocks, whose eigenvalues are the squared
/// speeds. Anything else goes through [`is_real_diagonalizable_general`].
pub fn is_real_diagonalizable(j: &JacobianMatrix, tol: f64) -> Diagonalizability {
    if let Some(abc) = j.closed_form {
        let radius = tol.sqrt() * j.entries.norm();
        let mut speeds = [0.0; STATE_DIM];
        for (i, &v) in abc.iter().enumerate() {
            let s = v.max(0.0).sqrt();
            speeds[2 * i] = s;
            speeds[2 * i + 1] = -s;
        }
        let failure = abc
            .iter()
            .any(|&v| !(v > tol))
            .then_some(Failure::NonPositiveCoefficient);
        return Diagonalizability::new(speeds, failure, radius);
    }
    if let Some(d) = reduced_test(&j.entries, tol) {
        return d;
    }
    is_real_diagonalizable_general(&j.entries, tol)
}

/// Eigenvalues with imaginary part above `tol·‖J‖` are rejected; real ones
/// are clustered within `√tol·‖J‖` and each cluster must have as many
/// singular values of `J - μI` below `tol·‖J‖` as it has members.
pub fn is_real_diagonalizable_general(j: &Mat9, tol: f64) -> Diagonalizability {
    let norm = j.norm();
    if norm == 0.0 {
        return Diagonalizability::new([0.0; STATE_DIM], None, 0.0);
    }
    let radius = tol.sqrt() * norm;
    let eig = j.complex_eigenvalues();
    let speeds: [f64; STATE_DIM] = std::array::from_fn(|i| eig[i].re);
    if eig.iter().any(|z| z.im.abs() > tol * norm) {
        return Diagonalizability::new(speeds, Some(Failure::ComplexEigenvalue), radius);
    }
    let mut sorted = speeds;
    sorted.sort_by(f64::total_cmp);
    for c in cluster(&sorted, radius) {
        let mu = c.iter().sum::<f64>() / c.len() as f64;
        let shifted = j - Mat9::identity() * mu;
        let deficiency = shifted
            .singular_values()
            .iter()
            .filter(|&&s| s < tol * norm)
            .count();
        if deficiency != c.len() {
            return Diagonalizability::new(speeds, Some(Failure::Defective), radius);
        }
    }
    Diagonalizability::new(speeds, None, radius)
}

/// For `J = [[0, B], [C, 0]]` in the (even, odd) split, `J²` has the blocks
/// `BC` and `CB`; `J` is real diagonalizable with three zero speeds exactly
/// when the 3×3 `CB` is diagonalizable with positive eigenvalues.
fn reduced_test(j: &Mat9, tol: f64) -> Option<Diagonalizability> {
    let norm = j.norm();
    let zero_block = |rows: &[usize], cols: &[usize]| {
        rows.iter()
            .all(|&r| cols.iter().all(|&c| j[(r, c)].abs() <= tol * norm * 1e-3))
    };
    if norm == 0.0 || !zero_block(&EVEN, &EVEN) || !zero_block(&ODD, &ODD) {
        return None;
    }
    let mut cb = Matrix3::<f64>::zeros();
    for (a, &r) in ODD.iter().enumerate() {
        for (b, &c) in ODD.iter().enumerate() {
            cb[(a, b)] = EVEN.iter().map(|&k| j[(r, k)] * j[(k, c)]).sum();
        }
    }
    let radius = tol.sqrt() * norm;
    let scale = norm * norm;
    let eig = cb.complex_eigenvalues();
    let mut speeds = [0.0; STATE_DIM];
    for i in 0..3 {
        let s = eig[i].re.max(0.0).sqrt();
        speeds[2 * i] = s;
        speeds[2 * i + 1] = -s;
    }
    if eig.iter().any(|z| z.im.abs() > tol * scale) {
        return Some(Diagonalizability::new(
            speeds,
            Some(Failure::ComplexEigenvalue),
            radius,
        ));
    }
    if eig.iter().any(|z| !(z.re > tol * scale)) {
        return Some(Diagonalizability::new(
            speeds,
            Some(Failure::Defective),
            radius,
        ));
    }
    let mut mus: Vec<f64> = eig.iter().map(|z| z.re).collect();
    mus.sort_by(f64::total_cmp);
    for c in cluster(&mus, tol.sqrt() * scale) {
        let mu = c.iter().sum::<f64>() / c.len() as f64;
        let shifted = cb - Matrix3::identity() * mu;
        let deficiency = shifted
            .singular_values()
            .iter()
            .filter(|&&s| s < tol * scale)
            .count();
        if deficiency != c.len() {
            return Some(Diagonalizability::new(
                speeds,
                Some(Failure::Defective),
                radius,
            ));
        }
    }
    Some(Diagonalizability::new(speeds, None, radius))
}

/// `n` quasi-uniform unit vectors on the sphere (Fibonacci lattice).
pub fn fibonacci_directions(n: usize) -> Vec<Vector3<f64>> {
    let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
    (0..n)
        .map(|i| {
            let z = 1.0 - (2.0 * i as f64 + 1.0) / n as f64;
            let r = (1.0 - z * z).max(0.0).sqrt();
            let phi = golden * i as f64;
            Vector3::new(r * phi.cos(), r * phi.sin(), z)
        })
        .collect()
}
