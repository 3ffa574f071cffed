//! The closure pipeline: eigenframe, `σ`/`w`, per-axis beta shapes and the
//! third-moment tensor.

use nalgebra::Vector3;

use crate::ansatz::AnsatzTerm;
use crate::beta::{shape_from_moments, BetaShape};
use crate::error::{ClosureError, Result};
use crate::frame::{eigenframe, margin_in_frame, ClosureFrame, FLUX_ZERO_TOL};
use crate::interp::{discriminant, sigma_positive, sigma_weights_raw};
use crate::moments::{MomentState, E2_SLOTS, STATE_DIM};
use crate::tensor::{ThirdMoments, THIRD_ORDER_SLOTS};

/// Normalized weight below which an axis is treated as absent.
pub const ZERO_WEIGHT_TOL: f64 = 1e-13;
/// Normalized denominator size below which the removable-singularity limit is used.
pub const SINGULAR_TOL: f64 = 1e-12;
/// Slack on the realizability margin and on the discriminant.
pub const MARGIN_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureParams {
    pub frame: ClosureFrame,
    pub e0: f64,
    pub sigma: [f64; 3],
    pub w: [f64; 3],
    pub shapes: [BetaShape; 3],
    /// The interpolation formulas ran on the `e0`-normalized state.
    pub normalized: bool,
}

impl ClosureParams {
    /// The three ansatz terms, one per eigen-axis.
    pub fn terms(&self) -> Result<[AnsatzTerm; 3]> {
        let mk = |i: usize| AnsatzTerm::new(self.w[i], self.frame.axis(i), self.shapes[i]);
        Ok([mk(0)?, mk(1)?, mk(2)?])
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonnegDiagnostics {
    /// `min_i (wᵢσᵢ - Fᵢ²)` in state units (it scales with `e0²`).
    pub delta: f64,
    pub box_ok: bool,
    pub sigma_pos_ok: bool,
}

impl NonnegDiagnostics {
    /// All three sufficient conditions for a non-negative ansatz hold.
    pub fn guaranteed(&self, e0: f64) -> bool {
        self.delta >= -MARGIN_TOL * e0 * e0 && self.box_ok && self.sigma_pos_ok
    }
}

/// Closure output that is produced even outside the guaranteed region.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClosureEvaluation {
    pub frame: ClosureFrame,
    pub e0: f64,
    pub margin: f64,
    pub sigma: [f64; 3],
    pub w: [f64; 3],
    /// `None` where the per-axis 1D moment problem has no solution.
    pub shapes: [Option<BetaShape>; 3],
    pub e3: ThirdMoments,
    pub diagnostics: NonnegDiagnostics,
    /// Set when the state lies outside the region where a non-negative
    /// ansatz is guaranteed or a 1D problem failed.
    pub unsafe_region: bool,
}

impl ClosureEvaluation {
    pub fn params(&self) -> Option<ClosureParams> {
        let [a, b, c] = self.shapes;
        Some(ClosureParams {
            frame: self.frame,
            e0: self.e0,
            sigma: self.sigma,
            w: self.w,
            shapes: [a?, b?, c?],
            normalized: true,
        })
    }
}

struct Normalized {
    frame: ClosureFrame,
    margin: f64,
    lambda: [f64; 3],
    f: [f64; 3],
    sigma: [f64; 3],
    w: [f64; 3],
}

fn normalized(m: &MomentState) -> Result<Normalized> {
    let e0 = m.e0();
    let frame = eigenframe(m);
    let margin = margin_in_frame(&frame, e0)?;
    if margin < -MARGIN_TOL * e0 {
        return Err(ClosureError::NotRealizable { margin });
    }
    let lambda = frame.lambda.map(|l| l / e0);
    let f = frame.f.map(|v| v / e0);
    let (sigma, w) = sigma_weights_raw(lambda, f);
    Ok(Normalized {
        frame,
        margin,
        lambda,
        f,
        sigma,
        w,
    })
}

fn axis_shape(axis: usize, f: f64, sigma: f64, w: f64) -> Result<BetaShape> {
    if w.abs() < ZERO_WEIGHT_TOL {
        if f.abs() < FLUX_ZERO_TOL {
            return Ok(BetaShape::uniform());
        }
        return Err(ClosureError::ZeroWeightInconsistency { axis, f });
    }
    if w < 0.0 {
        return Err(ClosureError::NegativeWeight { axis, w });
    }
    shape_from_moments(f / w, sigma / w)
}

/// Reconstructs the ansatz parameters of a realizable state.
pub fn closure_params(m: &MomentState) -> Result<ClosureParams> {
    let n = normalized(m)?;
    let e0 = m.e0();
    let mut shapes = [BetaShape::uniform(); 3];
    for i in 0..3 {
        shapes[i] = axis_shape(i, n.f[i], n.sigma[i], n.w[i])?;
    }
    Ok(ClosureParams {
        frame: n.frame,
        e0,
        sigma: n.sigma.map(|s| s * e0),
        w: n.w.map(|w| w * e0),
        shapes,
        normalized: true,
    })
}

/// `⟨μ³⟩`-moment of one axis, `F(σ² + 2F² - 3wσ) / (2F² - wσ - w²)`.
///
/// Normalized inputs. Where the denominator vanishes (`σ = w`) numerator and
/// denominator share the factor `2F² - 2w²` and the limit is `F`.
pub fn axis_third_moment(f: f64, sigma: f64, w: f64) -> f64 {
    if w.abs() < ZERO_WEIGHT_TOL {
        return 0.0;
    }
    let d = 2.0 * f * f - w * sigma - w * w;
    if d.abs() < SINGULAR_TOL {
        return f;
    }
    f * (sigma * sigma + 2.0 * f * f - 3.0 * w * sigma) / d
}

/// Third moments in the eigenframe, normalized.
fn frame_tensor(f: [f64; 3], sigma: [f64; 3], w: [f64; 3]) -> ThirdMoments {
    let t = [0, 1, 2].map(|l| axis_third_moment(f[l], sigma[l], w[l]));
    let vals = THIRD_ORDER_SLOTS.map(|(i, j, k)| {
        if i == j && j == k {
            t[i]
        } else if i == j || j == k || i == k {
            let once = i ^ j ^ k;
            0.5 * (f[once] - t[once])
        } else {
            0.0
        }
    });
    ThirdMoments::from_independent(&vals)
}

fn lab_tensor(
    frame: &ClosureFrame,
    e0: f64,
    f: [f64; 3],
    sigma: [f64; 3],
    w: [f64; 3],
) -> ThirdMoments {
    let mut out = ThirdMoments::zeros();
    out.add_scaled(&frame_tensor(f, sigma, w).rotated(&frame.rot), e0);
    out
}

/// Closed third moments of a parameter set, in the lab frame.
pub fn third_moments(p: &ClosureParams) -> ThirdMoments {
    let e0 = p.e0;
    let f = p.frame.f.map(|v| v / e0);
    lab_tensor(
        &p.frame,
        e0,
        f,
        p.sigma.map(|s| s / e0),
        p.w.map(|w| w / e0),
    )
}

fn diagnostics_of(n: &Normalized, e0: f64) -> NonnegDiagnostics {
    NonnegDiagnostics {
        delta: discriminant(n.sigma, n.w, n.f) * e0 * e0,
        box_ok: (0..3).all(|i| n.f[i].abs() <= n.lambda[i] + MARGIN_TOL),
        sigma_pos_ok: sigma_positive(n.lambda),
    }
}

/// Evaluates the closure algebraically wherever its formulas are finite.
pub fn evaluate_closure(m: &MomentState) -> Result<ClosureEvaluation> {
    let e0 = m.e0();
    let n = normalized(m)?;
    let shapes = [0, 1, 2].map(|i| axis_shape(i, n.f[i], n.sigma[i], n.w[i]).ok());
    let e3 = lab_tensor(&n.frame, e0, n.f, n.sigma, n.w);
    if e3.independent().iter().any(|v| !v.is_finite()) {
        return Err(ClosureError::ClosureFailure(
            "non-finite third moment".into(),
        ));
    }
    let diagnostics = diagnostics_of(&n, e0);
    Ok(ClosureEvaluation {
        frame: n.frame,
        e0,
        margin: n.margin,
        sigma: n.sigma.map(|s| s * e0),
        w: n.w.map(|w| w * e0),
        shapes,
        e3,
        unsafe_region: !diagnostics.guaranteed(e0) || shapes.iter().any(Option::is_none),
        diagnostics,
    })
}

/// Δ, the box test and the `σ`-positivity test for a state.
pub fn nonneg_diagnostics(m: &MomentState) -> Result<NonnegDiagnostics> {
    let e0 = m.e0();
    let frame = eigenframe(m);
    margin_in_frame(&frame, e0)?;
    let lambda = frame.lambda.map(|l| l / e0);
    let f = frame.f.map(|v| v / e0);
    let (sigma, w) = sigma_weights_raw(lambda, f);
    let n = Normalized {
        frame,
        margin: 0.0,
        lambda,
        f,
        sigma,
        w,
    };
    Ok(diagnostics_of(&n, e0))
}

/// Flux vectors `f_x, f_y, f_z` from a state and its closed third moments.
///
/// `f_k = [E1_k, E2_k1, E2_k2, E2_k3, E3_k11, E3_k12, E3_k13, E3_k22, E3_k23]`.
pub fn flux_vectors(m: &MomentState, e3: &ThirdMoments) -> [[f64; STATE_DIM]; 3] {
    [0, 1, 2].map(|k| {
        let mut f = [0.0; STATE_DIM];
        f[0] = m.e1()[k];
        for i in 0..3 {
            f[1 + i] = m.e2()[(k, i)];
        }
        for (slot, &(i, j)) in E2_SLOTS.iter().enumerate() {
            f[4 + slot] = e3.get(k, i, j);
        }
        f
    })
}

/// Fluxes of a state under the closure; fails where [`closure_params`] does.
pub fn fluxes(m: &MomentState) -> Result<[[f64; STATE_DIM]; 3]> {
    let p = closure_params(m)?;
    Ok(flux_vectors(m, &third_moments(&p)))
}

/// `n_x f_x + n_y f_y + n_z f_z`.
pub fn directional_flux(fl: &[[f64; STATE_DIM]; 3], n: &Vector3<f64>) -> [f64; STATE_DIM] {
    std::array::from_fn(|r| n[0] * fl[0][r] + n[1] * fl[1][r] + n[2] * fl[2][r])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::beta::Branch;
    use crate::moments::build_moments;
    use approx::assert_relative_eq;
    use nalgebra::Matrix3;

    fn state(e0: f64, e1: [f64; 3], diag: [f64; 3]) -> MomentState {
        build_moments(
            e0,
            Vector3::from(e1),
            Matrix3::from_diagonal(&Vector3::from(diag)),
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_params() {
        let p = closure_params(&MomentState::equilibrium(2.0)).unwrap();
        for i in 0..3 {
            assert_relative_eq!(p.w[i], 2.0 / 3.0, epsilon = 1e-15);
            assert_relative_eq!(p.sigma[i], 2.0 / 9.0, epsilon = 1e-15);
            assert!(p.shapes[i].is_smooth());
            assert_relative_eq!(p.shapes[i].gamma, 0.5, epsilon = 1e-15);
            assert_relative_eq!(p.shapes[i].delta, 0.5, epsilon = 1e-14);
        }
        assert!(third_moments(&p).max_abs() == 0.0);
    }

    #[test]
    fn crossing_beams() {
        let m = state(2.0, [1.0, 1.0, 0.0], [1.0, 1.0, 0.0]);
        let p = closure_params(&m).unwrap();
        for i in 0..2 {
            let Branch::DiracSingle { mu } = p.shapes[i].branch else {
                panic!("{:?}", p.shapes[i])
            };
            assert!((mu - 1.0).abs() < 1e-15);
            assert_relative_eq!(p.w[i], 1.0, epsilon = 1e-15);
            assert_relative_eq!(p.sigma[i], 1.0, epsilon = 1e-15);
        }
        assert!(p.w[2].abs() < 1e-15);
        let t = third_moments(&p);
        assert_relative_eq!(t.get(0, 0, 0), 1.0, epsilon = 1e-15);
        assert_relative_eq!(t.get(1, 1, 1), 1.0, epsilon = 1e-15);
        assert!(t.get(0, 0, 1).abs() < 1e-15 && t.get(0, 1, 1).abs() < 1e-15);
    }

    #[test]
    fn single_axis_reference_value() {
        let (w, s, f): (f64, f64, f64) = (1.0 / 3.0, 1.0 / 9.0, 0.1);
        let got = axis_third_moment(f, s, w);
        assert_relative_eq!(
            got,
            f * (s * s + 0.02 - 3.0 * w * s) / (0.02 - w * s - w * w),
            epsilon = 1e-16
        );
        // oracle: w times the third moment of the recovered 1D beta shape
        let shape = shape_from_moments(f / w, s / w).unwrap();
        let m3 = crate::beta::beta_moment(3, &shape).unwrap();
        assert_relative_eq!(got, w * m3, epsilon = 1e-15);
        assert_relative_eq!(got, 0.0614644, epsilon = 1e-7);
    }

    #[test]
    fn unrealizable_1d_is_reported() {
        // σ₃ < 0 on this thin-axis state
        let m = state(1.0, [0.0; 3], [0.6, 0.38, 0.02]);
        let d = nonneg_diagnostics(&m).unwrap();
        assert!(d.delta < 0.0);
        assert!(matches!(
            closure_params(&m),
            Err(ClosureError::Unrealizable1D { .. })
        ));
        assert!(evaluate_closure(&m).unwrap().unsafe_region);
    }

    #[test]
    fn unrealizable_state_rejected() {
        let m = build_moments(1.0, Vector3::new(0.9, 0.0, 0.0), Matrix3::identity() / 3.0).unwrap();
        assert!(matches!(
            closure_params(&m),
            Err(ClosureError::NotRealizable { .. })
        ));
    }

    #[test]
    fn fluxes_of_simple_states() {
        let fl = fluxes(&MomentState::equilibrium(1.0)).unwrap();
        let mut want = [0.0; 9];
        want[1] = 1.0 / 3.0;
        assert_eq!(fl[0], want);

        let beam = state(1.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0]);
        let fl = fluxes(&beam).unwrap();
        let want = [1.0, 1.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0];
        for r in 0..9 {
            assert!((fl[0][r] - want[r]).abs() < 1e-15, "{:?}", fl[0]);
        }
    }

    #[test]
    fn equilibrium_diagnostics() {
        let d = nonneg_diagnostics(&MomentState::equilibrium(1.0)).unwrap();
        assert_relative_eq!(d.delta, 1.0 / 27.0, epsilon = 1e-15);
        assert!(d.box_ok && d.sigma_pos_ok);
        let d = nonneg_diagnostics(&state(1.0, [0.0; 3], [0.49, 0.49, 0.02])).unwrap();
        assert!(!d.sigma_pos_ok);
        let d = nonneg_diagnostics(&state(1.0, [1.0, 0.0, 0.0], [1.0, 0.0, 0.0])).unwrap();
        assert!(d.delta.abs() < 1e-15);
    }
}
