#![allow(dead_code)]

use std::f64::consts::PI;

use b2_closure::{build_moments, MomentState, Rotation};
use nalgebra::{Matrix3, UnitQuaternion, Vector3};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rotation from three uniforms in `[0, 1)`; Haar-distributed (Shoemake).
pub fn rotation_from_uniforms(u1: f64, u2: f64, u3: f64) -> Rotation {
    let (a, b) = ((1.0 - u1).sqrt(), u1.sqrt());
    let q = nalgebra::Quaternion::new(
        b * (2.0 * PI * u3).cos(),
        a * (2.0 * PI * u2).sin(),
        a * (2.0 * PI * u2).cos(),
        b * (2.0 * PI * u3).sin(),
    );
    let m = UnitQuaternion::from_quaternion(q)
        .to_rotation_matrix()
        .into_inner();
    Rotation::new(m).unwrap()
}

pub fn random_rotation<R: Rng>(rng: &mut R) -> Rotation {
    rotation_from_uniforms(rng.gen(), rng.gen(), rng.gen())
}

/// Unit vector from `z ∈ [-1, 1]` and an azimuth.
pub fn direction_from(z: f64, phi: f64) -> Vector3<f64> {
    let s = (1.0 - z * z).max(0.0).sqrt();
    Vector3::new(s * phi.cos(), s * phi.sin(), z)
}

pub fn random_direction<R: Rng>(rng: &mut R) -> Vector3<f64> {
    direction_from(rng.gen_range(-1.0..=1.0), rng.gen_range(0.0..2.0 * PI))
}

/// Point of the simplex `λ₁ + λ₂ + λ₃ = 1` from two uniforms.
pub fn simplex_from(a: f64, b: f64) -> [f64; 3] {
    let (a, b) = if a <= b { (a, b) } else { (b, a) };
    [a, b - a, 1.0 - b]
}

pub fn random_simplex<R: Rng>(rng: &mut R) -> [f64; 3] {
    simplex_from(rng.gen(), rng.gen())
}

/// State with normalized eigenvalues `lambda_hat` and eigen-frame flux
/// `f_hat`, scaled by `e0` and rotated by `rot`.
pub fn state_from_frame(
    e0: f64,
    lambda_hat: [f64; 3],
    f_hat: [f64; 3],
    rot: &Rotation,
) -> MomentState {
    let r = rot.matrix();
    let e2 = r * Matrix3::from_diagonal(&Vector3::from(lambda_hat).scale(e0)) * r.transpose();
    let e1 = r * Vector3::from(f_hat).scale(e0);
    build_moments(e0, e1, e2).unwrap()
}

/// `min λ̂ ≥ 1/7` with `f̂` uniform in the box `|f̂ᵢ| ≤ λ̂ᵢ`, random energy and orientation.
pub fn random_safe_state<R: Rng>(rng: &mut R) -> MomentState {
    let s = random_simplex(rng);
    let l = s.map(|v| 1.0 / 7.0 + 4.0 / 7.0 * v);
    let f = l.map(|v| v * rng.gen_range(-1.0..=1.0));
    let e0 = rng.gen_range(0.5..2.0);
    let rot = random_rotation(rng);
    state_from_frame(e0, l, f, &rot)
}

/// Eigenvalues anywhere in the triangle, flux in the box.
pub fn random_box_state<R: Rng>(rng: &mut R) -> MomentState {
    let l = random_simplex(rng);
    let f = l.map(|v| v * rng.gen_range(-1.0..=1.0));
    let e0 = rng.gen_range(0.5..2.0);
    let rot = random_rotation(rng);
    state_from_frame(e0, l, f, &rot)
}

/// Moments up to third order of a finite sum of point masses on the sphere.
pub struct PointMoments {
    pub e0: f64,
    pub e1: Vector3<f64>,
    pub e2: Matrix3<f64>,
    pub e3: [[[f64; 3]; 3]; 3],
}

pub fn point_mass_moments(points: &[(f64, Vector3<f64>)]) -> PointMoments {
    let mut out = PointMoments {
        e0: 0.0,
        e1: Vector3::zeros(),
        e2: Matrix3::zeros(),
        e3: [[[0.0; 3]; 3]; 3],
    };
    for (w, d) in points {
        let d = d.normalize();
        out.e0 += w;
        out.e1 += d * *w;
        out.e2 += d * d.transpose() * *w;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.e3[i][j][k] += w * d[i] * d[j] * d[k];
                }
            }
        }
    }
    out
}

impl PointMoments {
    pub fn state(&self) -> MomentState {
        build_moments(self.e0, self.e1, self.e2).unwrap()
    }
}
