//! Sweeps over the barycentric triangle of normalized eigenvalues.

use std::io::{self, Write};

use nalgebra::Vector3;
use rayon::prelude::*;

use crate::closure::MARGIN_TOL;
use crate::hyperbolicity::{
    analytic_jacobians, fibonacci_directions, is_real_diagonalizable, JacobianMatrix,
};
use crate::interp::{discriminant, sigma_positive, sigma_weights_raw};

pub const CSV_HEADER: &str = "l1,l2,l3,f1,f2,f3,delta,sigma_pos,hyperbolic,min_eig_gap";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegionSample {
    pub lambda_hat: [f64; 3],
    /// Flux sample attaining `delta` (zero in the hyperbolicity sweep).
    pub f_hat: [f64; 3],
    /// Smallest discriminant found at this node.
    pub delta: f64,
    pub sigma_pos: bool,
    pub hyperbolic: Option<bool>,
    pub min_eig_gap: Option<f64>,
}

impl RegionSample {
    /// Inside the region with a guaranteed non-negative ansatz.
    pub fn nonneg(&self) -> bool {
        self.delta >= -MARGIN_TOL && self.sigma_pos
    }
}

/// Nodes `(i, j, n - i - j) / n` of the triangle, `i` outermost.
pub fn barycentric_nodes(grid_n: usize) -> Vec<[f64; 3]> {
    let n = grid_n.max(1);
    let nf = n as f64;
    let mut out = Vec::with_capacity((n + 1) * (n + 2) / 2);
    for i in 0..=n {
        for j in 0..=n - i {
            let k = n - i - j;
            out.push([i as f64 / nf, j as f64 / nf, k as f64 / nf]);
        }
    }
    out
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n <= 1 {
        return vec![0.5 * (a + b)];
    }
    (0..n)
        .map(|i| a + (b - a) * i as f64 / (n - 1) as f64)
        .collect()
}

/// Minimum discriminant over an `f_grid_n³` grid of the flux box at one node.
///
/// Nodes on the triangle boundary only admit `f = 0` along their vanishing
/// axes; they are evaluated at `f = 0` alone.
pub fn nonneg_node(lambda_hat: [f64; 3], f_grid_n: usize) -> RegionSample {
    let interior = lambda_hat.iter().all(|&l| l > 0.0);
    let axes: Vec<Vec<f64>> = if interior {
        lambda_hat
            .iter()
            .map(|&l| linspace(-l, l, f_grid_n))
            .collect()
    } else {
        vec![vec![0.0]; 3]
    };
    let mut best = (f64::INFINITY, [0.0; 3]);
    for &f1 in &axes[0] {
        for &f2 in &axes[1] {
            for &f3 in &axes[2] {
                let f = [f1, f2, f3];
                let (s, w) = sigma_weights_raw(lambda_hat, f);
                let d = discriminant(s, w, f);
                if d < best.0 {
                    best = (d, f);
                }
            }
        }
    }
    RegionSample {
        lambda_hat,
        f_hat: best.1,
        delta: best.0,
        sigma_pos: sigma_positive(lambda_hat),
        hyperbolic: None,
        min_eig_gap: None,
    }
}

/// Non-negativity sweep; results are in [`barycentric_nodes`] order.
pub fn sample_nonneg_region(grid_n: usize, f_grid_n: usize) -> Vec<RegionSample> {
    barycentric_nodes(grid_n)
        .into_par_iter()
        .map(|l| nonneg_node(l, f_grid_n))
        .collect()
}

/// Directions used by the hyperbolicity sweep: the three axes, then the
/// Fibonacci lattice.
pub fn sweep_directions(dir_n: usize) -> Vec<Vector3<f64>> {
    let mut dirs = vec![Vector3::x(), Vector3::y(), Vector3::z()];
    dirs.extend(fibonacci_directions(dir_n));
    dirs
}

/// Hyperbolicity of one node at `E¹ = 0` over the given directions.
pub fn hyperbolic_node(lambda_hat: [f64; 3], dirs: &[Vector3<f64>], tol: f64) -> RegionSample {
    let (s, w) = sigma_weights_raw(lambda_hat, [0.0; 3]);
    let mut out = RegionSample {
        lambda_hat,
        f_hat: [0.0; 3],
        delta: discriminant(s, w, [0.0; 3]),
        sigma_pos: sigma_positive(lambda_hat),
        hyperbolic: Some(false),
        min_eig_gap: None,
    };
    let Ok(axes) = analytic_jacobians(lambda_hat) else {
        return out;
    };
    let mut gap = f64::INFINITY;
    for n in dirs {
        let j = match (0..3).find(|&k| *n == Vector3::ith(k, 1.0)) {
            Some(k) => axes[k],
            None => JacobianMatrix::combine(&axes, n),
        };
        let d = is_real_diagonalizable(&j, tol);
        if !d.ok {
            return out;
        }
        gap = gap.min(d.min_gap);
    }
    out.hyperbolic = Some(true);
    out.min_eig_gap = Some(gap);
    out
}

/// Hyperbolicity sweep at `E¹ = 0`; results are in [`barycentric_nodes`] order.
pub fn sample_hyperbolic_region(grid_n: usize, dir_n: usize, tol: f64) -> Vec<RegionSample> {
    let dirs = sweep_directions(dir_n);
    barycentric_nodes(grid_n)
        .into_par_iter()
        .map(|l| hyperbolic_node(l, &dirs, tol))
        .collect()
}

/// 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{x:.16e}")
}

fn opt<T>(v: Option<T>, f: impl Fn(T) -> String) -> String {
    v.map(f).unwrap_or_default()
}

fn flag(b: bool) -> String {
    u8::from(b).to_string()
}

pub fn write_region_csv<W: Write>(mut out: W, samples: &[RegionSample]) -> io::Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    for s in samples {
        let l = s.lambda_hat.map(format_float);
        let f = s.f_hat.map(format_float);
        writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            l[0],
            l[1],
            l[2],
            f[0],
            f[1],
            f[2],
            format_float(s.delta),
            flag(s.sigma_pos),
            opt(s.hyperbolic, flag),
            opt(s.min_eig_gap, format_float),
        )?;
    }
    Ok(())
}
