//! Slab-geometry slice of the closure: `E₃` as a function of `(E₁, E₂)`.

use std::io::{self, Write};

use nalgebra::{Matrix3, Vector3};
use rayon::prelude::*;

use crate::closure::{closure_params, third_moments};
use crate::moments::build_moments;
use crate::region::format_float;

pub const SLAB_HEADER: &str = "e1,e2,e3,valid";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SlabSample {
    pub e1: f64,
    pub e2: f64,
    /// `None` outside `E₁² ≤ E₂ ≤ 1` or where some axis has no beta
    /// reconstruction.
    pub e3: Option<f64>,
}

/// Normalized `E³_111` of the state `E⁰ = 1, E¹ = (e1, 0, 0)`,
/// `𝐄² = diag(e2, (1 - e2)/2, (1 - e2)/2)`.
pub fn slab_e3_at(e1: f64, e2: f64) -> Option<f64> {
    if e1 * e1 > e2 + 1e-14 || !(0.0..=1.0).contains(&e2) {
        return None;
    }
    let t = 0.5 * (1.0 - e2);
    let m = build_moments(
        1.0,
        Vector3::new(e1, 0.0, 0.0),
        Matrix3::from_diagonal(&Vector3::new(e2, t, t)),
    )
    .ok()?;
    let e3 = third_moments(&closure_params(&m).ok()?).get(0, 0, 0);
    e3.is_finite().then_some(e3)
}

/// `grid_n × grid_n` nodes over `E₁ ∈ [-1, 1]`, `E₂ ∈ [0, 1]`, `E₂` outermost.
pub fn slab_e3(grid_n: usize) -> Vec<SlabSample> {
    let n = grid_n.max(2);
    let step = |i: usize| i as f64 / (n - 1) as f64;
    let nodes: Vec<(f64, f64)> = (0..n)
        .flat_map(|j| (0..n).map(move |i| (-1.0 + 2.0 * step(i), step(j))))
        .collect();
    nodes
        .into_par_iter()
        .map(|(e1, e2)| SlabSample {
            e1,
            e2,
            e3: slab_e3_at(e1, e2),
        })
        .collect()
}

pub fn write_slab_csv<W: Write>(mut out: W, samples: &[SlabSample]) -> io::Result<()> {
    writeln!(out, "{SLAB_HEADER}")?;
    for s in samples {
        let e3 = s.e3.map(format_float).unwrap_or_default();
        writeln!(
            out,
            "{},{},{},{}",
            format_float(s.e1),
            format_float(s.e2),
            e3,
            u8::from(s.e3.is_some())
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_points() {
        assert_eq!(slab_e3_at(0.0, 1.0 / 3.0), Some(0.0));
        assert!((slab_e3_at(1.0, 1.0).unwrap() - 1.0).abs() < 1e-14);
        assert!((slab_e3_at(-1.0, 1.0).unwrap() + 1.0).abs() < 1e-14);
        assert_eq!(slab_e3_at(0.8, 0.5), None);
    }

    #[test]
    fn odd_in_e1() {
        for (e1, e2) in [(0.1, 0.2), (0.5, 0.7), (0.05, 0.3), (0.9, 0.95)] {
            let (p, m) = (slab_e3_at(e1, e2).unwrap(), slab_e3_at(-e1, e2).unwrap());
            assert!((p + m).abs() < 1e-14, "{e1} {e2}: {p} {m}");
        }
    }

    #[test]
    fn no_reconstruction_near_the_lower_curve() {
        // Realizable, but the x-axis 1D moment problem has no solution.
        for e1 in [0.3, -0.3] {
            assert_eq!(slab_e3_at(e1, 0.1), None);
        }
    }

    #[test]
    fn grid_is_symmetric() {
        let s = slab_e3(5);
        assert_eq!(s.len(), 25);
        assert_eq!(s[0].e1, -1.0);
        assert_eq!(s[4].e1, 1.0);
        assert_eq!(s[2].e1, 0.0);
    }
}
