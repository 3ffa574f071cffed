//! Fully symmetric rank-3 tensors (third-order moments).

use nalgebra::{Matrix3, Vector3};

/// Lexicographic list of the 10 independent index triples.
pub const THIRD_ORDER_SLOTS: [(usize, usize, usize); 10] = [
    (0, 0, 0),
    (0, 0, 1),
    (0, 0, 2),
    (0, 1, 1),
    (0, 1, 2),
    (0, 2, 2),
    (1, 1, 1),
    (1, 1, 2),
    (1, 2, 2),
    (2, 2, 2),
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThirdMoments {
    t: [[[f64; 3]; 3]; 3],
}

impl Default for ThirdMoments {
    fn default() -> Self {
        Self::zeros()
    }
}

impl ThirdMoments {
    pub fn zeros() -> Self {
        ThirdMoments {
            t: [[[0.0; 3]; 3]; 3],
        }
    }

    /// Builds the tensor from its 10 independent entries in [`THIRD_ORDER_SLOTS`] order.
    pub fn from_independent(v: &[f64; 10]) -> Self {
        let mut out = Self::zeros();
        for (slot, &(i, j, k)) in THIRD_ORDER_SLOTS.iter().enumerate() {
            out.set_symmetric(i, j, k, v[slot]);
        }
        out
    }

    pub fn independent(&self) -> [f64; 10] {
        THIRD_ORDER_SLOTS.map(|(i, j, k)| self.t[i][j][k])
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> f64 {
        self.t[i][j][k]
    }

    fn set_symmetric(&mut self, i: usize, j: usize, k: usize, v: f64) {
        for (a, b, c) in [
            (i, j, k),
            (i, k, j),
            (j, i, k),
            (j, k, i),
            (k, i, j),
            (k, j, i),
        ] {
            self.t[a][b][c] = v;
        }
    }

    /// Adds `scale * sym(a ⊗ b ⊗ c)` (average over the six orderings).
    pub(crate) fn add_sym_outer(
        &mut self,
        scale: f64,
        a: &Vector3<f64>,
        b: &Vector3<f64>,
        c: &Vector3<f64>,
    ) {
        let s = scale / 6.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    self.t[i][j][k] += s
                        * (a[i] * b[j] * c[k]
                            + a[i] * c[j] * b[k]
                            + b[i] * a[j] * c[k]
                            + b[i] * c[j] * a[k]
                            + c[i] * a[j] * b[k]
                            + c[i] * b[j] * a[k]);
                }
            }
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &ThirdMoments, scale: f64) {
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    self.t[i][j][k] += scale * other.t[i][j][k];
                }
            }
        }
    }

    /// `T'_ijk = Σ R_il R_jm R_kn T_lmn`.
    pub fn rotated(&self, r: &Matrix3<f64>) -> ThirdMoments {
        let mut tmp1 = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for m in 0..3 {
                for n in 0..3 {
                    tmp1[i][m][n] = (0..3).map(|l| r[(i, l)] * self.t[l][m][n]).sum();
                }
            }
        }
        let mut tmp2 = [[[0.0; 3]; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for n in 0..3 {
                    tmp2[i][j][n] = (0..3).map(|m| r[(j, m)] * tmp1[i][m][n]).sum();
                }
            }
        }
        let mut out = ThirdMoments::zeros();
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    out.t[i][j][k] = (0..3).map(|n| r[(k, n)] * tmp2[i][j][n]).sum();
                }
            }
        }
        out
    }

    /// Contraction `Σ_k T_ikk`.
    pub fn trace_vector(&self) -> Vector3<f64> {
        Vector3::from_fn(|i, _| (0..3).map(|k| self.t[i][k][k]).sum())
    }

    pub fn max_abs_diff(&self, other: &ThirdMoments) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    d = d.max((self.t[i][j][k] - other.t[i][j][k]).abs());
                }
            }
        }
        d
    }

    pub fn max_abs(&self) -> f64 {
        self.max_abs_diff(&ThirdMoments::zeros())
    }
}
