//! Closed-form three-dimensional B₂ moment closure.
//!
//! Given the zeroth, first and second angular moments of a radiation field,
//! the closure reconstructs a three-term axisymmetric beta-kernel ansatz in the
//! eigenframe of the second moment and returns its third moments.

pub mod ansatz;
pub mod beta;
pub mod closure;
pub mod eigen;
pub mod error;
pub mod frame;
pub mod hyperbolicity;
pub mod interp;
pub mod moments;
pub mod quadrature;
pub mod region;
pub mod slab;
pub mod tensor;

pub use ansatz::{
    eval_ansatz, spherical_moments, spherical_moments_quadrature, AnsatzMoments, AnsatzTerm,
};
pub use beta::{beta_moment, beta_pdf, shape_from_moments, BetaShape, Branch};
pub use closure::{
    closure_params, evaluate_closure, fluxes, nonneg_diagnostics, third_moments, ClosureEvaluation,
    ClosureParams, NonnegDiagnostics,
};
pub use error::{ClosureError, Result};
pub use frame::{eigenframe, realizability_margin, ClosureFrame};
pub use hyperbolicity::{
    analytic_jacobians, is_real_diagonalizable, jacobian_analytic_e1zero, jacobian_fd,
    jacobian_fd_with, Diagonalizability, FdMode, FdOptions, JacobianMatrix,
};
pub use interp::{g_func, h_func, q_func, r_func, sigma_weights};
pub use moments::{build_moments, rotate_moments, rotate_vector, MomentState, Rotation};
pub use region::{sample_hyperbolic_region, sample_nonneg_region, write_region_csv, RegionSample};
pub use slab::{slab_e3, write_slab_csv, SlabSample};
pub use tensor::ThirdMoments;
