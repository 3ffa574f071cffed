use b2_closure::quadrature::{gauss_jacobi, tanh_sinh};
use b2_closure::{beta_moment, beta_pdf, shape_from_moments, BetaShape, Branch};
use proptest::prelude::*;
use statrs::function::beta::ln_beta;

/// Independent density on `[-1, 1]` written in terms of `1 ± μ`.
fn oracle_moment(k: i32, xi: f64, eta: f64) -> f64 {
    let ln_norm = ln_beta(xi, eta) + (xi + eta - 1.0) * 2f64.ln();
    tanh_sinh(
        |x, p, m| x.powi(k) * ((xi - 1.0) * p.ln() + (eta - 1.0) * m.ln() - ln_norm).exp(),
        1e-13,
        14,
    )
}

fn shape_strategy() -> impl Strategy<Value = BetaShape> {
    (0.02f64..0.98, 0.01f64..20.0).prop_map(|(g, d)| BetaShape::smooth(g, d).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    // Exponents below ~0.25 put mass beyond the oracle's smallest endpoint node.
    #[test]
    fn moments_match_direct_integration(xi in 0.25f64..40.0, eta in 0.25f64..40.0) {
        let shape = BetaShape::smooth(xi / (xi + eta), 1.0 / (xi + eta)).unwrap();
        for k in 0..=3u32 {
            let want = oracle_moment(k as i32, xi, eta);
            let got = beta_moment(k, &shape).unwrap();
            prop_assert!((got - want).abs() < 1e-9, "k={k} xi={xi} eta={eta}: {got} vs {want}");
        }
    }

    #[test]
    fn pdf_integrates_to_one(g in 0.05f64..0.95, d in 0.02f64..2.0) {
        let shape = BetaShape::smooth(g, d).unwrap();
        let (xi, eta) = shape.exponents();
        // Gauss–Jacobi with the density's own weight leaves a smooth remainder.
        let rule = gauss_jacobi(40, eta - 1.0, xi - 1.0, false);
        let total = rule.integrate(|mu| {
            let w = (1.0 - mu).powf(eta - 1.0) * (1.0 + mu).powf(xi - 1.0);
            beta_pdf(mu, &shape).unwrap() / w
        });
        prop_assert!((total - 1.0).abs() < 1e-10, "{total}");
    }

    #[test]
    fn pdf_is_non_negative(shape in shape_strategy(), mu in -0.999f64..0.999) {
        prop_assert!(beta_pdf(mu, &shape).unwrap() >= 0.0);
    }

    #[test]
    fn shape_round_trip(shape in shape_strategy()) {
        let m1 = beta_moment(1, &shape).unwrap();
        let m2 = beta_moment(2, &shape).unwrap();
        let back = shape_from_moments(m1, m2).unwrap();
        prop_assert_eq!(back.branch, Branch::Smooth);
        prop_assert!((back.gamma - shape.gamma).abs() < 1e-12);
        prop_assert!((back.delta - shape.delta).abs() < 1e-9 * shape.delta.max(1.0));
    }

    #[test]
    fn symmetric_kernels_have_vanishing_odd_moments(d in 0.01f64..20.0) {
        let shape = BetaShape::smooth(0.5, d).unwrap();
        prop_assert_eq!(beta_moment(1, &shape).unwrap(), 0.0);
        prop_assert_eq!(beta_moment(3, &shape).unwrap(), 0.0);
    }

    #[test]
    fn mirrored_kernel_negates_odd_moments(shape in shape_strategy()) {
        let mirror = BetaShape::smooth(1.0 - shape.gamma, shape.delta).unwrap();
        for k in [1u32, 3] {
            let (a, b) = (beta_moment(k, &shape).unwrap(), beta_moment(k, &mirror).unwrap());
            prop_assert!((a + b).abs() < 1e-14);
        }
    }

    #[test]
    fn moments_are_realizable(shape in shape_strategy()) {
        let m = [1, 2, 3].map(|k| beta_moment(k, &shape).unwrap());
        prop_assert!(m[0] * m[0] <= m[1] + 1e-15 && m[1] <= 1.0);
        prop_assert!(m[2].abs() <= m[1] + 1e-15);
    }
}

#[test]
fn dirac_branches() {
    assert_eq!(
        shape_from_moments(0.4, 0.16).unwrap().branch,
        Branch::DiracSingle { mu: 0.4 }
    );
    assert!(matches!(
        shape_from_moments(0.2, 1.0).unwrap().branch,
        Branch::DiracPair { .. }
    ));
    let pair = BetaShape::dirac_pair(0.75);
    assert_eq!(beta_moment(3, &pair).unwrap(), 0.5);
    assert!(shape_from_moments(0.5, 0.2).is_err());
}
