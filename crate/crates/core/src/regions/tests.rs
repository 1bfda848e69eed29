use super::*;
use crate::radial_ode::IntegratorConfig;
use crate::shooting::{count_annulus_solutions, DEFAULT_BETA_RANGE};
use proptest::prelude::*;

fn params(p: f64, lambda: f64) -> ProblemParams {
    ProblemParams::new(3, p, lambda).unwrap()
}

#[test]
fn r0_values_and_scaling() {
    let r = r0(&params(9.0, 1.0)).unwrap();
    assert!((r - 8f64.sqrt() / 12.0).abs() < 1e-15);
    assert!((r - 0.235702).abs() < 1e-6);
    let r4 = r0(&params(9.0, 4.0)).unwrap();
    assert!((r4 - r / 2.0).abs() < 1e-15);
    assert!(r0(&params(5.0 + 1e-10, 1.0)).unwrap() < 1e-5);
    assert!(r0(&params(5.0, 1.0)).is_err());
    // N = 4 reduces to sqrt(2(2p)(2p-6)/(lambda(p-1)(p+3)^2))
    let r = r0(&ProblemParams::new(4, 5.0, 1.0).unwrap()).unwrap();
    assert!((r - (2.0 * 10.0 * 4.0 / (4.0 * 64.0f64)).sqrt()).abs() < 1e-15);
}

#[test]
fn curves_meet_at_r0() {
    for (p, lambda) in [(7.0, 1.0), (9.0, 1.0), (9.0, 3.7), (25.0, 0.2)] {
        let r = r0(&params(p, lambda)).unwrap();
        let phi = phi_boundaries(p, lambda, r).unwrap();
        assert!((phi.phi1 - phi.phi3).abs() < 1e-12, "p {p} lambda {lambda}");
        assert!((phi.phi2 - phi.phi3).abs() < 1e-12);
    }
    // the 1/pi reading only meets the others when lambda = pi^2
    let phi = phi_boundaries(9.0, 1.0, r0(&params(9.0, 1.0)).unwrap()).unwrap();
    assert!((phi.phi2_literal - phi.phi1).abs() > 0.5);
    let lam = PI * PI;
    let phi = phi_boundaries(9.0, lam, r0(&params(9.0, lam)).unwrap()).unwrap();
    assert!((phi.phi2_literal - phi.phi1).abs() < 1e-12);
}

#[test]
fn curve_intercepts() {
    for lambda in [1.0f64, 2.5] {
        let phi = phi_boundaries(7.0, lambda, 0.0).unwrap();
        assert_eq!(phi.phi1, PI / lambda.sqrt());
    }
    let want = 2.0 * 8f64.sqrt() / 12.0 + (-1.0 / 3f64.sqrt()).acos();
    let phi = phi_boundaries(9.0, 1.0, 0.0).unwrap();
    assert!((phi.phi3 - want).abs() < 1e-15);
    assert!((phi.phi3 - 2.6576806).abs() < 1e-7);
    let phi = phi_boundaries(7.0, 1.0, 0.0).unwrap();
    assert!((phi.phi3 - (0.4 + (-0.2f64.sqrt()).acos())).abs() < 1e-15);
    assert!(phi_boundaries(5.0, 1.0, 0.0).is_err());
    assert!(phi_boundaries(7.0, 1.0, -1.0).is_err());
}

#[test]
fn phi1_convex_with_unit_slope_at_r0() {
    let (p, lambda) = (9.0, 1.3);
    let f = |a: f64| phi_boundaries(p, lambda, a).unwrap().phi1;
    let h = 1e-3;
    for a in lin_grid(h, 2.0, 200) {
        let second = (f(a + h) - 2.0 * f(a) + f(a - h)) / (h * h);
        let exact = 16.0 * a * lambda * (p - 5.0) * (p + 3.0f64).powi(3)
            / (4.0 * a * a * lambda * (p + 3.0f64).powi(2) + (p - 5.0f64).powi(2)).powi(2);
        assert!(second > 0.0);
        assert!((second - exact).abs() < 1e-4 * exact.max(1.0));
    }
    let r = r0(&params(p, lambda)).unwrap();
    assert!((phi1_slope(p, lambda, r) + 1.0).abs() < 1e-12);
    let d = 1e-5;
    assert!(((f(r + d) - f(r - d)) / (2.0 * d) + 1.0).abs() < 1e-8);
}

#[test]
fn classifier_examples() {
    let pr = params(9.0, 1.0);
    let v = classify(&pr, 0.3, 2.0).unwrap();
    assert_eq!(v.case, Case::CaseI);
    assert!(v.uniqueness_guaranteed);

    let phi = phi_boundaries(9.0, 1.0, 0.1).unwrap();
    let v = classify(&pr, 0.1, phi.phi3 - 1e-3).unwrap();
    assert_eq!(v.case, Case::CaseIII);
    assert!(v.uniqueness_guaranteed);

    let v = classify(&pr, 0.1, 0.5 * (phi.phi1 + phi.phi3)).unwrap();
    assert_eq!(v.case, Case::GapS);
    assert!(!v.uniqueness_guaranteed);
    assert_eq!(v.subcase, None);

    let v = classify(&pr, 0.1, phi.phi1).unwrap();
    assert_eq!(v.case, Case::CaseII);

    let v = classify(&pr, 0.1, 0.1 + PI).unwrap();
    assert_eq!(v.case, Case::NotApplicable);
    assert!(!v.uniqueness_guaranteed);

    assert!(classify(&pr, 2.0, 1.0).is_err());
    assert!(classify(&ProblemParams::new(4, 9.0, 1.0).unwrap(), 0.1, 1.0).is_err());
}

#[test]
fn boundary_values_are_reported() {
    let v = classify(&params(9.0, 4.0), 0.05, 0.8).unwrap();
    let bv = v.boundary_values;
    assert!((bv.pi_over_sqrt_lambda - PI / 2.0).abs() < 1e-15);
    assert!((bv.r0 - 8f64.sqrt() / 24.0).abs() < 1e-15);
    assert!(bv.phi3 < bv.phi1);
}

#[test]
fn r1_satisfies_tangency() {
    for (p, lambda, a, b) in [(7.0, 1.0, 0.05, 2.5), (9.0, 2.0, 0.1, 1.8), (40.0, 0.5, 0.01, 3.0)] {
        assert!(r1_tangency_residual(p, lambda, a, b) < 1e-10);
        let k = lambda.sqrt();
        let angle = k * (2.0 * r1(p, lambda, a, b) - a - b);
        assert!(angle > -PI && angle < -PI / 2.0);
    }
}

#[test]
fn jl_exponent_values() {
    assert_eq!(jl_exponent(3).unwrap(), f64::INFINITY);
    assert_eq!(jl_exponent(10).unwrap(), f64::INFINITY);
    // rationalised: 1 + 4(7 + 2 sqrt 10)/9
    let oracle = (37.0 + 8.0 * 10f64.sqrt()) / 9.0;
    assert!((jl_exponent(11).unwrap() - oracle).abs() < 1e-12);
    assert!((oracle - 6.9220246).abs() < 1e-7);
    assert!(jl_exponent(12).unwrap() < jl_exponent(11).unwrap());
    assert!(jl_exponent(2).is_err());
}

#[test]
fn corollary_window_limits() {
    let w = corollary_window(9.0, 1.0, 1.0).unwrap();
    assert!((w.lambda_lo - 7.0633).abs() < 1e-4, "{}", w.lambda_lo);
    assert!((w.lambda_hi - PI * PI).abs() < 1e-12);
    assert!((w.b_lo - 2.6576806).abs() < 1e-7);
    let w = corollary_window(5.0 + 1e-12, 1.0, 2.0).unwrap();
    assert!((w.lambda_lo - PI * PI / 16.0).abs() < 1e-4);
    let e = window_constant(1e8);
    assert!((e * e - PI * PI).abs() <= 1e-3);
}

#[test]
fn a_vanishes_at_both_ends() {
    let f = PohozaevFns::new(7.0, 1.3, 0.4, 2.1).unwrap();
    assert!(f.a_fn(0.4).abs() < 1e-15);
    assert!(f.a_fn(2.1).abs() < 1e-15);
    assert!(f.a_fn(1.0) > 0.0);
}

#[test]
fn a_derivatives_match_product_form() {
    let f = PohozaevFns::new(9.0, 0.7, 0.3, 2.5).unwrap();
    let k = 0.7f64.sqrt();
    let direct = |r: f64| (0.3 * 2.5 / 0.7) * r * r * (k * (r - 0.3)).sin() * (k * (2.5 - r)).sin();
    let h = 1e-3;
    for r in lin_grid(0.5, 2.3, 17) {
        let [a0, a1, a2, a3] = f.a_derivs(r);
        assert!((a0 - direct(r)).abs() < 1e-14);
        let d1 = (direct(r + h) - direct(r - h)) / (2.0 * h);
        let d2 = (direct(r + h) - 2.0 * direct(r) + direct(r - h)) / (h * h);
        let d3 = (direct(r + 2.0 * h) - 2.0 * direct(r + h) + 2.0 * direct(r - h) - direct(r - 2.0 * h)) / (2.0 * h * h * h);
        assert!((a1 - d1).abs() < 1e-5);
        assert!((a2 - d2).abs() < 1e-5);
        assert!((a3 - d3).abs() < 1e-4);
    }
}

#[test]
fn z_endpoint_and_midpoint_values() {
    let (p, lambda, a, b) = (7.0, 1.0, 0.2, 2.3);
    let f = PohozaevFns::new(p, lambda, a, b).unwrap();
    let s = (b - a as f64).sin();
    assert!((f.z(a) - a * (p + 3.0) * s).abs() < 1e-14);
    assert!((f.z(b) + b * (p + 3.0) * s).abs() < 1e-14);
    let mid = 0.5 * (a + b);
    assert!((f.z(mid) + 2.0 * (p - 1.0) * (0.5 * (b - a as f64)).sin().powi(2)).abs() < 1e-14);
    let h = 1e-6;
    for r in lin_grid(a, b, 11) {
        let fd = (f.z(r + h) - f.z(r - h)) / (2.0 * h);
        assert!((fd - f.z_r(r)).abs() < 1e-7);
    }
}

#[test]
fn z_sign_structure_in_uniqueness_cases() {
    let rep = z_sign_structure(7.0, 1.0, 0.5, 2.0, 2000).unwrap();
    assert!(rep.single_change);
    let kappa = rep.kappa.unwrap();
    let f = PohozaevFns::new(7.0, 1.0, 0.5, 2.0).unwrap();
    assert!(f.z(kappa).abs() < 1e-12);
    assert!(z_sign_structure(7.0, 1.0, 0.5, 0.5 + PI, 100).is_err());
}

#[test]
fn pohozaev_identity_on_annulus_solution() {
    let cfg = IntegratorConfig::default().scaled_tolerances(0.01);
    let pr = params(7.0, 1.0);
    let (a, b) = (0.5, 2.0);
    let set = count_annulus_solutions(&pr, a, b, DEFAULT_BETA_RANGE, 200, &cfg).unwrap();
    assert_eq!(set.count(), 1);
    let fns = PohozaevFns::new(7.0, 1.0, a, b).unwrap();
    let reports: Vec<PohozaevReport> =
        [100, 200, 400].iter().map(|&n| pohozaev_eval(&fns, &set.solutions[0].profile, n).unwrap()).collect();
    for w in reports.windows(2) {
        assert!(w[1].relative_residual < 0.5 * w[0].relative_residual, "{reports:?}");
    }
    assert!(reports[2].relative_residual <= 1e-6, "{reports:?}");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn g_vanishes_identically(p in 5.5f64..40.0, lambda in 0.1f64..5.0, a in 0.01f64..2.0, frac in 0.05f64..0.99) {
        let b = a + frac * PI / lambda.sqrt();
        let f = PohozaevFns::new(p, lambda, a, b).unwrap();
        for r in lin_grid(a, b, 100) {
            let scale = f.g_scale(r);
            prop_assert!(f.g(r).abs() <= 1e-9 * scale.max(f64::MIN_POSITIVE), "r {} G {} scale {}", r, f.g(r), scale);
        }
    }

    #[test]
    fn h_is_proportional_to_z(p in 5.5f64..40.0, lambda in 0.1f64..5.0, a in 0.01f64..2.0, frac in 0.05f64..0.99, t in 0.0f64..1.0) {
        let b = a + frac * PI / lambda.sqrt();
        let f = PohozaevFns::new(p, lambda, a, b).unwrap();
        let r = a + t * (b - a);
        let [a0, a1, ..] = f.a_derivs(r);
        let scale = 2.0 * a0.abs() / r + (p + 3.0) * a1.abs() / (2.0 * (p + 1.0));
        prop_assert!((f.h(r) - f.h_from_z(r)).abs() <= 1e-12 * scale.max(f64::MIN_POSITIVE));
    }

    #[test]
    fn z_positive_at_a_negative_at_b(p in 5.5f64..40.0, lambda in 0.1f64..5.0, a in 0.01f64..2.0, frac in 0.01f64..0.99) {
        let b = a + frac * PI / lambda.sqrt();
        let f = PohozaevFns::new(p, lambda, a, b).unwrap();
        prop_assert!(f.z(a) > 0.0);
        prop_assert!(f.z(b) < 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn classifier_matches_raw_inequalities(p in 5.2f64..30.0, lambda in 0.2f64..4.0, x in 0.0f64..1.0, y in 0.0f64..1.0) {
        let k = lambda.sqrt();
        let rr0 = (2.0 * (p - 5.0)).sqrt() / (k * (p + 3.0));
        // a concentrated near r0 so that all cases occur
        let a = 1e-4 + 3.0 * rr0 * x;
        let b = a + 1e-6 + 1.2 * (PI / k) * y;
        let v = classify(&params(p, lambda), a, b).unwrap();

        let arctan_term = (2.0 * (p + 3.0) * k * a / (p - 5.0)).atan() / k;
        let upper2 = a + PI / k;
        let lower2 = upper2 - arctan_term;
        let acos_term = (-((p - 5.0) / (p + 3.0)).sqrt()).acos();
        let upper3 = -a + (2.0 * (2.0 * (p - 5.0)).sqrt() / (p + 3.0) + acos_term) / k;
        let admissible = k * (b - a) < PI;
        let case_i = rr0 <= a || b <= rr0;
        let straddle = a < rr0 && b > rr0;
        let case_ii = straddle && lower2 <= b && b < upper2;
        let case_iii = straddle && b <= upper3;

        if !admissible {
            prop_assert_eq!(v.case, Case::NotApplicable);
        } else {
            prop_assert_eq!(v.uniqueness_guaranteed, case_i || case_ii || case_iii);
            if v.case == Case::GapS {
                prop_assert!(a < rr0 && rr0 < b && upper3 < b && b < lower2);
            }
            // the Z case split covers exactly the uniqueness set
            prop_assert_eq!(v.subcase.is_some(), v.uniqueness_guaranteed, "{:?}", v);
        }
    }
}
