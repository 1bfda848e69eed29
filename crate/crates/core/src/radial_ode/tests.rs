use super::*;
use std::f64::consts::PI;

fn p7() -> ProblemParams {
    ProblemParams::new(3, 7.0, 1.0).unwrap()
}

#[test]
fn params_validation() {
    assert!(ProblemParams::new(1, 7.0, 1.0).is_err());
    assert!(ProblemParams::new(3, 1.0, 1.0).is_err());
    assert!(ProblemParams::new(3, 7.0, 0.0).is_err());
    assert!(ProblemParams::new(3, 7.0, f64::NAN).is_err());
    assert!(p7().super_critical());
    assert!(!ProblemParams::new(3, 5.0, 1.0).unwrap().super_critical());
    assert!(!ProblemParams::new(2, 50.0, 1.0).unwrap().super_critical());
}

#[test]
fn small_alpha_zero_is_near_pi() {
    let cfg = IntegratorConfig::default();
    let out = integrate_from_center(&p7(), 1e-6, 2.0 * PI, &cfg).unwrap();
    match out.kind {
        OutcomeKind::FirstZero { radius, slope } => {
            assert!((radius - PI).abs() < 1e-3, "{radius}");
            assert!(slope < 0.0);
        }
        other => panic!("{other:?}"),
    }
}

#[test]
fn small_alpha_follows_linearisation() {
    let alpha = 1e-6;
    let out = integrate_from_center(&p7(), alpha, 2.0 * PI, &IntegratorConfig::default()).unwrap();
    let (u, _) = out.profile.eval(PI / 2.0).unwrap();
    assert!((u / alpha - 2.0 / PI).abs() < 1e-4);
}

#[test]
fn center_start_matches_initial_data() {
    let out = integrate_from_center(&p7(), 3.0, 2.0 * PI, &IntegratorConfig::default()).unwrap();
    let p = &out.profile;
    assert_eq!(p.span().0, 0.0);
    assert_eq!((p.u()[0], p.uprime()[0]), (3.0, 0.0));
    // the series cap joins the integrated part continuously
    let eps = p.nodes()[1];
    let (u, up) = p.eval(eps * (1.0 - 1e-12)).unwrap();
    assert!((u - p.u()[1]).abs() < 1e-12);
    assert!((up - p.uprime()[1]).abs() < 1e-9 * p.uprime()[1].abs());
    let (u_mid, _) = p.eval(0.5 * eps).unwrap();
    assert!(u_mid < 3.0 && u_mid > p.u()[1]);
}

#[test]
fn energy_is_nonincreasing_and_bounded() {
    let cfg = IntegratorConfig::default();
    for alpha in [0.1, 1.0, 10.0, 100.0] {
        let params = p7();
        let out = integrate_from_center(&params, alpha, 2.0 * PI, &cfg).unwrap();
        let e = energy_along(&params, &out.profile);
        for w in e.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15, "alpha {alpha}: {} > {}", w[1], w[0]);
        }
        assert!(out.profile.max_abs_u() <= a_priori_bound(&params, alpha) * (1.0 + 1e-9));
    }
}

#[test]
fn node_residual_is_small() {
    let cfg = IntegratorConfig::default();
    let out = integrate_from_center(&p7(), 5.0, 2.0 * PI, &cfg).unwrap();
    assert!(max_scaled_residual(&p7(), &out.profile, &cfg) <= 10.0);
}

#[test]
fn inner_start_reports_zero_or_positivity() {
    let cfg = IntegratorConfig::default();
    // tiny slope on a thin shell stays positive
    let out = integrate_from_inner(&p7(), 1.0, 1e-3, 2.0, &cfg).unwrap();
    assert!(matches!(out.kind, OutcomeKind::PositiveAtHorizon { .. }));
    // wide shell: lambda above the first eigenvalue forces an interior zero
    let out = integrate_from_inner(&p7(), 1.0, 1e-3, 5.0, &cfg).unwrap();
    let z = out.first_zero().unwrap();
    assert!(z > 1.0 && z < 5.0);
}

#[test]
fn backward_start_tiny_gamma_stays_positive_and_decreasing() {
    let cfg = IntegratorConfig::default();
    let out = integrate_backward_from_outer(&p7(), 2.0, 1e-6, 0.01, &cfg).unwrap();
    assert!(matches!(out.kind, OutcomeKind::PositiveAtHorizon { .. }));
    let p = &out.profile;
    assert_eq!(p.start_kind(), StartKind::OuterBoundaryBackward);
    for (r, u, up) in p.rows() {
        if r < 2.0 {
            assert!(u > 0.0 && up < 0.0, "r {r} u {u} up {up}");
        }
    }
    assert!(p.nodes().windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn backward_reproduces_ball_solution() {
    let cfg = IntegratorConfig::default();
    let params = p7();
    let ball = integrate_from_center(&params, 1.0, 2.0 * PI, &cfg).unwrap();
    let OutcomeKind::FirstZero { radius: b, slope } = ball.kind else {
        panic!()
    };
    let back = integrate_backward_from_outer(&params, b, -slope, 0.05, &cfg).unwrap();
    let (v, _) = back.profile.eval(0.05).unwrap();
    let (u, _) = ball.profile.eval(0.05).unwrap();
    assert!((u - v).abs() < 1e-6, "{u} vs {v}");
}

#[test]
fn singular_amplitude_closed_form() {
    let a = singular_amplitude(&p7()).unwrap();
    assert!((a - (2.0f64 / 9.0).powf(1.0 / 6.0)).abs() < 1e-15);
    assert!(singular_amplitude(&ProblemParams::new(3, 5.0, 1.0).unwrap()).is_err());
}

#[test]
fn singular_zero_is_start_independent() {
    let cfg = IntegratorConfig::default();
    let z3 = integrate_singular(&p7(), 1e-3, 2.0 * PI, &cfg).unwrap().first_zero().unwrap();
    let z4 = integrate_singular(&p7(), 1e-4, 2.0 * PI, &cfg).unwrap().first_zero().unwrap();
    assert!((z3 - z4).abs() < 1e-4);
    assert!(z3 > 2.4 && z3 < PI);
}

#[test]
fn singular_without_zero_fails() {
    let cfg = IntegratorConfig::default();
    let out = integrate_singular(&p7(), 1e-3, 1.0, &cfg).unwrap();
    assert!(matches!(out.kind, OutcomeKind::Failed(FailReason::NoZeroBeforeHorizon { .. })));
}

#[test]
fn preconditions_are_checked() {
    let cfg = IntegratorConfig::default();
    assert!(integrate_from_center(&p7(), -1.0, 1.0, &cfg).is_err());
    assert!(integrate_from_inner(&p7(), 2.0, 1.0, 1.0, &cfg).is_err());
    assert!(integrate_backward_from_outer(&p7(), 1.0, -1.0, 0.5, &cfg).is_err());
    let bad = IntegratorConfig {
        rtol: 0.0,
        ..IntegratorConfig::default()
    };
    assert!(integrate_from_center(&p7(), 1.0, 1.0, &bad).is_err());
}

#[test]
fn halving_tolerances_barely_moves_zero() {
    let cfg = IntegratorConfig::default();
    let fine = cfg.scaled_tolerances(0.5);
    for alpha in [0.5, 5.0, 50.0] {
        let z1 = integrate_from_center(&p7(), alpha, 2.0 * PI, &cfg).unwrap().first_zero().unwrap();
        let z2 = integrate_from_center(&p7(), alpha, 2.0 * PI, &fine).unwrap().first_zero().unwrap();
        assert!((z1 - z2).abs() < 10.0 * cfg.rtol.max(cfg.atol) * z1.max(1.0));
    }
}
