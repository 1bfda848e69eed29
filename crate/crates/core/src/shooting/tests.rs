use super::*;
use std::f64::consts::PI;

fn p7() -> ProblemParams {
    ProblemParams::new(3, 7.0, 1.0).unwrap()
}

fn cfg() -> IntegratorConfig {
    IntegratorConfig::default()
}

#[test]
fn zero_map_small_alpha_limit() {
    let noise = 10.0 * cfg().rtol * PI;
    let zs: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&a| zero_map(&p7(), a, &cfg()).unwrap()).collect();
    assert!((zs[2] - PI).abs() <= 1e-3);
    // for p = 7 the offset is of order alpha^6 and sits below the noise floor
    assert!(zs.windows(2).all(|w| (w[1] - PI).abs() <= (w[0] - PI).abs() + noise));
    let p3 = ProblemParams::new(3, 3.0, 1.0).unwrap();
    let gaps: Vec<f64> = [1e-2, 1e-3, 1e-4].iter().map(|&a| PI - zero_map(&p3, a, &cfg()).unwrap()).collect();
    assert!(gaps[0] > gaps[1] && gaps[1] > gaps[2] && gaps[2] > 0.0);
}

#[test]
fn zero_map_lambda_scaling() {
    let p4 = ProblemParams::new(3, 7.0, 4.0).unwrap();
    for alpha in [0.3, 2.0, 30.0] {
        let z4 = zero_map(&p4, alpha, &cfg()).unwrap();
        let z1 = zero_map(&p7(), alpha * 4f64.powf(-1.0 / 6.0), &cfg()).unwrap();
        assert!((2.0 * z4 - z1).abs() <= 1e-6, "{alpha}: {} vs {z1}", 2.0 * z4);
    }
}

#[test]
fn zero_map_approaches_singular_zero() {
    let rs = singular_zero(&p7(), SINGULAR_START, &cfg()).unwrap();
    for alpha in [1e2, 1e3, 1e4] {
        assert!((zero_map(&p7(), alpha, &cfg()).unwrap() - rs).abs() < 0.1);
    }
}

#[test]
fn zero_map_curve_oscillates_about_r_star() {
    let rs = singular_zero(&p7(), SINGULAR_START, &cfg()).unwrap();
    let curve = zero_map_curve(&p7(), &log_grid(10.0, 1e5, 120), Some(rs), &cfg());
    assert_eq!(curve.failures(), 0);
    assert!(curve.crossings().len() >= 2);
}

#[test]
fn no_ball_solution_above_first_eigenvalue() {
    let p = ProblemParams::new(3, 7.0, PI * PI * 1.01).unwrap();
    let set = count_ball_solutions(&p, 1.0, DEFAULT_ALPHA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert_eq!(set.count(), 0);
}

#[test]
fn ball_solution_inside_window() {
    let set = count_ball_solutions(&p7(), 3.0, DEFAULT_ALPHA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert!(set.count() >= 1);
    for s in &set.solutions {
        let z = zero_map(&p7(), s.param, &cfg()).unwrap();
        assert!((z - 3.0).abs() < 1e-9);
        assert!(s.outer_slope < 0.0);
        let e = s.energy.unwrap();
        assert!(e.identity_residual() < 1e-6, "{e:?}");
    }
}

#[test]
fn annulus_scan_is_sound() {
    let (a, b) = (0.5, 2.0);
    let set = count_annulus_solutions(&p7(), a, b, DEFAULT_BETA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert_eq!(set.count(), 1);
    assert_eq!(set.failed_points(), 0);
    let sol = &set.solutions[0];
    let prof = &sol.profile;
    assert_eq!(prof.span().0, a);
    assert!((prof.span().1 - b).abs() < 1e-9);
    assert!(prof.u().last().unwrap().abs() < 1e-9 * prof.max_abs_u());
    assert!(prof.u()[1..prof.len() - 1].iter().all(|&u| u > 0.0));
    for &(lo, hi) in &set.brackets {
        assert!(hi - lo <= REFINE_TOL * hi);
    }
    // the same solution seen from the outer boundary
    let gamma = -sol.outer_slope;
    let outer = count_annulus_solutions_with(
        &p7(),
        a,
        b,
        ShotParamKind::OuterSlope,
        (gamma / 100.0, gamma * 100.0),
        &ScanOptions::default(),
        &cfg(),
    )
    .unwrap();
    assert_eq!(outer.count(), 1);
    assert!((outer.solutions[0].param - gamma).abs() < 1e-6 * gamma);
    let e = sol.energy.unwrap();
    assert!(e.identity_residual() < 1e-6);
}

#[test]
fn no_solution_at_first_eigenvalue() {
    let ball = ProblemParams::new(3, 7.0, PI * PI).unwrap();
    let set = count_ball_solutions(&ball, 1.0, DEFAULT_ALPHA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert_eq!(set.count(), 0);
    let lam1 = crate::linear_modes::lambda1_annulus(3, 1.0, 2.0, crate::linear_modes::DEFAULT_EIGEN_TOL)
        .unwrap()
        .lambda1;
    let ann = ProblemParams::new(3, 7.0, lam1).unwrap();
    let set = count_annulus_solutions(&ann, 1.0, 2.0, DEFAULT_BETA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert_eq!(set.count(), 0);
}

#[test]
fn no_annulus_solution_above_first_eigenvalue() {
    let p = ProblemParams::new(3, 7.0, PI * PI * 1.01).unwrap();
    let set = count_annulus_solutions(&p, 1.0, 2.0, DEFAULT_BETA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert_eq!(set.count(), 0);
}

#[test]
fn rayleigh_quotient_properties() {
    let (a, b) = (0.05, 2.0);
    let set = count_annulus_solutions(&p7(), a, b, DEFAULT_BETA_RANGE, DEFAULT_GRID, &cfg()).unwrap();
    assert!(set.count() >= 1);
    let map = energy_map(&p7(), set.domain, &cfg()).unwrap();
    let sol = &set.solutions[0];
    let e = sol.energy.unwrap();
    let r = rayleigh_quotient_of_profile(&map, &sol.profile).unwrap();
    assert!((r - e.energy).abs() <= 1e-6 * e.energy);

    let c = e.c;
    let tent = Tent { c };
    let rw = rayleigh_quotient(&map, &tent, 64).unwrap();
    let bound = tent_bound(&map, c).unwrap();
    assert!(rw <= bound * (1.0 + 1e-9), "{rw} > {bound}");
    assert!((tent_bound_half_factor(&map, c).unwrap() - 0.25 * bound).abs() < 1e-12 * bound);
    let r2 = rayleigh_quotient(&map, &Scaled(&tent, 2.0), 64).unwrap();
    assert!((r2 - rw).abs() <= 1e-10 * rw);

    let tp = map.to_w(&sol.profile).unwrap();
    let pl = PiecewiseLinear {
        s: tp.s_nodes.clone(),
        w: tp.w.clone(),
    };
    let rp = rayleigh_quotient(&map, &pl, 1).unwrap();
    let rp2 = rayleigh_quotient(&map, &Scaled(&pl, 2.0), 1).unwrap();
    assert!((rp - rp2).abs() <= 1e-10 * rp);
    // the solution minimises among its own neighbours only up to discretisation
    assert!(rp >= e.energy * (1.0 - 1e-2));
}

#[test]
fn degenerate_trial_is_rejected() {
    let map = LiouvilleMap::new(&p7(), 2.0, 10.0, &cfg()).unwrap();
    let zero = Scaled(&Tent { c: 1.0 }, 0.0);
    assert!(matches!(rayleigh_quotient(&map, &zero, 8), Err(Error::Degenerate(_))));
}

#[test]
fn bad_ranges_rejected() {
    assert!(count_ball_solutions(&p7(), 3.0, (0.0, 1.0), 10, &cfg()).is_err());
    assert!(count_annulus_solutions(&p7(), 2.0, 1.0, (1.0, 2.0), 10, &cfg()).is_err());
    assert!(count_ball_solutions(&p7(), 3.0, (1.0, 2.0), 1, &cfg()).is_err());
}
