//! Linear radial problems: the regular solution `phi` of
//! `phi'' + ((N-1)/r) phi' + lambda phi = 0` and first Dirichlet eigenvalues
//! of balls and annuli found by Sturm-Liouville shooting.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{bisect_predicate, brent};
use crate::radial_ode::{
    center_solve, solve, IntegratorConfig, OutcomeKind, ProblemParams, RadialEquation, RadialProfile, StartKind,
};

/// Default relative width of the final eigenvalue bracket.
pub const DEFAULT_EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Clone)]
pub struct EigenResult {
    pub lambda1: f64,
    /// Eigenfunction on the closed domain, normalised by `phi(0) = 1` for
    /// balls and `phi'(a) = 1` for annuli.
    pub eigen_profile: RadialProfile,
    /// Final bisection bracket: no interior zero at `lo`, one at `hi`.
    pub bracket: (f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Domain {
    Ball { b: f64 },
    Annulus { a: f64, b: f64 },
}

impl Domain {
    pub fn validate(&self) -> Result<()> {
        match *self {
            Domain::Ball { b } if b > 0.0 && b.is_finite() => Ok(()),
            Domain::Annulus { a, b } if a > 0.0 && b > a && b.is_finite() => Ok(()),
            Domain::Ball { b } => Err(Error::Precondition(format!("need b > 0, got {b}"))),
            Domain::Annulus { a, b } => Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}"))),
        }
    }

    pub fn outer(&self) -> f64 {
        match *self {
            Domain::Ball { b } | Domain::Annulus { b, .. } => b,
        }
    }

    pub fn inner(&self) -> f64 {
        match *self {
            Domain::Ball { .. } => 0.0,
            Domain::Annulus { a, .. } => a,
        }
    }
}

/// `phi` with `phi(0) = 1`, `phi'(0) = 0` on `[0, horizon]`. The nonlinear
/// exponent in `params` is ignored.
pub fn solve_phi(params: &ProblemParams, horizon: f64, cfg: &IntegratorConfig) -> Result<RadialProfile> {
    let eq = RadialEquation::linear(params.dim, params.lambda);
    let out = center_solve(&eq, 1.0, horizon, cfg, false)?;
    match out.kind {
        OutcomeKind::Failed(reason) => Err(reason.into()),
        _ => Ok(out.profile),
    }
}

/// First zero of `phi` on `(0, horizon]`, if any.
pub fn phi_first_zero(dim: u32, lambda: f64, horizon: f64, cfg: &IntegratorConfig) -> Result<Option<f64>> {
    let eq = RadialEquation::linear(dim, lambda);
    let out = center_solve(&eq, 1.0, horizon, cfg, true)?;
    shot_zero(out.kind)
}

fn shot_zero(kind: OutcomeKind) -> Result<Option<f64>> {
    match kind {
        OutcomeKind::FirstZero { radius, .. } => Ok(Some(radius)),
        OutcomeKind::PositiveAtHorizon { .. } => Ok(None),
        OutcomeKind::Failed(reason) => Err(reason.into()),
    }
}

/// Linear shot for the domain; `stop_at_zero` selects event mode.
fn linear_shot(dim: u32, lambda: f64, domain: Domain, cfg: &IntegratorConfig, stop_at_zero: bool) -> Result<(OutcomeKind, RadialProfile)> {
    let eq = RadialEquation::linear(dim, lambda);
    let out = match domain {
        Domain::Ball { b } => center_solve(&eq, 1.0, b, cfg, stop_at_zero)?,
        Domain::Annulus { a, b } => solve(&eq, a, [0.0, 1.0], b, 1e-6 * (b - a), cfg, StartKind::InnerBoundary, stop_at_zero),
    };
    Ok((out.kind, out.profile))
}

/// Whether the linear shot with coefficient `lambda` has a zero inside the
/// domain (before or at the outer radius).
pub fn has_interior_zero(dim: u32, lambda: f64, domain: Domain, cfg: &IntegratorConfig) -> Result<bool> {
    let (kind, _) = linear_shot(dim, lambda, domain, cfg, true)?;
    Ok(shot_zero(kind)?.is_some())
}

fn outer_value(dim: u32, lambda: f64, domain: Domain, cfg: &IntegratorConfig) -> Result<f64> {
    let (kind, profile) = linear_shot(dim, lambda, domain, cfg, false)?;
    if let OutcomeKind::Failed(reason) = kind {
        return Err(reason.into());
    }
    Ok(*profile.u().last().expect("nonempty profile"))
}

/// First Dirichlet eigenvalue of the ball of radius `b` in dimension `dim`.
pub fn lambda1_ball(dim: u32, b: f64, tol: f64) -> Result<EigenResult> {
    lambda1(dim, Domain::Ball { b }, tol, &IntegratorConfig::default())
}

/// First Dirichlet eigenvalue of the annulus `a < r < b` in dimension `dim`.
pub fn lambda1_annulus(dim: u32, a: f64, b: f64, tol: f64) -> Result<EigenResult> {
    lambda1(dim, Domain::Annulus { a, b }, tol, &IntegratorConfig::default())
}

/// Eigenvalue by bisection on the "zero inside" predicate, widened
/// geometrically until it brackets, then polished by Brent on `phi(b)`.
pub fn lambda1(dim: u32, domain: Domain, tol: f64, cfg: &IntegratorConfig) -> Result<EigenResult> {
    if dim < 2 {
        return Err(Error::InvalidParams(format!("N must be >= 2, got {dim}")));
    }
    domain.validate()?;
    if !(tol > 0.0) {
        return Err(Error::InvalidParams(format!("eigen tolerance must be > 0, got {tol}")));
    }
    let width = domain.outer() - domain.inner();
    let guess = PI * PI / (width * width);
    let (mut lo, mut hi) = (0.1 * guess, 4.0 * guess);
    let zero_at = |lam: f64| has_interior_zero(dim, lam, domain, cfg);
    for _ in 0..60 {
        if !zero_at(lo)? {
            break;
        }
        lo *= 0.25;
    }
    for _ in 0..60 {
        if zero_at(hi)? {
            break;
        }
        hi *= 4.0;
    }
    if zero_at(lo)? || !zero_at(hi)? {
        return Err(Error::Bracket { lo, hi });
    }

    let mut failure = None;
    let (lo, hi) = bisect_predicate(
        |lam| match zero_at(lam) {
            Ok(z) => z,
            Err(e) => {
                failure.get_or_insert(e);
                true
            }
        },
        lo,
        hi,
        tol * lo,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }

    // phi(b) changes sign across the bracket; a failed polish keeps the midpoint
    let phi_b = |lam: f64| outer_value(dim, lam, domain, cfg).unwrap_or(f64::NAN);
    let (flo, fhi) = (phi_b(lo), phi_b(hi));
    let lambda1 = if flo.is_finite() && fhi.is_finite() && flo > 0.0 && fhi <= 0.0 {
        brent(phi_b, lo, hi, 4.0 * f64::EPSILON * hi, 0.0, 100).unwrap_or(0.5 * (lo + hi))
    } else {
        0.5 * (lo + hi)
    };
    let (_, eigen_profile) = linear_shot(dim, lambda1, domain, cfg, false)?;
    Ok(EigenResult {
        lambda1,
        eigen_profile,
        bracket: (lo, hi),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bessel_j0(x: f64) -> f64 {
        // power series, adequate for x < 10
        let q = -0.25 * x * x;
        let mut term = 1.0;
        let mut sum = 1.0;
        for k in 1..60 {
            term *= q / (k as f64 * k as f64);
            sum += term;
        }
        sum
    }

    fn j0_first_zero() -> f64 {
        let (mut lo, mut hi) = (2.0, 3.0);
        for _ in 0..100 {
            let mid = 0.5 * (lo + hi);
            if bessel_j0(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn bessel_oracle_matches_tabulated_zero() {
        assert!((j0_first_zero() - 2.404825557695773).abs() < 1e-14);
    }

    #[test]
    fn phi_closed_form_three_dims() {
        let cfg = IntegratorConfig::default();
        for lam in [1.0f64, 2.0] {
            let params = ProblemParams::new(3, 7.0, lam).unwrap();
            let prof = solve_phi(&params, 5.0, &cfg).unwrap();
            let k = lam.sqrt();
            let mut worst: f64 = 0.0;
            for i in 0..=1000 {
                let r = 5.0 * i as f64 / 1000.0;
                let exact = if r == 0.0 { 1.0 } else { (k * r).sin() / (k * r) };
                worst = worst.max((prof.eval(r).unwrap().0 - exact).abs());
            }
            assert!(worst < 1e-8, "lambda {lam}: {worst}");
        }
    }

    #[test]
    fn phi_initial_data() {
        let params = ProblemParams::new(4, 3.0, 2.5).unwrap();
        let prof = solve_phi(&params, 1.0, &IntegratorConfig::default()).unwrap();
        assert_eq!(prof.eval(0.0), Some((1.0, 0.0)));
    }

    #[test]
    fn phi_two_dims_zero_is_bessel_zero() {
        let z = phi_first_zero(2, 1.0, 5.0, &IntegratorConfig::default()).unwrap().unwrap();
        assert!((z - j0_first_zero()).abs() < 1e-8);
    }

    #[test]
    fn ball_and_annulus_eigenvalues() {
        let pi2 = PI * PI;
        let r = lambda1_ball(3, 1.0, DEFAULT_EIGEN_TOL).unwrap();
        assert!((r.lambda1 - pi2).abs() / pi2 < 1e-8);
        let r = lambda1_ball(3, 2.0, DEFAULT_EIGEN_TOL).unwrap();
        assert!((r.lambda1 - pi2 / 4.0).abs() / pi2 < 1e-8);
        let r = lambda1_annulus(3, 0.5, 1.5, DEFAULT_EIGEN_TOL).unwrap();
        assert!((r.lambda1 - pi2).abs() / pi2 < 1e-8);
        let j = j0_first_zero();
        let r = lambda1_ball(2, 1.0, DEFAULT_EIGEN_TOL).unwrap();
        assert!((r.lambda1 - j * j).abs() < 1e-6);
    }

    #[test]
    fn eigen_profile_vanishes_at_the_ends() {
        let r = lambda1_annulus(3, 1.0, 2.0, DEFAULT_EIGEN_TOL).unwrap();
        let p = &r.eigen_profile;
        assert_eq!(p.u()[0], 0.0);
        assert!(p.u().last().unwrap().abs() < 1e-9);
        let interior = &p.u()[1..p.len() - 1];
        assert!(interior.iter().all(|&v| v > 0.0));
        let (lo, hi) = r.bracket;
        assert!(hi - lo <= DEFAULT_EIGEN_TOL * hi);
    }

    #[test]
    fn sturm_ordering_across_bracket() {
        let cfg = IntegratorConfig::default();
        let dom = Domain::Annulus { a: 1.0, b: 2.0 };
        let r = lambda1(2, dom, DEFAULT_EIGEN_TOL, &cfg).unwrap();
        assert!(!has_interior_zero(2, r.bracket.0, dom, &cfg).unwrap());
        assert!(has_interior_zero(2, r.bracket.1, dom, &cfg).unwrap());
    }

    #[test]
    fn bad_domains_rejected() {
        assert!(lambda1_annulus(3, 2.0, 1.0, 1e-9).is_err());
        assert!(lambda1_ball(3, 0.0, 1e-9).is_err());
        assert!(lambda1_ball(1, 1.0, 1e-9).is_err());
    }
}
