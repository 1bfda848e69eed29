//! Closed-form region geometry for the three-dimensional super-critical
//! problem: the radius `r0`, the boundary curves `phi1`-`phi3`, the `(a, b)`
//! classifier, the Joseph-Lundgren exponent and the Pohozaev-type functions
//! `A, G, H, Z` with the functional `J`.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{brent, lin_grid, sign_changes};
use crate::radial_ode::{ProblemParams, RadialProfile};

/// `sqrt(2((N-2)p+N-4)((N-2)p-(N+2)) / (lambda (p-1) (p+3)^2))`.
pub fn r0(params: &ProblemParams) -> Result<f64> {
    let n = params.dim as f64;
    let p = params.p;
    if params.dim < 3 || !params.super_critical() {
        return Err(Error::Precondition(format!(
            "r0 needs N >= 3 and p > (N+2)/(N-2), got N = {}, p = {p}",
            params.dim
        )));
    }
    let num = 2.0 * ((n - 2.0) * p + n - 4.0) * ((n - 2.0) * p - (n + 2.0));
    let den = params.lambda * (p - 1.0) * (p + 3.0) * (p + 3.0);
    Ok((num / den).sqrt())
}

fn check_three_dim(p: f64, lambda: f64) -> Result<()> {
    if !(p > 5.0 && p.is_finite()) {
        return Err(Error::Precondition(format!("need p > 5, got {p}")));
    }
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::Precondition(format!("need lambda > 0, got {lambda}")));
    }
    Ok(())
}

/// `arccos(-sqrt((p-5)/(p+3)))`, in `(pi/2, pi)` for `p > 5`.
fn tangency_angle(p: f64) -> f64 {
    (-((p - 5.0) / (p + 3.0)).sqrt()).acos()
}

/// `2 sqrt(2(p-5))/(p+3) + arccos(-sqrt((p-5)/(p+3)))`, the dimensionless
/// intercept of `phi3` and the lower end of the ball window.
pub fn window_constant(p: f64) -> f64 {
    2.0 * (2.0 * (p - 5.0)).sqrt() / (p + 3.0) + tangency_angle(p)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PhiBoundaries {
    pub phi1: f64,
    /// `a + arccos(..)/sqrt(lambda)`, the reading that passes through the
    /// common point at `a = r0`.
    pub phi2: f64,
    /// `a + arccos(..)/pi`, which agrees with `phi2` only at `lambda = pi^2`.
    pub phi2_literal: f64,
    pub phi3: f64,
}

pub fn phi_boundaries(p: f64, lambda: f64, a: f64) -> Result<PhiBoundaries> {
    check_three_dim(p, lambda)?;
    if !(a >= 0.0 && a.is_finite()) {
        return Err(Error::Precondition(format!("need a >= 0, got {a}")));
    }
    let k = lambda.sqrt();
    let theta = tangency_angle(p);
    Ok(PhiBoundaries {
        phi1: a + PI / k - (2.0 * (p + 3.0) * k * a / (p - 5.0)).atan() / k,
        phi2: a + theta / k,
        phi2_literal: a + theta / PI,
        phi3: -a + window_constant(p) / k,
    })
}

/// `d phi1 / da`.
pub fn phi1_slope(p: f64, lambda: f64, a: f64) -> f64 {
    let c = 2.0 * (p + 3.0) * lambda.sqrt() / (p - 5.0);
    1.0 - c / (lambda.sqrt() * (1.0 + (c * a).powi(2)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Case {
    CaseI,
    CaseII,
    CaseIII,
    GapS,
    NotApplicable,
}

/// The case split of the `Z` sign argument.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Subcase {
    A,
    B,
    Ci,
    Cii,
    Ciii,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundaryValues {
    pub r0: f64,
    pub phi1: f64,
    pub phi2: f64,
    pub phi2_literal: f64,
    pub phi3: f64,
    pub pi_over_sqrt_lambda: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RegionVerdict {
    pub case: Case,
    pub subcase: Option<Subcase>,
    pub uniqueness_guaranteed: bool,
    pub boundary_values: BoundaryValues,
}

fn check_classifier_params(params: &ProblemParams) -> Result<()> {
    if params.dim != 3 {
        return Err(Error::Precondition(format!("the region machinery is three-dimensional, got N = {}", params.dim)));
    }
    check_three_dim(params.p, params.lambda)
}

/// Classify `(a, b)`. Points on a boundary curve belong to the uniqueness
/// side. `NotApplicable` means `sqrt(lambda)(b - a) >= pi`, where no positive
/// solution exists.
pub fn classify(params: &ProblemParams, a: f64, b: f64) -> Result<RegionVerdict> {
    check_classifier_params(params)?;
    if !(a > 0.0 && b > a && b.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    let (p, lambda) = (params.p, params.lambda);
    let r0 = r0(params)?;
    let phi = phi_boundaries(p, lambda, a)?;
    let span = PI / lambda.sqrt();
    let boundary_values = BoundaryValues {
        r0,
        phi1: phi.phi1,
        phi2: phi.phi2,
        phi2_literal: phi.phi2_literal,
        phi3: phi.phi3,
        pi_over_sqrt_lambda: span,
    };
    let case = if b - a >= span {
        Case::NotApplicable
    } else if !(a < r0 && r0 < b) {
        Case::CaseI
    } else if phi.phi1 <= b {
        Case::CaseII
    } else if b <= phi.phi3 {
        Case::CaseIII
    } else {
        Case::GapS
    };
    let subcase = if case == Case::NotApplicable { None } else { subcase(p, lambda, a, b) };
    Ok(RegionVerdict {
        case,
        subcase,
        uniqueness_guaranteed: matches!(case, Case::CaseI | Case::CaseII | Case::CaseIII),
        boundary_values,
    })
}

/// Case of the `Z` sign argument holding at `(a, b)`, or `None` inside the
/// gap. Assumes `0 < sqrt(lambda)(b - a) < pi`.
pub fn subcase(p: f64, lambda: f64, a: f64, b: f64) -> Option<Subcase> {
    let k = lambda.sqrt();
    if a + b >= PI / k {
        return Some(Subcase::A);
    }
    if b - a <= PI / (2.0 * k) {
        return Some(Subcase::B);
    }
    if b <= a + tangency_angle(p) / k {
        return Some(Subcase::Ci);
    }
    let phi3 = -a + window_constant(p) / k;
    if b <= phi3 {
        return Some(Subcase::Cii);
    }
    let phi1 = a + (PI - (2.0 * (p + 3.0) * k * a / (p - 5.0)).atan()) / k;
    if b >= phi1 {
        return Some(Subcase::Ciii);
    }
    None
}

/// Tangency radius of case (C): `(a + b - arccos(..)/sqrt(lambda)) / 2`.
pub fn r1(p: f64, lambda: f64, a: f64, b: f64) -> f64 {
    0.5 * (a + b - tangency_angle(p) / lambda.sqrt())
}

/// `2k/cos^2(k(2 r1 - a - b)) - 2k(p+3)/(p-5)` relative to the right side.
pub fn r1_tangency_residual(p: f64, lambda: f64, a: f64, b: f64) -> f64 {
    let k = lambda.sqrt();
    let r = r1(p, lambda, a, b);
    let lhs = 2.0 * k / (k * (2.0 * r - a - b)).cos().powi(2);
    let rhs = 2.0 * k * (p + 3.0) / (p - 5.0);
    (lhs - rhs).abs() / rhs
}

/// Joseph-Lundgren exponent; infinite for `3 <= N <= 10`.
pub fn jl_exponent(dim: u32) -> Result<f64> {
    match dim {
        0..=2 => Err(Error::Precondition(format!("need N >= 3, got {dim}"))),
        3..=10 => Ok(f64::INFINITY),
        _ => {
            let n = dim as f64;
            Ok(1.0 + 4.0 / (n - 4.0 - 2.0 * (n - 1.0).sqrt()))
        }
    }
}

/// Ball radii (at fixed `lambda`) and coefficients (at fixed `b`) between
/// the uniqueness threshold and the first eigenvalue.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorollaryWindow {
    pub b_lo: f64,
    pub b_hi: f64,
    pub lambda_lo: f64,
    pub lambda_hi: f64,
}

pub fn corollary_window(p: f64, lambda: f64, b: f64) -> Result<CorollaryWindow> {
    check_three_dim(p, lambda)?;
    if !(b > 0.0 && b.is_finite()) {
        return Err(Error::Precondition(format!("need b > 0, got {b}")));
    }
    let e = window_constant(p);
    let k = lambda.sqrt();
    Ok(CorollaryWindow {
        b_lo: e / k,
        b_hi: PI / k,
        lambda_lo: e * e / (b * b),
        lambda_hi: PI * PI / (b * b),
    })
}

/// `A(r) = (ab/lambda) r^2 sin(k(r-a)) sin(k(b-r))` with `k = sqrt(lambda)`,
/// and the quantities built from it (three dimensions).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PohozaevFns {
    pub p: f64,
    pub lambda: f64,
    pub a: f64,
    pub b: f64,
}

const DIM: f64 = 3.0;

impl PohozaevFns {
    pub fn new(p: f64, lambda: f64, a: f64, b: f64) -> Result<Self> {
        check_three_dim(p, lambda)?;
        if !(a > 0.0 && b > a && b.is_finite()) {
            return Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}")));
        }
        Ok(Self { p, lambda, a, b })
    }

    fn k(&self) -> f64 {
        self.lambda.sqrt()
    }

    /// `A, A', A'', A'''` at `r`.
    pub fn a_derivs(&self, r: f64) -> [f64; 4] {
        let k = self.k();
        let c = self.a * self.b / self.lambda;
        let theta = k * (2.0 * r - self.a - self.b);
        let (s, co) = theta.sin_cos();
        // sin(k(r-a)) sin(k(b-r)) = (cos(theta) - cos(k(b-a))) / 2
        let q = 0.5 * (co - (k * (self.b - self.a)).cos());
        let q1 = -k * s;
        let q2 = -2.0 * k * k * co;
        let q3 = 4.0 * k * k * k * s;
        [
            c * r * r * q,
            c * (2.0 * r * q + r * r * q1),
            c * (2.0 * q + 4.0 * r * q1 + r * r * q2),
            c * (6.0 * q1 + 6.0 * r * q2 + r * r * q3),
        ]
    }

    pub fn a_fn(&self, r: f64) -> f64 {
        self.a_derivs(r)[0]
    }

    fn g_terms(&self, r: f64) -> [f64; 4] {
        let [a0, a1, a2, a3] = self.a_derivs(r);
        let n = DIM;
        let lam = self.lambda;
        let den = 4.0 * r * r * r;
        [
            r * r * r * a3 / den,
            -3.0 * (n - 1.0) * r * r * a2 / den,
            ((n - 1.0) * (2.0 * n + 3.0) * r + 4.0 * lam * r * r * r) * a1 / den,
            -4.0 * (n - 1.0) * (n + lam * r * r) * a0 / den,
        ]
    }

    /// Coefficient of `u^2` in `dJ/dr`.
    pub fn g(&self, r: f64) -> f64 {
        self.g_terms(r).iter().sum()
    }

    /// Sum of the magnitudes of the terms of `G`, the scale for relative checks.
    pub fn g_scale(&self, r: f64) -> f64 {
        self.g_terms(r).iter().map(|t| t.abs()).sum()
    }

    /// Coefficient of `u^{p+1}` in `dJ/dr`.
    pub fn h(&self, r: f64) -> f64 {
        let [a0, a1, ..] = self.a_derivs(r);
        -(DIM - 1.0) * a0 / r + (self.p + 3.0) * a1 / (2.0 * (self.p + 1.0))
    }

    /// `H` rebuilt from `Z`: `ab r / (2 lambda (p+1)) Z(r)`.
    pub fn h_from_z(&self, r: f64) -> f64 {
        self.a * self.b * r / (2.0 * self.lambda * (self.p + 1.0)) * self.z(r)
    }

    pub fn z(&self, r: f64) -> f64 {
        let k = self.k();
        let p = self.p;
        -k * (p + 3.0) * r * (k * (2.0 * r - self.a - self.b)).sin()
            - 2.0 * (p - 1.0) * (k * (self.b - r)).sin() * (k * (r - self.a)).sin()
    }

    pub fn z_r(&self, r: f64) -> f64 {
        let k = self.k();
        let p = self.p;
        let theta = k * (2.0 * r - self.a - self.b);
        -2.0 * self.lambda * (p + 3.0) * r * theta.cos() + k * (p - 5.0) * theta.sin()
    }

    /// The functional `J(r; u)` from `u(r)` and `u'(r)`.
    pub fn j(&self, r: f64, u: f64, up: f64) -> f64 {
        let [a0, a1, a2, _] = self.a_derivs(r);
        let n = DIM;
        0.5 * a0 * up * up
            + (-0.5 * a1 + (n - 1.0) / r * a0) * up * u
            + 0.25 * (a2 - 3.0 * (n - 1.0) / r * a1 + 2.0 * n * (n - 1.0) / (r * r) * a0) * u * u
            + 0.5 * self.lambda * a0 * u * u
            + a0 * u.abs().powf(self.p + 1.0) / (self.p + 1.0)
    }

    /// Right side of the identity, `G u^2 + H |u|^{p+1}`.
    pub fn dj_dr(&self, r: f64, u: f64) -> f64 {
        self.g(r) * u * u + self.h(r) * u.abs().powf(self.p + 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PohozaevReport {
    /// Number of uniform cells on `[a, b]`.
    pub cells: usize,
    /// Largest mismatch between the differenced `J` and `G u^2 + H u^{p+1}`.
    pub max_abs_residual: f64,
    /// Largest `|G u^2 + H u^{p+1}|` on the grid.
    pub scale: f64,
    pub relative_residual: f64,
}

/// Differentiates `J` by the five-point central stencil on `cells` uniform cells of
/// `[a, b]`, reading `u, u'` from the dense profile, and compares with the
/// closed-form right side at the interior grid points.
pub fn pohozaev_eval(fns: &PohozaevFns, profile: &RadialProfile, cells: usize) -> Result<PohozaevReport> {
    if cells < 4 {
        return Err(Error::InvalidParams(format!("need at least 4 cells, got {cells}")));
    }
    let (lo, hi) = profile.span();
    let tol = 1e-9 * fns.b;
    if (lo - fns.a).abs() > tol || (hi - fns.b).abs() > tol {
        return Err(Error::Precondition(format!("profile spans [{lo}, {hi}], expected [{}, {}]", fns.a, fns.b)));
    }
    let grid = lin_grid(fns.a, fns.b, cells + 1);
    let h = (fns.b - fns.a) / cells as f64;
    let mut j = Vec::with_capacity(grid.len());
    let mut u = Vec::with_capacity(grid.len());
    for &r in &grid {
        let r = r.clamp(lo, hi);
        let (ur, upr) = profile.eval(r).ok_or_else(|| Error::Domain(format!("profile undefined at r = {r}")))?;
        j.push(fns.j(r, ur, upr));
        u.push(ur);
    }
    let mut max_abs_residual: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for i in 2..cells - 1 {
        let fd = (j[i - 2] - 8.0 * j[i - 1] + 8.0 * j[i + 1] - j[i + 2]) / (12.0 * h);
        let exact = fns.dj_dr(grid[i], u[i]);
        max_abs_residual = max_abs_residual.max((fd - exact).abs());
        scale = scale.max(exact.abs());
    }
    Ok(PohozaevReport {
        cells,
        max_abs_residual,
        scale,
        relative_residual: max_abs_residual / scale,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZSignReport {
    /// Refined location of the sign change, when exactly one was found.
    pub kappa: Option<f64>,
    pub sign_changes: usize,
    pub single_change: bool,
}

/// Samples `Z` at `n_samples` uniform points of `[a, b]` and counts sign changes.
pub fn z_sign_structure(p: f64, lambda: f64, a: f64, b: f64, n_samples: usize) -> Result<ZSignReport> {
    let fns = PohozaevFns::new(p, lambda, a, b)?;
    if lambda * (b - a) * (b - a) >= PI * PI {
        return Err(Error::Precondition(format!("need lambda (b-a)^2 < pi^2, got {}", lambda * (b - a) * (b - a))));
    }
    if n_samples < 2 {
        return Err(Error::InvalidParams(format!("need at least 2 samples, got {n_samples}")));
    }
    let grid = lin_grid(a, b, n_samples);
    let values: Vec<f64> = grid.iter().map(|&r| fns.z(r)).collect();
    let changes = sign_changes(&values);
    let kappa = match changes.as_slice() {
        [i] => Some(brent(|r| fns.z(r), grid[*i], grid[i + 1], 1e-14 * b, 0.0, 200)?),
        _ => None,
    };
    Ok(ZSignReport {
        kappa,
        sign_changes: changes.len(),
        single_change: changes.len() == 1,
    })
}

#[cfg(test)]
mod tests;
