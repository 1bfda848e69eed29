//! Initial value solves for the radial semilinear equation
//!
//! ```text
//! u'' + ((N-1)/r) u' + lambda u + |u|^(p-1) u = 0
//! ```
//!
//! started from the center, from the inner boundary of an annulus, backward
//! from its outer boundary, or from the leading-order asymptotics of the
//! singular solution. Every solve stops at the first zero of `u` in the
//! direction of travel.

mod dopri;
mod profile;

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
pub(crate) use dopri::{integrate, State, StepOptions, Termination};
pub use profile::{RadialProfile, StartKind};

/// Dimension, exponent and linear coefficient of the equation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProblemParams {
    pub dim: u32,
    pub p: f64,
    pub lambda: f64,
}

impl ProblemParams {
    pub fn new(dim: u32, p: f64, lambda: f64) -> Result<Self> {
        if dim < 2 {
            return Err(Error::InvalidParams(format!("N must be >= 2, got {dim}")));
        }
        if !(p > 1.0) || !p.is_finite() {
            return Err(Error::InvalidParams(format!("p must be > 1, got {p}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(Error::InvalidParams(format!("lambda must be > 0, got {lambda}")));
        }
        Ok(Self { dim, p, lambda })
    }

    /// `(N+2)/(N-2)`, infinite for `N = 2`.
    pub fn sobolev_exponent(&self) -> f64 {
        if self.dim <= 2 {
            f64::INFINITY
        } else {
            (self.dim as f64 + 2.0) / (self.dim as f64 - 2.0)
        }
    }

    pub fn super_critical(&self) -> bool {
        self.dim >= 3 && self.p > self.sobolev_exponent()
    }

    pub(crate) fn equation(&self) -> RadialEquation {
        RadialEquation::nonlinear(self.dim, self.lambda, self.p)
    }
}

/// Solver knobs shared by every initial value solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    /// Initial step; chosen from the start data when `None`.
    pub h0: Option<f64>,
    /// Multiplier on `pi/sqrt(lambda)` giving the default shooting horizon.
    pub horizon_factor: f64,
    /// Center start radius, relative to the local length scale.
    pub series_radius: f64,
    /// `|u|` above this aborts the solve.
    pub overflow_guard: f64,
    pub max_steps: usize,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self {
            rtol: 1e-10,
            atol: 1e-12,
            h0: None,
            horizon_factor: 2.0,
            series_radius: 1e-6,
            overflow_guard: 1e12,
            max_steps: 2_000_000,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.rtol > 0.0 && self.atol > 0.0) {
            return Err(Error::InvalidParams("rtol and atol must be > 0".into()));
        }
        if !(self.series_radius > 0.0) {
            return Err(Error::InvalidParams("series_radius must be > 0".into()));
        }
        if !(self.horizon_factor > 0.0) {
            return Err(Error::InvalidParams("horizon_factor must be > 0".into()));
        }
        if let Some(h0) = self.h0 {
            if !(h0 > 0.0) {
                return Err(Error::InvalidParams("h0 must be > 0".into()));
            }
        }
        Ok(())
    }

    /// Same configuration with both tolerances scaled by `factor`.
    pub fn scaled_tolerances(&self, factor: f64) -> Self {
        Self {
            rtol: self.rtol * factor,
            atol: self.atol * factor,
            ..*self
        }
    }

    /// Copy with `atol` scaled down for solutions of amplitude `scale < 1`.
    pub(crate) fn for_amplitude(&self, scale: f64) -> Self {
        Self {
            atol: self.atol * scale.clamp(f64::MIN_POSITIVE, 1.0),
            ..*self
        }
    }

    fn step_options(&self, h0: f64) -> StepOptions {
        StepOptions {
            rtol: self.rtol,
            atol: self.atol,
            h0: self.h0.unwrap_or(h0),
            overflow_guard: self.overflow_guard,
            max_steps: self.max_steps,
        }
    }
}

/// Why a solve was abandoned.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum FailReason {
    StepUnderflow { radius: f64 },
    Overflow { radius: f64 },
    MaxSteps,
    NoZeroBeforeHorizon { horizon: f64 },
}

impl fmt::Display for FailReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailReason::StepUnderflow { radius } => write!(f, "step size underflow at r = {radius}"),
            FailReason::Overflow { radius } => write!(f, "overflow guard exceeded at r = {radius}"),
            FailReason::MaxSteps => write!(f, "step budget exhausted"),
            FailReason::NoZeroBeforeHorizon { horizon } => write!(f, "no zero before horizon {horizon}"),
        }
    }
}

/// Classified end of one solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum OutcomeKind {
    /// First zero in the direction of travel. `slope` is the derivative of
    /// `u` along that direction, so a transversal crossing has `slope < 0`.
    FirstZero { radius: f64, slope: f64 },
    PositiveAtHorizon { horizon: f64 },
    Failed(FailReason),
}

#[derive(Debug, Clone)]
pub struct ShootingOutcome {
    pub kind: OutcomeKind,
    pub profile: RadialProfile,
}

impl ShootingOutcome {
    pub fn first_zero(&self) -> Option<f64> {
        match self.kind {
            OutcomeKind::FirstZero { radius, .. } => Some(radius),
            _ => None,
        }
    }

    pub fn is_failed(&self) -> bool {
        matches!(self.kind, OutcomeKind::Failed(_))
    }
}

/// Right-hand side of the radial equation, optionally without the power term.
#[derive(Debug, Clone, Copy)]
pub(crate) struct RadialEquation {
    pub dim: u32,
    pub lambda: f64,
    pub power: Option<f64>,
    int_power: Option<i32>,
}

impl RadialEquation {
    pub fn nonlinear(dim: u32, lambda: f64, p: f64) -> Self {
        let pm1 = p - 1.0;
        let int_power = (pm1.fract() == 0.0 && pm1 <= 64.0).then_some(pm1 as i32);
        Self {
            dim,
            lambda,
            power: Some(p),
            int_power,
        }
    }

    pub fn linear(dim: u32, lambda: f64) -> Self {
        Self {
            dim,
            lambda,
            power: None,
            int_power: None,
        }
    }

    /// `lambda u + |u|^(p-1) u`.
    #[inline]
    pub fn source(&self, u: f64) -> f64 {
        let nl = match (self.int_power, self.power) {
            (Some(k), _) => u.abs().powi(k) * u,
            (None, Some(p)) => u.abs().powf(p - 1.0) * u,
            (None, None) => 0.0,
        };
        self.lambda * u + nl
    }

    #[inline]
    pub fn rhs(&self, r: f64, y: &State) -> State {
        [y[1], -((self.dim - 1) as f64) / r * y[1] - self.source(y[0])]
    }

    /// `u''` implied by the equation at `(r, u, u')`.
    pub fn second_derivative(&self, r: f64, u: f64, up: f64) -> f64 {
        self.rhs(r, &[u, up])[1]
    }

    /// Local length scale of a center start with value `alpha`.
    pub fn center_length_scale(&self, alpha: f64) -> f64 {
        let growth = match self.power {
            Some(p) => alpha.abs().powf(p - 1.0),
            None => 0.0,
        };
        let k = self.lambda + growth;
        if k > 0.0 {
            1.0 / k.sqrt()
        } else {
            1.0
        }
    }

    /// Series seed `(eps, u(eps), u'(eps))` of the regular solution with `u(0) = alpha`.
    pub fn center_seed(&self, alpha: f64, series_radius: f64) -> (f64, State) {
        let eps = series_radius * self.center_length_scale(alpha);
        let curvature = self.source(alpha) / self.dim as f64;
        (eps, [alpha - 0.5 * curvature * eps * eps, -curvature * eps])
    }
}

/// Run an equation and classify the result.
pub(crate) fn solve(
    eq: &RadialEquation,
    r_start: f64,
    y_start: State,
    r_end: f64,
    h0: f64,
    cfg: &IntegratorConfig,
    kind: StartKind,
    stop_at_zero: bool,
) -> ShootingOutcome {
    let opts = cfg.step_options(h0);
    let run = integrate(|r, y| eq.rhs(r, y), r_start, y_start, r_end, &opts, stop_at_zero);
    let kind_out = match run.termination {
        Termination::Reached => OutcomeKind::PositiveAtHorizon { horizon: r_end },
        Termination::Zero { r, state } => OutcomeKind::FirstZero {
            radius: r,
            slope: state[1] * (r_end - r_start).signum(),
        },
        Termination::Failed(reason) => OutcomeKind::Failed(reason),
    };
    ShootingOutcome {
        kind: kind_out,
        profile: RadialProfile::from_run(&run, kind),
    }
}

/// Default shooting horizon `horizon_factor * pi / sqrt(lambda)`.
pub fn default_horizon(params: &ProblemParams, cfg: &IntegratorConfig) -> f64 {
    cfg.horizon_factor * std::f64::consts::PI / params.lambda.sqrt()
}

/// Regular solution with `u(0) = alpha`, `u'(0) = 0`.
pub fn integrate_from_center(
    params: &ProblemParams,
    alpha: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<ShootingOutcome> {
    cfg.validate()?;
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::Precondition(format!("alpha must be > 0, got {alpha}")));
    }
    let eq = params.equation();
    center_solve(&eq, alpha, horizon, cfg, true)
}

/// Center start for any radial equation; the profile includes the series cap
/// on `[0, eps]`.
pub(crate) fn center_solve(
    eq: &RadialEquation,
    alpha: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
    stop_at_zero: bool,
) -> Result<ShootingOutcome> {
    let (eps, seed) = eq.center_seed(alpha, cfg.series_radius);
    if !(horizon > eps) {
        return Err(Error::Precondition(format!("horizon {horizon} must exceed the start radius {eps}")));
    }
    let cfg = cfg.for_amplitude(alpha.abs());
    let mut out = solve(eq, eps, seed, horizon, eps, &cfg, StartKind::Center, stop_at_zero);
    out.profile = out.profile.with_center_cap(alpha, eq.source(alpha) / eq.dim as f64);
    Ok(out)
}

/// Solution with `u(a) = 0`, `u'(a) = beta`, run outward to `b`.
pub fn integrate_from_inner(
    params: &ProblemParams,
    a: f64,
    beta: f64,
    b: f64,
    cfg: &IntegratorConfig,
) -> Result<ShootingOutcome> {
    cfg.validate()?;
    if !(a > 0.0 && b > a) {
        return Err(Error::Precondition(format!("need 0 < a < b, got a = {a}, b = {b}")));
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Precondition(format!("beta must be > 0, got {beta}")));
    }
    let eq = params.equation();
    let h0 = 1e-6 * (b - a);
    let cfg = cfg.for_amplitude(beta * (b - a));
    Ok(solve(&eq, a, [0.0, beta], b, h0, &cfg, StartKind::InnerBoundary, true))
}

/// Solution with `v(b) = 0`, `v'(b) = -gamma`, run inward to `r_min`.
///
/// A `FirstZero` here is the largest zero below `b`; its `slope` is `-dv/dr`.
pub fn integrate_backward_from_outer(
    params: &ProblemParams,
    b: f64,
    gamma: f64,
    r_min: f64,
    cfg: &IntegratorConfig,
) -> Result<ShootingOutcome> {
    cfg.validate()?;
    if !(r_min > 0.0 && b > r_min) {
        return Err(Error::Precondition(format!("need 0 < r_min < b, got r_min = {r_min}, b = {b}")));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Precondition(format!("gamma must be > 0, got {gamma}")));
    }
    let eq = params.equation();
    let h0 = 1e-6 * (b - r_min);
    let cfg = cfg.for_amplitude(gamma * (b - r_min));
    Ok(solve(&eq, b, [0.0, -gamma], r_min, h0, &cfg, StartKind::OuterBoundaryBackward, true))
}

/// Leading coefficient `A` of the singular solution `A r^(-2/(p-1))`.
pub fn singular_amplitude(params: &ProblemParams) -> Result<f64> {
    if !params.super_critical() {
        return Err(Error::Precondition(format!(
            "singular solution needs N >= 3 and p > (N+2)/(N-2); got N = {}, p = {}",
            params.dim, params.p
        )));
    }
    let m = 2.0 / (params.p - 1.0);
    Ok((m * (params.dim as f64 - 2.0 - m)).powf(1.0 / (params.p - 1.0)))
}

/// Singular solution seeded from its leading-order asymptotics at `r_start`.
/// A `FirstZero` radius is the estimate of `r_*`.
pub fn integrate_singular(
    params: &ProblemParams,
    r_start: f64,
    horizon: f64,
    cfg: &IntegratorConfig,
) -> Result<ShootingOutcome> {
    cfg.validate()?;
    let amp = singular_amplitude(params)?;
    if !(r_start > 0.0 && horizon > r_start) {
        return Err(Error::Precondition(format!(
            "need 0 < r_start < horizon, got r_start = {r_start}, horizon = {horizon}"
        )));
    }
    let m = 2.0 / (params.p - 1.0);
    let u0 = amp * r_start.powf(-m);
    let seed = [u0, -m * u0 / r_start];
    let eq = params.equation();
    let mut out = solve(&eq, r_start, seed, horizon, 1e-3 * r_start, cfg, StartKind::SingularAsymptotic, true);
    if let OutcomeKind::PositiveAtHorizon { horizon } = out.kind {
        out.kind = OutcomeKind::Failed(FailReason::NoZeroBeforeHorizon { horizon });
    }
    Ok(out)
}

/// Largest ODE residual `|u'' - f(r, u, u')|` at the profile nodes, with `u''`
/// taken from the derivative of the continuous extension, each normalised by
/// `rtol (|u| + |u'| + |u''|) + atol`.
pub fn max_scaled_residual(params: &ProblemParams, profile: &RadialProfile, cfg: &IntegratorConfig) -> f64 {
    let eq = params.equation();
    let mut worst: f64 = 0.0;
    for (r, u, up) in profile.rows().filter(|row| row.0 > 0.0) {
        if let Some((_, upp)) = profile.eval_deriv(r) {
            let f = eq.second_derivative(r, u, up);
            let scale = cfg.rtol * (u.abs() + up.abs() + f.abs()) + cfg.atol;
            worst = worst.max((upp - f).abs() / scale);
        }
    }
    worst
}

/// `E(r) = u'^2/2 + lambda u^2/2 + |u|^(p+1)/(p+1)` at each node.
pub fn energy_along(params: &ProblemParams, profile: &RadialProfile) -> Vec<f64> {
    profile
        .rows()
        .map(|(_, u, up)| {
            0.5 * up * up + 0.5 * params.lambda * u * u + u.abs().powf(params.p + 1.0) / (params.p + 1.0)
        })
        .collect()
}

/// The a priori bound `(1 + 2 alpha^(p-1)/((p+1) lambda))^(1/2) alpha` for center starts.
pub fn a_priori_bound(params: &ProblemParams, alpha: f64) -> f64 {
    (1.0 + 2.0 * alpha.powf(params.p - 1.0) / ((params.p + 1.0) * params.lambda)).sqrt() * alpha
}

#[cfg(test)]
mod tests;
