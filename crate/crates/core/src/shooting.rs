//! Boundary value solvers built on the initial value layer: the zero map
//! `z(alpha)`, scan-based counting of ball and annulus solutions, and the
//! energy quantities of the Liouville-transformed problem.

use std::sync::atomic::{AtomicUsize, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear_modes::Domain;
use crate::numerics::{gl_panel, log_grid, sign_changes};
use crate::radial_ode::{
    default_horizon, integrate_backward_from_outer, integrate_from_center, integrate_from_inner, integrate_singular,
    FailReason, IntegratorConfig, OutcomeKind, ProblemParams, RadialProfile, ShootingOutcome,
};
use crate::transforms::LiouvilleMap;

/// Default scan resolution.
pub const DEFAULT_GRID: usize = 400;
/// Relative width at which a bracket refinement stops.
pub const REFINE_TOL: f64 = 1e-12;
/// Relative parameter separation below which two solutions are merged.
pub const DISTINCT_TOL: f64 = 1e-8;
/// Residuals below this multiple of `rtol`, relative to the solution scale,
/// carry no sign information.
pub const NOISE_FLOOR: f64 = 100.0;
/// Default start radius of the singular solution.
pub const SINGULAR_START: f64 = 1e-4;

/// Default center values for ball scans.
pub const DEFAULT_ALPHA_RANGE: (f64, f64) = (1e-4, 1e6);
/// Default inner slopes for annulus scans.
pub const DEFAULT_BETA_RANGE: (f64, f64) = (1e-3, 1e10);

/// `z(alpha)`, the first zero of the center start. The default horizon is
/// doubled up to twice before giving up.
pub fn zero_map(params: &ProblemParams, alpha: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let mut horizon = default_horizon(params, cfg);
    for _ in 0..3 {
        let out = integrate_from_center(params, alpha, horizon, cfg)?;
        match out.kind {
            OutcomeKind::FirstZero { radius, .. } => return Ok(radius),
            OutcomeKind::Failed(reason) => return Err(reason.into()),
            OutcomeKind::PositiveAtHorizon { .. } => horizon *= 2.0,
        }
    }
    Err(FailReason::NoZeroBeforeHorizon { horizon: horizon / 2.0 }.into())
}

/// First zero `r_*` of the singular solution started at `r_start`.
pub fn singular_zero(params: &ProblemParams, r_start: f64, cfg: &IntegratorConfig) -> Result<f64> {
    let horizon = default_horizon(params, cfg);
    let out = integrate_singular(params, r_start, horizon, cfg)?;
    match out.kind {
        OutcomeKind::FirstZero { radius, .. } => Ok(radius),
        OutcomeKind::Failed(reason) => Err(reason.into()),
        OutcomeKind::PositiveAtHorizon { horizon } => Err(FailReason::NoZeroBeforeHorizon { horizon }.into()),
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ZeroMapCurve {
    pub alphas: Vec<f64>,
    /// `NaN` where the solve failed.
    pub z_values: Vec<f64>,
    pub r_star_ref: Option<f64>,
}

impl ZeroMapCurve {
    /// Indices where `z(alpha) - r_*` changes sign.
    pub fn crossings(&self) -> Vec<usize> {
        match self.r_star_ref {
            Some(rs) => sign_changes(&self.z_values.iter().map(|z| z - rs).collect::<Vec<_>>()),
            None => Vec::new(),
        }
    }

    pub fn failures(&self) -> usize {
        self.z_values.iter().filter(|z| !z.is_finite()).count()
    }
}

/// `z(alpha)` over `alphas`, evaluated in parallel.
pub fn zero_map_curve(params: &ProblemParams, alphas: &[f64], r_star_ref: Option<f64>, cfg: &IntegratorConfig) -> ZeroMapCurve {
    let z_values = alphas
        .par_iter()
        .map(|&a| zero_map(params, a, cfg).unwrap_or(f64::NAN))
        .collect();
    ZeroMapCurve {
        alphas: alphas.to_vec(),
        z_values,
        r_star_ref,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ShotParamKind {
    CenterValue,
    InnerSlope,
    OuterSlope,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScanOptions {
    pub grid_size: usize,
    pub refine_tol: f64,
    pub distinct_tol: f64,
    /// Compute Liouville energies for each solution.
    pub energies: bool,
}

impl Default for ScanOptions {
    fn default() -> Self {
        Self {
            grid_size: DEFAULT_GRID,
            refine_tol: REFINE_TOL,
            distinct_tol: DISTINCT_TOL,
            energies: true,
        }
    }
}

impl ScanOptions {
    pub fn with_grid(grid_size: usize) -> Self {
        Self {
            grid_size,
            ..Self::default()
        }
    }
}

/// Energy data of one solution in the Liouville variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SolutionEnergy {
    /// `int |w'|^2 ds`.
    pub dirichlet: f64,
    /// `int g |w|^(p+1) ds`.
    pub potential: f64,
    /// `(int |w'|^2)^((p-1)/(p+1))`.
    pub energy: f64,
    /// `w'(0)`.
    pub initial_slope: f64,
    /// Clock length of the domain (infinite for balls).
    pub c: f64,
}

impl SolutionEnergy {
    pub fn identity_residual(&self) -> f64 {
        (self.dirichlet - self.potential).abs() / self.dirichlet.abs().max(self.potential.abs())
    }
}

#[derive(Debug, Clone)]
pub struct BvpSolution {
    pub param: f64,
    /// Boundary residual at `param`.
    pub residual: f64,
    pub profile: RadialProfile,
    /// `u'(b)`.
    pub outer_slope: f64,
    pub max_value: f64,
    pub energy: Option<SolutionEnergy>,
}

#[derive(Debug, Clone)]
pub struct BvpSolutionSet {
    pub domain: Domain,
    pub shot_param_kind: ShotParamKind,
    /// Final refined brackets, one per solution before merging.
    pub brackets: Vec<(f64, f64)>,
    pub solutions: Vec<BvpSolution>,
    pub scan_grid: Vec<f64>,
    /// Boundary residual on the scan grid (`NaN` where the solve failed).
    pub residuals: Vec<f64>,
    /// Number of initial value solves spent.
    pub solves: usize,
}

impl BvpSolutionSet {
    pub fn count(&self) -> usize {
        self.solutions.len()
    }

    pub fn failed_points(&self) -> usize {
        self.residuals.iter().filter(|r| !r.is_finite()).count()
    }
}

struct Shot<'a> {
    params: &'a ProblemParams,
    domain: Domain,
    kind: ShotParamKind,
    cfg: &'a IntegratorConfig,
    solves: AtomicUsize,
}

impl Shot<'_> {
    /// Residual divided by its natural scale: the radius for a zero-position
    /// residual, the amplitude for a far-end value.
    fn relative(&self, param: f64) -> (f64, f64) {
        let (res, out) = self.fire(param);
        let rel = match out.as_ref().map(|o| &o.kind) {
            Some(OutcomeKind::FirstZero { .. }) => res.abs() / self.domain.outer(),
            Some(OutcomeKind::PositiveAtHorizon { .. }) => {
                res.abs() / out.as_ref().map_or(f64::NAN, |o| o.profile.max_abs_u())
            }
            _ => f64::NAN,
        };
        (res, rel)
    }

    fn fire(&self, param: f64) -> (f64, Option<ShootingOutcome>) {
        self.solves.fetch_add(1, Ordering::Relaxed);
        let b = self.domain.outer();
        let a = self.domain.inner();
        let out = match self.kind {
            ShotParamKind::CenterValue => integrate_from_center(self.params, param, b, self.cfg),
            ShotParamKind::InnerSlope => integrate_from_inner(self.params, a, param, b, self.cfg),
            ShotParamKind::OuterSlope => integrate_backward_from_outer(self.params, b, param, a, self.cfg),
        };
        let Ok(out) = out else {
            return (f64::NAN, None);
        };
        // continuous across a root: the zero's distance to the far end on one
        // side, the far-end value on the other
        let res = match (out.kind, self.kind) {
            (OutcomeKind::FirstZero { radius, .. }, ShotParamKind::OuterSlope) => a - radius,
            (OutcomeKind::FirstZero { radius, .. }, _) => radius - b,
            (OutcomeKind::PositiveAtHorizon { .. }, ShotParamKind::OuterSlope) => out.profile.u()[0],
            (OutcomeKind::PositiveAtHorizon { .. }, _) => *out.profile.u().last().unwrap(),
            (OutcomeKind::Failed(_), _) => f64::NAN,
        };
        (res, Some(out))
    }

    fn residual(&self, param: f64) -> f64 {
        self.fire(param).0
    }

    /// Bisection on the sign of the residual.
    fn refine(&self, mut lo: f64, mut hi: f64, tol: f64) -> (f64, f64) {
        let mut flo = self.residual(lo);
        for _ in 0..200 {
            if hi - lo <= tol * hi.abs() {
                break;
            }
            let mid = 0.5 * (lo + hi);
            let fm = self.residual(mid);
            if !fm.is_finite() {
                break;
            }
            if fm == 0.0 {
                return (mid, mid);
            }
            if (fm > 0.0) == (flo > 0.0) {
                lo = mid;
                flo = fm;
            } else {
                hi = mid;
            }
        }
        (lo, hi)
    }
}

fn scan(
    params: &ProblemParams,
    domain: Domain,
    kind: ShotParamKind,
    grid: Vec<f64>,
    opts: &ScanOptions,
    cfg: &IntegratorConfig,
) -> Result<BvpSolutionSet> {
    domain.validate()?;
    cfg.validate()?;
    let shot = Shot {
        params,
        domain,
        kind,
        cfg,
        solves: AtomicUsize::new(0),
    };
    let shots: Vec<(f64, f64)> = grid.par_iter().map(|&x| shot.relative(x)).collect();
    let residuals: Vec<f64> = shots.iter().map(|s| s.0).collect();
    // at a linear eigenvalue small shots land on the boundary to within solver noise
    let floor = NOISE_FLOOR * cfg.rtol;
    let cells: Vec<usize> = sign_changes(&residuals)
        .into_iter()
        .filter(|&i| !(shots[i].1 < floor && shots[i + 1].1 < floor))
        .collect();
    let refined: Vec<(f64, f64)> = cells
        .par_iter()
        .map(|&i| shot.refine(grid[i], grid[i + 1], opts.refine_tol))
        .collect();

    let mut candidates: Vec<(f64, f64, ShootingOutcome)> = refined
        .par_iter()
        .filter_map(|&(lo, hi)| {
            let (rl, ol) = shot.fire(lo);
            let (rh, oh) = shot.fire(hi);
            let pick = if rl.abs() <= rh.abs() || !rh.is_finite() { (lo, rl, ol) } else { (hi, rh, oh) };
            pick.2.map(|o| (pick.0, pick.1, o))
        })
        .collect();
    candidates.sort_by(|x, y| x.0.total_cmp(&y.0));
    candidates.dedup_by(|later, kept| (later.0 - kept.0).abs() <= opts.distinct_tol * kept.0.abs());

    // annuli share one map; ball solutions reach different depths near the center
    let shared = match domain {
        Domain::Annulus { .. } if opts.energies && params.dim >= 3 => energy_map(params, domain, cfg).ok(),
        _ => None,
    };
    let solutions = candidates
        .into_iter()
        .map(|(param, residual, out)| {
            let profile = out.profile;
            let energy = if opts.energies && params.dim >= 3 {
                match &shared {
                    Some(m) => solution_energy(m, &profile, domain).ok(),
                    None => LiouvilleMap::covering(params, domain.outer(), &profile, cfg)
                        .and_then(|m| solution_energy(&m, &profile, domain))
                        .ok(),
                }
            } else {
                None
            };
            BvpSolution {
                param,
                residual,
                outer_slope: *profile.uprime().last().unwrap(),
                max_value: profile.max_abs_u(),
                profile,
                energy,
            }
        })
        .collect();
    Ok(BvpSolutionSet {
        domain,
        shot_param_kind: kind,
        brackets: refined,
        solutions,
        scan_grid: grid,
        residuals,
        solves: shot.solves.into_inner(),
    })
}

fn check_range(range: (f64, f64), grid_size: usize) -> Result<()> {
    if !(range.0 > 0.0 && range.1 > range.0 && range.1.is_finite()) {
        return Err(Error::Precondition(format!("need 0 < lo < hi, got {range:?}")));
    }
    if grid_size < 2 {
        return Err(Error::InvalidParams(format!("grid size must be >= 2, got {grid_size}")));
    }
    Ok(())
}

/// Solutions of the Dirichlet problem on the ball of radius `b` found by a
/// log-spaced scan of `z(alpha) - b`. The count is a lower bound.
pub fn count_ball_solutions(
    params: &ProblemParams,
    b: f64,
    alpha_range: (f64, f64),
    grid_size: usize,
    cfg: &IntegratorConfig,
) -> Result<BvpSolutionSet> {
    count_ball_solutions_with(params, b, alpha_range, &ScanOptions::with_grid(grid_size), cfg)
}

pub fn count_ball_solutions_with(
    params: &ProblemParams,
    b: f64,
    alpha_range: (f64, f64),
    opts: &ScanOptions,
    cfg: &IntegratorConfig,
) -> Result<BvpSolutionSet> {
    check_range(alpha_range, opts.grid_size)?;
    let grid = log_grid(alpha_range.0, alpha_range.1, opts.grid_size);
    scan(params, Domain::Ball { b }, ShotParamKind::CenterValue, grid, opts, cfg)
}

/// Solutions on the annulus `a < r < b` found by scanning the inner slope.
pub fn count_annulus_solutions(
    params: &ProblemParams,
    a: f64,
    b: f64,
    beta_range: (f64, f64),
    grid_size: usize,
    cfg: &IntegratorConfig,
) -> Result<BvpSolutionSet> {
    count_annulus_solutions_with(params, a, b, ShotParamKind::InnerSlope, beta_range, &ScanOptions::with_grid(grid_size), cfg)
}

/// Annulus scan with an explicit shooting parameter (`InnerSlope` or `OuterSlope`).
pub fn count_annulus_solutions_with(
    params: &ProblemParams,
    a: f64,
    b: f64,
    kind: ShotParamKind,
    range: (f64, f64),
    opts: &ScanOptions,
    cfg: &IntegratorConfig,
) -> Result<BvpSolutionSet> {
    if kind == ShotParamKind::CenterValue {
        return Err(Error::InvalidParams("annulus scans shoot on a slope".into()));
    }
    check_range(range, opts.grid_size)?;
    let grid = log_grid(range.0, range.1, opts.grid_size);
    scan(params, Domain::Annulus { a, b }, kind, grid, opts, cfg)
}

/// Liouville map of an annulus, long enough to reach the inner radius.
pub fn energy_map(params: &ProblemParams, domain: Domain, cfg: &IntegratorConfig) -> Result<LiouvilleMap> {
    let Domain::Annulus { a, b } = domain else {
        return Err(Error::Precondition("a shared energy map needs an annulus".into()));
    };
    let t_max = a.powi(-(params.dim as i32 - 2)) * (1.0 + 1e-9);
    LiouvilleMap::new(params, b, t_max, cfg)
}

/// Energy data of a profile that vanishes at both ends of `domain`.
pub fn solution_energy(map: &LiouvilleMap, profile: &RadialProfile, domain: Domain) -> Result<SolutionEnergy> {
    let tp = map.to_w(profile)?;
    let p = map.exponent();
    let dirichlet = map.dirichlet_integral(&tp);
    let potential = map.potential_integral(&tp);
    let c = match domain {
        Domain::Ball { .. } => f64::INFINITY,
        Domain::Annulus { .. } => tp.c_end,
    };
    Ok(SolutionEnergy {
        dirichlet,
        potential,
        energy: dirichlet.powf((p - 1.0) / (p + 1.0)),
        initial_slope: tp.initial_slope(),
        c,
    })
}

/// A function on `[0, c]` vanishing at both ends, used as a competitor in
/// the Rayleigh quotient.
pub trait TrialFunction: Sync {
    fn support(&self) -> f64;
    fn value(&self, s: f64) -> f64;
    fn deriv(&self, s: f64) -> f64;
    /// Interior points where the derivative may jump.
    fn breakpoints(&self) -> Vec<f64> {
        Vec::new()
    }
}

/// The tent `c^(-1/2) min(s, c - s)`, with unit Dirichlet integral.
#[derive(Debug, Clone, Copy)]
pub struct Tent {
    pub c: f64,
}

impl TrialFunction for Tent {
    fn support(&self) -> f64 {
        self.c
    }

    fn value(&self, s: f64) -> f64 {
        s.min(self.c - s) / self.c.sqrt()
    }

    fn deriv(&self, s: f64) -> f64 {
        if s < 0.5 * self.c {
            1.0 / self.c.sqrt()
        } else {
            -1.0 / self.c.sqrt()
        }
    }

    fn breakpoints(&self) -> Vec<f64> {
        vec![0.5 * self.c]
    }
}

/// Piecewise linear interpolant of samples `(s_i, w_i)` with `s_0 = 0`.
#[derive(Debug, Clone)]
pub struct PiecewiseLinear {
    pub s: Vec<f64>,
    pub w: Vec<f64>,
}

impl PiecewiseLinear {
    fn cell(&self, s: f64) -> usize {
        self.s.partition_point(|&x| x <= s).saturating_sub(1).min(self.s.len() - 2)
    }
}

impl TrialFunction for PiecewiseLinear {
    fn support(&self) -> f64 {
        *self.s.last().unwrap()
    }

    fn value(&self, s: f64) -> f64 {
        let i = self.cell(s);
        let th = (s - self.s[i]) / (self.s[i + 1] - self.s[i]);
        self.w[i] + th * (self.w[i + 1] - self.w[i])
    }

    fn deriv(&self, s: f64) -> f64 {
        let i = self.cell(s);
        (self.w[i + 1] - self.w[i]) / (self.s[i + 1] - self.s[i])
    }

    fn breakpoints(&self) -> Vec<f64> {
        self.s[1..self.s.len() - 1].to_vec()
    }
}

/// `k` times another trial function.
pub struct Scaled<'a, T: TrialFunction + ?Sized>(pub &'a T, pub f64);

impl<T: TrialFunction + ?Sized> TrialFunction for Scaled<'_, T> {
    fn support(&self) -> f64 {
        self.0.support()
    }
    fn value(&self, s: f64) -> f64 {
        self.1 * self.0.value(s)
    }
    fn deriv(&self, s: f64) -> f64 {
        self.1 * self.0.deriv(s)
    }
    fn breakpoints(&self) -> Vec<f64> {
        self.0.breakpoints()
    }
}

/// `R(w) = int |w'|^2 / (int g |w|^(p+1))^(2/(p+1))` by composite 8-point
/// Gauss-Legendre with `cells_per_piece` panels between breakpoints.
pub fn rayleigh_quotient(map: &LiouvilleMap, trial: &dyn TrialFunction, cells_per_piece: usize) -> Result<f64> {
    let c = trial.support();
    if !(c > 0.0) || c > map.s_max() * (1.0 + 1e-12) {
        return Err(Error::Precondition(format!("trial support {c} outside [0, {}]", map.s_max())));
    }
    let p = map.exponent();
    let mut knots = vec![0.0];
    knots.extend(trial.breakpoints().into_iter().filter(|&x| x > 0.0 && x < c));
    knots.push(c);
    let n = cells_per_piece.max(1);
    let pieces: Vec<(f64, f64)> = knots
        .windows(2)
        .flat_map(|w| {
            let h = (w[1] - w[0]) / n as f64;
            (0..n).map(move |j| (w[0] + j as f64 * h, if j + 1 == n { w[1] } else { w[0] + (j + 1) as f64 * h }))
        })
        .collect();
    let parts: Vec<Result<(f64, f64)>> = pieces
        .par_iter()
        .map(|&(lo, hi)| {
            let num = gl_panel(|s| trial.deriv(s).powi(2), lo, hi);
            let mut fail = None;
            let den = gl_panel(
                |s| match map.g(s) {
                    Ok(g) => g * trial.value(s).abs().powf(p + 1.0),
                    Err(e) => {
                        fail.get_or_insert(e);
                        0.0
                    }
                },
                lo,
                hi,
            );
            match fail {
                Some(e) => Err(e),
                None => Ok((num, den)),
            }
        })
        .collect();
    let (mut num, mut den) = (0.0, 0.0);
    for part in parts {
        let (a, b) = part?;
        num += a;
        den += b;
    }
    if !(den > 1e-300) {
        return Err(Error::Degenerate("trial function vanishes on its support".into()));
    }
    Ok(num / den.powf(2.0 / (p + 1.0)))
}

/// `R` of a transformed solution profile, using the exact `r`-space forms of
/// both integrals.
pub fn rayleigh_quotient_of_profile(map: &LiouvilleMap, profile: &RadialProfile) -> Result<f64> {
    let tp = map.to_w(profile)?;
    let p = map.exponent();
    let num = map.dirichlet_integral(&tp);
    let den = map.potential_integral(&tp);
    if !(den > 1e-300) {
        return Err(Error::Degenerate("profile vanishes identically".into()));
    }
    Ok(num / den.powf(2.0 / (p + 1.0)))
}

/// Upper bound on the least energy over `[0, c]` given by the tent:
/// `R(W) <= 2 ((c/2)^(-(p+1)/2) int_0^(c/2) s^(p+1) g ds)^(-2/(p+1))`.
///
/// On `[0, c/2]`, `W^(p+1) = c^(-(p+1)/2) s^(p+1) = 2^(-(p+1)/2) (c/2)^(-(p+1)/2) s^(p+1)`,
/// which is where the leading factor comes from.
pub fn tent_bound(map: &LiouvilleMap, c: f64) -> Result<f64> {
    let p = map.exponent();
    let growth = map.growth_functional(&[0.5 * c])?[0];
    Ok(2.0 * growth.powf(-2.0 / (p + 1.0)))
}

/// The same expression with leading factor `1/2` in place of `2`. It does not
/// bound `R(W)` in general.
pub fn tent_bound_half_factor(map: &LiouvilleMap, c: f64) -> Result<f64> {
    Ok(0.25 * tent_bound(map, c)?)
}

#[derive(Debug, Clone, Serialize)]
pub struct EnergyReport {
    pub c: f64,
    pub per_solution_energy: Vec<f64>,
    pub least_energy: f64,
    /// `w'(0)` of the least-energy solution.
    pub least_energy_slope: f64,
    pub tent_bound: f64,
    /// Largest relative `|int |w'|^2 - int g |w|^(p+1)|` over the solutions.
    pub identity_residual: f64,
}

/// Energies of every solution in an annulus set, with the tent bound for the
/// set's clock length.
pub fn energy_report(solset: &BvpSolutionSet, params: &ProblemParams, cfg: &IntegratorConfig) -> Result<EnergyReport> {
    if solset.solutions.is_empty() {
        return Err(Error::Precondition("energy report needs at least one solution".into()));
    }
    let map = match solset.domain {
        Domain::Annulus { .. } => energy_map(params, solset.domain, cfg)?,
        Domain::Ball { b } => LiouvilleMap::covering(params, b, &solset.solutions[0].profile, cfg)?,
    };
    let energies = solset
        .solutions
        .iter()
        .map(|s| match s.energy {
            Some(e) => Ok(e),
            None => LiouvilleMap::covering(params, solset.domain.outer(), &s.profile, cfg)
                .and_then(|m| solution_energy(&m, &s.profile, solset.domain)),
        })
        .collect::<Result<Vec<_>>>()?;
    let (least_idx, least) = energies
        .iter()
        .enumerate()
        .min_by(|x, y| x.1.energy.total_cmp(&y.1.energy))
        .map(|(i, e)| (i, e.energy))
        .unwrap();
    let c = energies[0].c;
    let tent = if c.is_finite() { tent_bound(&map, c)? } else { 0.0 };
    Ok(EnergyReport {
        c,
        per_solution_energy: energies.iter().map(|e| e.energy).collect(),
        least_energy: least,
        least_energy_slope: energies[least_idx].initial_slope,
        tent_bound: tent,
        identity_residual: energies.iter().map(|e| e.identity_residual()).fold(0.0, f64::max),
    })
}

#[cfg(test)]
mod tests;
