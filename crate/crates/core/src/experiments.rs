//! End-to-end checks of the uniqueness, multiplicity, oscillation and window
//! statements, each producing a machine-readable [`ExperimentReport`].
//!
//! Counts are lower bounds, so every assertion is phrased as "at least k
//! found". A search that runs out of budget or schedule is `Inconclusive`.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linear_modes::{phi_first_zero, solve_phi};
use crate::numerics::log_grid;
use crate::radial_ode::{IntegratorConfig, ProblemParams};
use crate::regions::{classify, corollary_window, jl_exponent, phi_boundaries, r0, z_sign_structure, Case};
use crate::shooting::{
    count_annulus_solutions_with, count_ball_solutions_with, singular_zero, zero_map, zero_map_curve, BvpSolutionSet,
    ScanOptions, ShotParamKind, DEFAULT_ALPHA_RANGE, DEFAULT_BETA_RANGE, SINGULAR_START,
};

pub const DEFAULT_SEED: u64 = 20_240_917;
/// Default cap on initial value solves per experiment.
pub const DEFAULT_BUDGET: usize = 100_000;
/// Default samples per uniqueness case.
pub const DEFAULT_SAMPLES: usize = 20;
/// Scan grid of the uniqueness check before doubling.
pub const UNIQUENESS_GRID: usize = 200;
/// Samples of `Z` per annulus in the sign-change check.
const Z_SAMPLES: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Relation {
    AtMost,
    AtLeast,
    Within,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Metric {
    pub name: String,
    pub value: f64,
    pub target: f64,
    /// Allowed distance from `target` for `Within`; zero otherwise.
    pub tolerance: f64,
    pub relation: Relation,
    /// What the target is derived from.
    pub reference: String,
    pub passed: bool,
}

impl Metric {
    pub fn at_most(name: &str, value: f64, limit: f64, reference: &str) -> Self {
        Self::build(name, value, limit, 0.0, Relation::AtMost, reference, value <= limit)
    }

    pub fn at_least(name: &str, value: f64, limit: f64, reference: &str) -> Self {
        Self::build(name, value, limit, 0.0, Relation::AtLeast, reference, value >= limit)
    }

    pub fn within(name: &str, value: f64, target: f64, tolerance: f64, reference: &str) -> Self {
        let ok = (value - target).abs() <= tolerance;
        Self::build(name, value, target, tolerance, Relation::Within, reference, ok)
    }

    fn build(name: &str, value: f64, target: f64, tolerance: f64, relation: Relation, reference: &str, passed: bool) -> Self {
        Self {
            name: name.to_string(),
            value,
            target,
            tolerance,
            relation,
            reference: reference.to_string(),
            passed,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentReport {
    pub name: String,
    /// Full resolved input record.
    pub params: Value,
    pub status: Status,
    pub metrics: Vec<Metric>,
    pub artifacts: Vec<String>,
    pub seed: Option<u64>,
    /// Initial value solves spent.
    pub solves: usize,
    /// Why the run is inconclusive, when it is.
    pub inconclusive_reason: Option<String>,
    pub details: Value,
}

impl ExperimentReport {
    fn new(name: &str, params: Value, seed: Option<u64>) -> Self {
        Self {
            name: name.to_string(),
            params,
            status: Status::Inconclusive,
            metrics: Vec::new(),
            artifacts: Vec::new(),
            seed,
            solves: 0,
            inconclusive_reason: None,
            details: Value::Null,
        }
    }

    fn finish(mut self, budget: &Budget) -> Self {
        self.solves = budget.used;
        if self.inconclusive_reason.is_none() && budget.exhausted() {
            self.inconclusive_reason = Some(format!("solve budget of {} exhausted", budget.limit));
        }
        self.status = if self.inconclusive_reason.is_some() {
            Status::Inconclusive
        } else if self.metrics.iter().all(|m| m.passed) {
            Status::Pass
        } else {
            Status::Fail
        };
        self
    }
}

/// Knobs shared by every experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExperimentSettings {
    pub cfg: IntegratorConfig,
    /// Scan grid size; `None` picks each experiment's default.
    pub grid: Option<usize>,
    pub budget: usize,
    pub seed: u64,
}

impl Default for ExperimentSettings {
    fn default() -> Self {
        Self {
            cfg: IntegratorConfig::default(),
            grid: None,
            budget: DEFAULT_BUDGET,
            seed: DEFAULT_SEED,
        }
    }
}

impl ExperimentSettings {
    fn grid_or(&self, default: usize) -> usize {
        self.grid.unwrap_or(default)
    }
}

struct Budget {
    limit: usize,
    used: usize,
}

impl Budget {
    fn new(limit: usize) -> Self {
        Self { limit, used: 0 }
    }

    fn charge(&mut self, solves: usize) {
        self.used += solves;
    }

    fn exhausted(&self) -> bool {
        self.used >= self.limit
    }
}

fn scan_options(grid: usize) -> ScanOptions {
    ScanOptions {
        energies: false,
        ..ScanOptions::with_grid(grid)
    }
}

fn annulus_scan(params: &ProblemParams, a: f64, b: f64, grid: usize, s: &ExperimentSettings, budget: &mut Budget) -> Result<BvpSolutionSet> {
    let set = count_annulus_solutions_with(params, a, b, ShotParamKind::InnerSlope, DEFAULT_BETA_RANGE, &scan_options(grid), &s.cfg)?;
    budget.charge(set.solves);
    Ok(set)
}

fn ball_scan(params: &ProblemParams, b: f64, grid: usize, s: &ExperimentSettings, budget: &mut Budget) -> Result<BvpSolutionSet> {
    let set = count_ball_solutions_with(params, b, DEFAULT_ALPHA_RANGE, &scan_options(grid), &s.cfg)?;
    budget.charge(set.solves);
    Ok(set)
}

fn require_three_dim(params: &ProblemParams) -> Result<()> {
    if params.dim != 3 || !(params.p > 5.0) {
        return Err(Error::Precondition(format!(
            "this experiment needs N = 3 and p > 5, got N = {}, p = {}",
            params.dim, params.p
        )));
    }
    Ok(())
}

fn base_params(params: &ProblemParams, s: &ExperimentSettings, extra: Value) -> Value {
    let mut v = json!({ "problem": params, "settings": s });
    if let (Value::Object(m), Value::Object(e)) = (&mut v, extra) {
        m.extend(e);
    }
    v
}

/// Descending geometric schedule of inner radii from `b/4` to `1e-5 b`.
pub fn default_a_schedule(b: f64) -> Vec<f64> {
    let mut g = log_grid(1e-5 * b, 0.25 * b, 24);
    g.reverse();
    g
}

fn draw_in_case(rng: &mut ChaCha8Rng, params: &ProblemParams, case: Case) -> Result<Option<(f64, f64)>> {
    let k = params.lambda.sqrt();
    let span = PI / k;
    let r0 = r0(params)?;
    for _ in 0..1000 {
        let (u, v): (f64, f64) = (rng.gen(), rng.gen());
        let (a, b) = match case {
            Case::CaseI => {
                let a = r0 * (1.0 + 1e-3) + 0.5 * span * u;
                (a, a + (0.05 + 0.9 * v) * span)
            }
            Case::CaseII => {
                let a = r0 * (0.05 + 0.9 * u);
                let lo = phi_boundaries(params.p, params.lambda, a)?.phi1;
                (a, lo + (0.02 + 0.93 * v) * (a + span - lo))
            }
            _ => {
                let a = r0 * (0.05 + 0.9 * u);
                let hi = phi_boundaries(params.p, params.lambda, a)?.phi3;
                (a, r0 + (0.02 + 0.96 * v) * (hi - r0))
            }
        };
        if classify(params, a, b)?.case == case {
            return Ok(Some((a, b)));
        }
    }
    Ok(None)
}

/// Samples `(a, b)` in each uniqueness case and checks that exactly one
/// annulus solution is found, stably under grid doubling, and that `Z`
/// changes sign once.
pub fn verify_uniqueness(params: &ProblemParams, samples_per_case: usize, s: &ExperimentSettings) -> Result<ExperimentReport> {
    require_three_dim(params)?;
    if samples_per_case == 0 {
        return Err(Error::InvalidParams("need at least one sample per case".into()));
    }
    let grid = s.grid_or(UNIQUENESS_GRID);
    let mut rep = ExperimentReport::new(
        "uniqueness",
        base_params(params, s, json!({ "samples_per_case": samples_per_case, "grid": grid })),
        Some(s.seed),
    );
    let mut budget = Budget::new(s.budget);
    let mut rng = ChaCha8Rng::seed_from_u64(s.seed);
    let mut details = Vec::new();
    'cases: for (label, case) in [("case_i", Case::CaseI), ("case_ii", Case::CaseII), ("case_iii", Case::CaseIII)] {
        let (mut unique, mut single) = (0usize, 0usize);
        for _ in 0..samples_per_case {
            if budget.exhausted() {
                break 'cases;
            }
            let Some((a, b)) = draw_in_case(&mut rng, params, case)? else {
                rep.inconclusive_reason = Some(format!("could not place a sample in {label}"));
                break 'cases;
            };
            let verdict = classify(params, a, b)?;
            let coarse = annulus_scan(params, a, b, grid, s, &mut budget)?;
            let fine = annulus_scan(params, a, b, 2 * grid, s, &mut budget)?;
            let z = z_sign_structure(params.p, params.lambda, a, b, Z_SAMPLES)?;
            if coarse.count() == 1 && fine.count() == 1 {
                unique += 1;
            }
            if z.single_change {
                single += 1;
            }
            details.push(json!({
                "case": label, "a": a, "b": b, "subcase": verdict.subcase,
                "count": coarse.count(), "count_doubled_grid": fine.count(), "kappa": z.kappa,
                "inner_slope": coarse.solutions.first().map(|x| x.param),
            }));
        }
        let n = samples_per_case as f64;
        rep.metrics.push(Metric::at_least(
            &format!("{label}.samples_with_one_solution"),
            unique as f64,
            n,
            "unique positive solution in the case",
        ));
        rep.metrics.push(Metric::at_least(
            &format!("{label}.z_single_sign_change"),
            single as f64,
            n,
            "Z changes sign exactly once",
        ));
    }
    rep.details = Value::Array(details);
    Ok(rep.finish(&budget))
}

/// Walks `a` down a schedule until an annulus carries at least three
/// solutions, then checks the ordering of their outer slopes against the
/// ball solution.
pub fn verify_multiplicity_small_a(
    params: &ProblemParams,
    b: Option<f64>,
    a_schedule: Option<Vec<f64>>,
    s: &ExperimentSettings,
) -> Result<ExperimentReport> {
    if params.dim < 3 || !params.super_critical() {
        return Err(Error::Precondition("multiplicity needs N >= 3 and p > (N+2)/(N-2)".into()));
    }
    let mut budget = Budget::new(s.budget);
    let b = match b {
        Some(b) => b,
        None => {
            budget.charge(1);
            zero_map(params, 1.0, &s.cfg)?
        }
    };
    let schedule = a_schedule.unwrap_or_else(|| default_a_schedule(b));
    if schedule.iter().any(|&a| !(a > 0.0 && a < b)) {
        return Err(Error::Precondition("every scheduled a must lie in (0, b)".into()));
    }
    let grid = s.grid_or(crate::shooting::DEFAULT_GRID);
    let mut rep = ExperimentReport::new(
        "multiplicity",
        base_params(params, s, json!({ "b": b, "a_schedule": schedule, "grid": grid })),
        None,
    );
    let ball = ball_scan(params, b, grid, s, &mut budget)?;
    if ball.count() == 0 {
        return Err(Error::Precondition(format!("the ball of radius {b} has no solution")));
    }
    let ball_sol = &ball.solutions[0];
    let gamma0 = -ball_sol.outer_slope;
    let n = params.dim as f64;
    let phi_b = *solve_phi(params, b, &s.cfg)?.u().last().expect("nonempty profile");
    let mapped = |gamma: f64| gamma * b.powf(n - 1.0) * phi_b / (n - 2.0);

    let mut walk = Vec::new();
    let mut witness = None;
    for &a in &schedule {
        if budget.exhausted() {
            break;
        }
        let set = annulus_scan(params, a, b, grid, s, &mut budget)?;
        let slopes: Vec<f64> = set.solutions.iter().map(|x| -x.outer_slope).collect();
        walk.push(json!({ "a": a, "count": set.count(), "outer_slopes": slopes,
            "inner_slopes": set.solutions.iter().map(|x| x.param).collect::<Vec<_>>() }));
        if set.count() >= 3 {
            witness = Some((a, slopes));
            break;
        }
    }
    let ball_mapped = mapped(gamma0);
    match &witness {
        Some((a, slopes)) => {
            let above = slopes.iter().filter(|&&g| mapped(g) > ball_mapped).count();
            let below = slopes.iter().filter(|&&g| g > 0.0 && mapped(g) < ball_mapped).count();
            rep.metrics.push(Metric::at_least("annulus_solutions", slopes.len() as f64, 3.0, "at least three solutions for small a"));
            rep.metrics.push(Metric::at_most("witness_a_over_b", a / b, 0.1, "witness at a <= b/10"));
            rep.metrics.push(Metric::at_least("slopes_above_ball", above as f64, 1.0, "one w'(0) above the ball's"));
            rep.metrics.push(Metric::at_least("slopes_below_ball", below as f64, 2.0, "two w'(0) in (0, ball's)"));
        }
        None => {
            if rep.inconclusive_reason.is_none() && !budget.exhausted() {
                rep.inconclusive_reason = Some("a schedule exhausted without three solutions".into());
            }
        }
    }
    rep.details = json!({
        "ball_center_value": ball_sol.param,
        "ball_outer_slope": gamma0,
        "ball_mapped_slope": ball_mapped,
        "phi_at_b": phi_b,
        "witness_a": witness.as_ref().map(|w| w.0),
        "mapped_slopes": witness.as_ref().map(|w| w.1.iter().map(|&g| mapped(g)).collect::<Vec<_>>()),
        "walk": walk,
    });
    Ok(rep.finish(&budget))
}

/// `z(alpha) - r_*` sign changes over a log grid, with the two limits of the
/// zero map and the start independence of `r_*`.
pub fn verify_oscillation(params: &ProblemParams, alpha_range: (f64, f64), points: usize, s: &ExperimentSettings) -> Result<ExperimentReport> {
    if params.dim < 3 || !params.super_critical() || params.p >= jl_exponent(params.dim)? {
        return Err(Error::Precondition("oscillation needs N >= 3 and (N+2)/(N-2) < p < p_JL".into()));
    }
    if !(alpha_range.0 > 0.0 && alpha_range.1 > alpha_range.0) || points < 2 {
        return Err(Error::Precondition(format!("bad alpha range {alpha_range:?} or point count {points}")));
    }
    let mut rep = ExperimentReport::new(
        "oscillation",
        base_params(params, s, json!({ "alpha_range": [alpha_range.0, alpha_range.1], "points": points })),
        None,
    );
    let mut budget = Budget::new(s.budget);
    let r_star = singular_zero(params, SINGULAR_START, &s.cfg)?;
    let r_star_coarse = singular_zero(params, 10.0 * SINGULAR_START, &s.cfg)?;
    budget.charge(2);
    let alphas = log_grid(alpha_range.0, alpha_range.1, points);
    let curve = zero_map_curve(params, &alphas, Some(r_star), &s.cfg);
    budget.charge(points);
    let crossings = curve.crossings();
    let z_tail = *curve.z_values.last().unwrap();
    let z_small = zero_map(params, 1e-4, &s.cfg)?;
    budget.charge(1);
    let phi_zero = phi_first_zero(params.dim, params.lambda, 4.0 * PI / params.lambda.sqrt(), &s.cfg)?
        .ok_or_else(|| Error::Domain("phi has no zero".into()))?;

    rep.metrics.push(Metric::at_least("sign_changes", crossings.len() as f64, 2.0, "z(alpha) alternates about r_*"));
    rep.metrics.push(Metric::within("z_at_alpha_max", z_tail, r_star, 0.05, "z(alpha) -> r_* as alpha -> infinity"));
    rep.metrics.push(Metric::within("z_at_small_alpha", z_small, phi_zero, 1e-3, "z(alpha) -> first zero of phi as alpha -> 0"));
    rep.metrics.push(Metric::within("r_star_start_independence", r_star_coarse, r_star, 1e-4, "singular start radius 1e-3 vs 1e-4"));
    rep.metrics.push(Metric::at_most("failed_points", curve.failures() as f64, 0.0, "every z(alpha) solve succeeds"));
    if params.dim == 3 {
        let lo = phi_boundaries(params.p, params.lambda, 0.0)?.phi3;
        rep.metrics.push(Metric::at_least("r_star_above_window_low", r_star - lo, 0.0, "r_* > phi3(0)"));
        rep.metrics.push(Metric::at_least(
            "r_star_below_pi",
            PI / params.lambda.sqrt() - r_star,
            0.0,
            "r_* < pi/sqrt(lambda)",
        ));
    }
    if curve.failures() > 0 && crossings.len() < 2 {
        rep.inconclusive_reason = Some(format!("{} z(alpha) solves failed", curve.failures()));
    }
    rep.details = json!({
        "r_star": r_star,
        "r_star_start_1e-3": r_star_coarse,
        "crossing_alphas": crossings.iter().map(|&i| [alphas[i], alphas[i + 1]]).collect::<Vec<_>>(),
        "z_min": curve.z_values.iter().copied().filter(|z| z.is_finite()).fold(f64::INFINITY, f64::min),
        "z_max": curve.z_values.iter().copied().filter(|z| z.is_finite()).fold(f64::NEG_INFINITY, f64::max),
    });
    Ok(rep.finish(&budget))
}

/// Ball solution counts below, inside and above the window of radii where
/// the ball problem can be solvable.
pub fn verify_window(params: &ProblemParams, b_grid: Option<Vec<f64>>, s: &ExperimentSettings) -> Result<ExperimentReport> {
    require_three_dim(params)?;
    let w = corollary_window(params.p, params.lambda, 1.0)?;
    let mut budget = Budget::new(s.budget);
    let zs = zero_map_curve(params, &log_grid(DEFAULT_ALPHA_RANGE.0, 1e5, 200), None, &s.cfg);
    budget.charge(200);
    let z_min = zs.z_values.iter().copied().filter(|z| z.is_finite()).fold(f64::INFINITY, f64::min);
    let b_grid = b_grid.unwrap_or_else(|| {
        let inside_lo = w.b_lo.max(z_min);
        let mut g = vec![0.5 * w.b_lo, 0.8 * w.b_lo, 0.95 * w.b_lo];
        let mid = 0.5 * (w.b_lo + w.b_hi);
        if mid >= z_min {
            g.push(mid);
        }
        g.extend([0.1, 0.5, 0.9].map(|f| inside_lo + f * (w.b_hi - inside_lo)));
        // z(alpha) - pi is below solver noise for tiny alpha, so b = pi itself is not probed
        g.extend([1.01, 1.1].map(|f| f * w.b_hi));
        g
    });
    if b_grid.iter().any(|&b| !(b > 0.0 && b.is_finite())) {
        return Err(Error::Precondition("every b must be positive".into()));
    }
    let grid = s.grid_or(crate::shooting::DEFAULT_GRID);
    let mut rep = ExperimentReport::new("window", base_params(params, s, json!({ "b_grid": b_grid, "grid": grid })), None);
    let (mut below, mut above, mut inside_empty) = (0usize, 0usize, 0usize);
    let mut rows = Vec::new();
    for &b in &b_grid {
        if budget.exhausted() {
            break;
        }
        let count = ball_scan(params, b, grid, s, &mut budget)?.count();
        let zone = if b < w.b_lo {
            below += count;
            "below"
        } else if b >= w.b_hi {
            above += count;
            "above"
        } else if b >= z_min {
            inside_empty += usize::from(count == 0);
            "inside"
        } else {
            "unresolved"
        };
        rows.push(json!({ "b": b, "zone": zone, "count": count }));
    }
    rep.metrics.push(Metric::at_most("solutions_below_window", below as f64, 0.0, "no solution for b below the window"));
    rep.metrics.push(Metric::at_most("solutions_above_window", above as f64, 0.0, "no solution for lambda >= lambda_1"));
    rep.metrics.push(Metric::at_most("inside_radii_without_solution", inside_empty as f64, 0.0, "z attains every b in [z_min, pi)"));
    rep.details = json!({ "b_lo": w.b_lo, "b_hi": w.b_hi, "z_min": z_min, "rows": rows });
    Ok(rep.finish(&budget))
}

/// For `b = r_* + delta` over shrinking offsets, looks for at least `k`
/// ball solutions and then at least `k` annulus solutions at some small `a`.
pub fn verify_k_solutions_near_rstar(
    params: &ProblemParams,
    k: usize,
    b_offsets: Option<Vec<f64>>,
    s: &ExperimentSettings,
) -> Result<ExperimentReport> {
    if params.dim < 3 || !params.super_critical() || params.p >= jl_exponent(params.dim)? {
        return Err(Error::Precondition("needs N >= 3 and (N+2)/(N-2) < p < p_JL".into()));
    }
    if k == 0 {
        return Err(Error::InvalidParams("k must be >= 1".into()));
    }
    let offsets = b_offsets.unwrap_or_else(|| {
        [0.05, 0.02, 0.01, 0.005, 0.002, 0.001].iter().flat_map(|&d| [d, -d]).collect()
    });
    let grid = s.grid_or(crate::shooting::DEFAULT_GRID);
    let mut rep = ExperimentReport::new("k_solutions", base_params(params, s, json!({ "k": k, "b_offsets": offsets, "grid": grid })), None);
    let mut budget = Budget::new(s.budget);
    let r_star = singular_zero(params, SINGULAR_START, &s.cfg)?;
    budget.charge(1);
    let mut rows = Vec::new();
    let mut best = (0usize, 0usize);
    let mut witness = None;
    'offsets: for &delta in &offsets {
        let b = r_star + delta;
        if budget.exhausted() || b <= 0.0 {
            break;
        }
        let balls = ball_scan(params, b, grid, s, &mut budget)?.count();
        best.0 = best.0.max(balls);
        let mut annulus_best = 0;
        if balls >= k {
            for a in default_a_schedule(b) {
                if budget.exhausted() {
                    break;
                }
                let n = annulus_scan(params, a, b, grid, s, &mut budget)?.count();
                annulus_best = annulus_best.max(n);
                if n >= k {
                    rows.push(json!({ "delta": delta, "ball_count": balls, "annulus_a": a, "annulus_count": n }));
                    witness = Some(delta);
                    best.1 = best.1.max(n);
                    break 'offsets;
                }
            }
        }
        best.1 = best.1.max(annulus_best);
        rows.push(json!({ "delta": delta, "ball_count": balls, "annulus_count": annulus_best }));
    }
    rep.metrics.push(Metric::at_least("ball_solutions", best.0 as f64, k as f64, "at least k solutions for |b - r_*| small"));
    rep.metrics.push(Metric::at_least("annulus_solutions", best.1 as f64, k as f64, "at least k solutions for small a"));
    if witness.is_none() && !budget.exhausted() {
        rep.inconclusive_reason = Some(format!("no offset witnessed {k} solutions at this resolution"));
    }
    rep.details = json!({ "r_star": r_star, "witness_delta": witness, "rows": rows });
    Ok(rep.finish(&budget))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p7() -> ProblemParams {
        ProblemParams::new(3, 7.0, 1.0).unwrap()
    }

    #[test]
    fn status_follows_metrics() {
        let mut rep = ExperimentReport::new("t", Value::Null, None);
        rep.metrics.push(Metric::at_most("x", 1.0, 2.0, ""));
        rep.metrics.push(Metric::within("y", 1.0, 1.1, 0.2, ""));
        let rep = rep.finish(&Budget::new(10));
        assert_eq!(rep.status, Status::Pass);

        let mut rep = ExperimentReport::new("t", Value::Null, None);
        rep.metrics.push(Metric::at_least("x", 1.0, 2.0, ""));
        assert_eq!(rep.finish(&Budget::new(10)).status, Status::Fail);

        let mut b = Budget::new(10);
        b.charge(10);
        let rep = ExperimentReport::new("t", Value::Null, None);
        assert_eq!(rep.finish(&b).status, Status::Inconclusive);
    }

    #[test]
    fn schedule_descends_to_small_a() {
        let s = default_a_schedule(3.0);
        assert!((s[0] - 0.75).abs() < 1e-12);
        assert!((s.last().unwrap() - 3e-5).abs() < 1e-15);
        assert!(s.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn samples_land_in_their_cases() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for case in [Case::CaseI, Case::CaseII, Case::CaseIII] {
            for _ in 0..50 {
                let (a, b) = draw_in_case(&mut rng, &p7(), case).unwrap().unwrap();
                assert_eq!(classify(&p7(), a, b).unwrap().case, case);
            }
        }
    }

    #[test]
    fn preconditions_reject_bad_requests() {
        let s = ExperimentSettings::default();
        let p4 = ProblemParams::new(3, 4.0, 1.0).unwrap();
        assert!(verify_uniqueness(&p4, 2, &s).is_err());
        assert!(verify_uniqueness(&p7(), 0, &s).is_err());
        // no ball solution beyond pi
        assert!(verify_multiplicity_small_a(&p7(), Some(3.3), Some(vec![0.1]), &s).is_err());
        assert!(verify_multiplicity_small_a(&p7(), Some(3.0), Some(vec![3.5]), &s).is_err());
        assert!(verify_k_solutions_near_rstar(&p7(), 0, None, &s).is_err());
    }

    #[test]
    fn tiny_budget_is_inconclusive() {
        let s = ExperimentSettings {
            budget: 10,
            ..ExperimentSettings::default()
        };
        let rep = verify_uniqueness(&p7(), 3, &s).unwrap();
        assert_eq!(rep.status, Status::Inconclusive);
    }

    #[test]
    fn window_small_run() {
        let s = ExperimentSettings {
            grid: Some(120),
            ..ExperimentSettings::default()
        };
        let rep = verify_window(&p7(), Some(vec![2.0, 3.0, 3.2]), &s).unwrap();
        assert_eq!(rep.status, Status::Pass, "{:#?}", rep.metrics);
    }
}
