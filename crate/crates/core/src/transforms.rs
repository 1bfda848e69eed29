//! Kelvin map `t = r^(-(N-2))`, Liouville clock `s = int Phi^-2 dt` and the
//! normalised unknown `w = U / Phi`, which turn the radial equation into
//! `w'' + g(s) |w|^(p-1) w = 0`.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linear_modes::solve_phi;
use crate::numerics::{gl8, gl_panel, log_grid};
use crate::radial_ode::{IntegratorConfig, ProblemParams, RadialProfile};

/// Relative agreement required between two successive clock refinements.
pub const CLOCK_TOL: f64 = 1e-10;

/// One sample of the Kelvin-transformed profile.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KelvinPoint {
    pub t: f64,
    pub u: f64,
    pub du_dt: f64,
}

fn require_kelvin_dim(dim: u32) -> Result<()> {
    if dim < 3 {
        return Err(Error::Domain(format!("Kelvin map needs N >= 3, got N = {dim}")));
    }
    Ok(())
}

#[inline]
fn t_of_r(dim: u32, r: f64) -> f64 {
    r.powi(-(dim as i32 - 2))
}

#[inline]
fn r_of_t(dim: u32, t: f64) -> f64 {
    if dim == 3 {
        1.0 / t
    } else {
        t.powf(-1.0 / (dim as f64 - 2.0))
    }
}

/// `(U, dU/dt)` from `(r, u, u')`: `dU/dt = -u' r^(N-1) / (N-2)`.
#[inline]
fn kelvin_point(dim: u32, r: f64, u: f64, up: f64) -> KelvinPoint {
    KelvinPoint {
        t: t_of_r(dim, r),
        u,
        du_dt: -up * r.powi(dim as i32 - 1) / (dim as f64 - 2.0),
    }
}

/// Kelvin image of every node with `r > 0`, in increasing `t`.
pub fn kelvin_forward(profile: &RadialProfile, dim: u32) -> Result<Vec<KelvinPoint>> {
    require_kelvin_dim(dim)?;
    let mut out: Vec<KelvinPoint> = profile
        .rows()
        .filter(|row| row.0 > 0.0)
        .map(|(r, u, up)| kelvin_point(dim, r, u, up))
        .collect();
    out.reverse();
    Ok(out)
}

/// `(U, dU/dt)` at an arbitrary `t` through the profile's continuous extension.
pub fn kelvin_sample(profile: &RadialProfile, dim: u32, t: f64) -> Option<KelvinPoint> {
    let r = r_of_t(dim, t);
    profile.eval(r).map(|(u, up)| kelvin_point(dim, r, u, up))
}

/// Kelvin and Liouville data of the outer radius `b`: the regular linear
/// solution `phi`, the clock `s(t)` and the coefficient `g(s)`, tabulated for
/// `t` in `[b^(-(N-2)), t_max]`.
#[derive(Debug, Clone)]
pub struct LiouvilleMap {
    dim: u32,
    p: f64,
    b: f64,
    t_b: f64,
    t_max: f64,
    phi: RadialProfile,
    /// Cell edges of the log-spaced `t` grid.
    edges: Vec<f64>,
    /// Clock value at each edge.
    cum: Vec<f64>,
}

impl LiouvilleMap {
    /// Solve for `phi` on `[0, b]` and tabulate the clock up to `t_max`.
    pub fn new(params: &ProblemParams, b: f64, t_max: f64, cfg: &IntegratorConfig) -> Result<Self> {
        require_kelvin_dim(params.dim)?;
        if !(b > 0.0) {
            return Err(Error::Precondition(format!("need b > 0, got {b}")));
        }
        let phi = solve_phi(params, b, cfg)?;
        Self::from_phi(params, phi, b, t_max)
    }

    /// Clock long enough to cover every node of `profile` with `r > 0`.
    pub fn covering(params: &ProblemParams, b: f64, profile: &RadialProfile, cfg: &IntegratorConfig) -> Result<Self> {
        let r_min = profile.nodes().iter().copied().find(|&r| r > 0.0).unwrap_or(b);
        let t_max = t_of_r(params.dim, r_min).max(2.0 * t_of_r(params.dim, b));
        Self::new(params, b, t_max, cfg)
    }

    /// Build the map from a precomputed `phi` profile covering `[0, b]`.
    pub fn from_phi(params: &ProblemParams, phi: RadialProfile, b: f64, t_max: f64) -> Result<Self> {
        require_kelvin_dim(params.dim)?;
        let dim = params.dim;
        let t_b = t_of_r(dim, b);
        if !(t_max > t_b) {
            return Err(Error::Precondition(format!("t_max {t_max} must exceed b^-(N-2) = {t_b}")));
        }
        let (lo, hi) = phi.span();
        if lo > 0.0 || hi < b * (1.0 - 1e-12) {
            return Err(Error::Precondition(format!("phi profile must cover [0, {b}], got [{lo}, {hi}]")));
        }
        let r_lo = r_of_t(dim, t_max);
        let positive = phi
            .rows()
            .filter(|row| row.0 >= r_lo && row.0 <= b)
            .all(|row| row.1 > 0.0)
            && phi.eval(b.min(hi)).is_some_and(|v| v.0 > 0.0);
        if !positive {
            return Err(Error::Domain(format!("phi has a zero in (0, {b}]; the clock is undefined")));
        }
        let mut map = Self {
            dim,
            p: params.p,
            b,
            t_b,
            t_max,
            phi,
            edges: Vec::new(),
            cum: Vec::new(),
        };
        map.tabulate();
        Ok(map)
    }

    fn tabulate(&mut self) {
        let decades = (self.t_max / self.t_b).log10().max(1.0);
        let mut cells = ((16.0 * decades).ceil() as usize).max(32);
        let (mut edges, mut cum) = self.clock_table(cells);
        for _ in 0..12 {
            cells *= 2;
            let (e2, c2) = self.clock_table(cells);
            let (s1, s2) = (*cum.last().unwrap(), *c2.last().unwrap());
            edges = e2;
            cum = c2;
            if (s2 - s1).abs() <= CLOCK_TOL * s2.abs() {
                break;
            }
        }
        self.edges = edges;
        self.cum = cum;
    }

    fn clock_table(&self, cells: usize) -> (Vec<f64>, Vec<f64>) {
        let edges = log_grid(self.t_b, self.t_max, cells + 1);
        let mut cum = Vec::with_capacity(edges.len());
        let mut acc = 0.0;
        cum.push(0.0);
        for w in edges.windows(2) {
            acc += gl_panel(|t| self.clock_rate(t), w[0], w[1]);
            cum.push(acc);
        }
        (edges, cum)
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// `b^(-(N-2))`, the image of the outer radius.
    pub fn t_start(&self) -> f64 {
        self.t_b
    }

    pub fn t_max(&self) -> f64 {
        self.t_max
    }

    /// Clock value at `t_max`.
    pub fn s_max(&self) -> f64 {
        *self.cum.last().unwrap()
    }

    pub fn phi(&self) -> &RadialProfile {
        &self.phi
    }

    fn phi_at_r(&self, r: f64) -> (f64, f64) {
        let (_, hi) = self.phi.span();
        self.phi.eval(r.min(hi)).expect("radius inside the phi span")
    }

    /// `(Phi, dPhi/dt)` at `t`.
    pub fn phi_t(&self, t: f64) -> (f64, f64) {
        let r = r_of_t(self.dim, t);
        let (f, fp) = self.phi_at_r(r);
        (f, -fp * r.powi(self.dim as i32 - 1) / (self.dim as f64 - 2.0))
    }

    /// `ds/dt = Phi^-2`.
    pub fn clock_rate(&self, t: f64) -> f64 {
        let f = self.phi_t(t).0;
        1.0 / (f * f)
    }

    fn check_t(&self, t: f64) -> Result<()> {
        if t < self.t_b * (1.0 - 1e-14) || t > self.t_max * (1.0 + 1e-14) {
            return Err(Error::Domain(format!("t = {t} outside [{}, {}]", self.t_b, self.t_max)));
        }
        Ok(())
    }

    /// Clock `s(t)`.
    pub fn s_of_t(&self, t: f64) -> Result<f64> {
        self.check_t(t)?;
        let t = t.clamp(self.t_b, self.t_max);
        let i = self.edges.partition_point(|&e| e <= t).saturating_sub(1).min(self.edges.len() - 2);
        Ok(self.cum[i] + gl_panel(|x| self.clock_rate(x), self.edges[i], t))
    }

    /// Inverse clock `t(s)` by Newton's method safeguarded with bisection inside
    /// the tabulated cell.
    pub fn t_of_s(&self, s: f64) -> Result<f64> {
        let s_end = self.s_max();
        if !(-1e-14..=s_end * (1.0 + 1e-14)).contains(&s) {
            return Err(Error::Domain(format!("s = {s} outside [0, {s_end}]")));
        }
        let s = s.clamp(0.0, s_end);
        let i = self.cum.partition_point(|&c| c <= s).saturating_sub(1).min(self.cum.len() - 2);
        let (mut lo, mut hi) = (self.edges[i], self.edges[i + 1]);
        let (c0, c1) = (self.cum[i], self.cum[i + 1]);
        if s == c0 {
            return Ok(lo);
        }
        let mut t = lo + (hi - lo) * (s - c0) / (c1 - c0);
        for _ in 0..60 {
            let f = self.cum[i] + gl_panel(|x| self.clock_rate(x), self.edges[i], t) - s;
            if f > 0.0 {
                hi = t;
            } else {
                lo = t;
            }
            let phi = self.phi_t(t).0;
            let mut next = t - f * phi * phi;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - t).abs() <= 4.0 * f64::EPSILON * t || hi - lo <= 4.0 * f64::EPSILON * t {
                return Ok(next);
            }
            t = next;
        }
        Ok(t)
    }

    /// `g` as a function of the Kelvin variable.
    pub fn g_of_t(&self, t: f64) -> f64 {
        let n = self.dim as f64;
        let f = self.phi_t(t).0;
        t.powf(-2.0 * (n - 1.0) / (n - 2.0)) * f.powf(self.p + 3.0) / ((n - 2.0) * (n - 2.0))
    }

    /// `g(s) = (N-2)^-2 t^(-2(N-1)/(N-2)) Phi(t)^(p+3)` with `t = t(s)`.
    pub fn g(&self, s: f64) -> Result<f64> {
        Ok(self.g_of_t(self.t_of_s(s)?))
    }

    pub fn coefficient_g(&self, s_grid: &[f64]) -> Result<CoefficientTable> {
        let g = s_grid.iter().map(|&s| self.g(s)).collect::<Result<Vec<_>>>()?;
        let sup_g = g.iter().copied().fold(0.0, f64::max);
        Ok(CoefficientTable {
            s_nodes: s_grid.to_vec(),
            g,
            sup_g,
        })
    }

    /// `S^(-(p+1)/2) int_0^S s^(p+1) g(s) ds` for each `S` in `s_points`,
    /// integrated in the Kelvin variable so no inversion is needed inside.
    pub fn growth_functional(&self, s_points: &[f64]) -> Result<Vec<f64>> {
        let p = self.p;
        let n = self.dim as f64;
        let integrand = |t: f64| -> f64 {
            let s = self.s_of_t(t).unwrap_or(0.0);
            let f = self.phi_t(t).0;
            s.powf(p + 1.0) * t.powf(-2.0 * (n - 1.0) / (n - 2.0)) * f.powf(p + 1.0) / ((n - 2.0) * (n - 2.0))
        };
        let mut out = Vec::with_capacity(s_points.len());
        for &big_s in s_points {
            let t_end = self.t_of_s(big_s)?;
            let mut acc = 0.0;
            for w in self.edges.windows(2) {
                if w[0] >= t_end {
                    break;
                }
                acc += gl_panel(integrand, w[0], w[1].min(t_end));
            }
            out.push(big_s.powf(-(p + 1.0) / 2.0) * acc);
        }
        Ok(out)
    }

    /// Map a profile vanishing at `r = b` to `w(s) = U(t)/Phi(t)`. Nodes beyond
    /// `t_max` are dropped.
    pub fn to_w(&self, profile: &RadialProfile) -> Result<TransformedProfile> {
        let (_, r_hi) = profile.span();
        if (r_hi - self.b).abs() > 1e-9 * self.b {
            return Err(Error::Precondition(format!("profile ends at {r_hi}, expected b = {}", self.b)));
        }
        let tol = 1e-8 * profile.max_abs_u().max(1e-300) + 1e-12;
        if profile.u().last().unwrap().abs() > tol {
            return Err(Error::Precondition(format!(
                "profile does not vanish at b: u(b) = {}",
                profile.u().last().unwrap()
            )));
        }
        let mut s_nodes = Vec::new();
        let mut radii = Vec::new();
        let mut w = Vec::new();
        let mut wprime = Vec::new();
        for (r, u, up) in profile.rows().collect::<Vec<_>>().into_iter().rev() {
            if r <= 0.0 {
                continue;
            }
            let k = kelvin_point(self.dim, r, u, up);
            if k.t > self.t_max {
                break;
            }
            let (f, fp) = self.phi_t(k.t);
            let s = self.s_of_t(k.t)?;
            if s_nodes.last().is_some_and(|&last| s <= last) {
                continue;
            }
            s_nodes.push(s);
            radii.push(r);
            w.push(k.u / f);
            wprime.push(k.du_dt * f - k.u * fp);
        }
        let c_end = *s_nodes.last().unwrap_or(&0.0);
        Ok(TransformedProfile {
            s_nodes,
            radii,
            w,
            wprime,
            origin: profile.clone(),
            c_end,
        })
    }

    /// Composite sum over the origin profile's cells in `r`, restricted to the
    /// covered range.
    fn r_quadrature<F: Fn(f64, f64, f64, f64, f64) -> f64>(&self, tp: &TransformedProfile, f: F) -> f64 {
        let r_lo = r_of_t(self.dim, self.t_max);
        let (x, wts) = gl8();
        let mut total = 0.0;
        for (lo, hi) in tp.origin.cells() {
            let (lo, hi) = (lo.max(r_lo), hi.min(self.b));
            if hi <= lo {
                continue;
            }
            let half = 0.5 * (hi - lo);
            let mid = 0.5 * (hi + lo);
            let mut acc = 0.0;
            for (xi, wi) in x.iter().zip(wts) {
                let r = mid + half * xi;
                let (u, up) = tp.origin.eval(r).unwrap();
                let (ph, php) = self.phi_at_r(r);
                acc += wi * f(r, u, up, ph, php);
            }
            total += acc * half;
        }
        total
    }

    /// `int |w'|^2 ds`, evaluated as `(N-2)^-1 int r^(N-1) (u' phi - u phi')^2 / phi^2 dr`.
    pub fn dirichlet_integral(&self, tp: &TransformedProfile) -> f64 {
        let n = self.dim as f64;
        let k = self.dim as i32 - 1;
        self.r_quadrature(tp, |r, u, up, ph, php| {
            let q = (up * ph - u * php) / ph;
            r.powi(k) * q * q
        }) / (n - 2.0)
    }

    /// `int g |w|^(p+1) ds`, evaluated as `(N-2)^-1 int r^(N-1) |u|^(p+1) dr`.
    pub fn potential_integral(&self, tp: &TransformedProfile) -> f64 {
        let n = self.dim as f64;
        let k = self.dim as i32 - 1;
        let p = self.p;
        self.r_quadrature(tp, |r, u, _, _, _| r.powi(k) * u.abs().powf(p + 1.0)) / (n - 2.0)
    }

    /// Largest relative residual of `w'' + g |w|^(p-1) w = 0` at interior nodes,
    /// with `w''` assembled from the continuous extensions of `u` and `phi` and
    /// scaled by the size of the terms that cancel in it.
    pub fn w_equation_residual(&self, tp: &TransformedProfile) -> f64 {
        let n = self.dim as f64;
        let p = self.p;
        let mut worst: f64 = 0.0;
        let m = tp.s_nodes.len();
        for i in 1..m.saturating_sub(1) {
            let r = tp.radii[i];
            let t = t_of_r(self.dim, r);
            let (u, up) = tp.origin.eval(r).unwrap();
            let (_, upp) = tp.origin.eval_deriv(r).unwrap();
            let (ph, php) = self.phi_at_r(r);
            let (_, phpp) = self.phi.eval_deriv(r).unwrap();
            let scale = r.powi(2 * (self.dim as i32 - 1)) / ((n - 2.0) * (n - 2.0));
            let u_tt = scale * (upp + (n - 1.0) / r * up);
            let phi_tt = scale * (phpp + (n - 1.0) / r * php);
            let w_ss = (u_tt * ph - u * phi_tt) * ph * ph;
            let wv = u / ph;
            let force = self.g_of_t(t) * wv.abs().powf(p - 1.0) * wv;
            // the lambda parts of u_tt phi and u phi_tt cancel, so they set the scale
            let denom = ((u_tt * ph).abs() + (u * phi_tt).abs()) * ph * ph + force.abs();
            if denom > 0.0 {
                worst = worst.max((w_ss + force).abs() / denom);
            }
        }
        worst
    }
}

/// Tabulated `g(s)` and its supremum over the table.
#[derive(Debug, Clone, Serialize)]
pub struct CoefficientTable {
    pub s_nodes: Vec<f64>,
    pub g: Vec<f64>,
    pub sup_g: f64,
}

/// Profile in the Liouville variables.
#[derive(Debug, Clone)]
pub struct TransformedProfile {
    pub s_nodes: Vec<f64>,
    /// Source radius of each node.
    pub radii: Vec<f64>,
    pub w: Vec<f64>,
    pub wprime: Vec<f64>,
    pub origin: RadialProfile,
    pub c_end: f64,
}

impl TransformedProfile {
    /// `w'(0)`, equal to `-u'(b) b^(N-1) phi(b) / (N-2)`.
    pub fn initial_slope(&self) -> f64 {
        self.wprime[0]
    }
}
