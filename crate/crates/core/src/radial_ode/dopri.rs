//! Dormand-Prince 5(4) with the Hairer continuous extension, specialised to
//! the two-component state `(u, u')` used throughout the crate.

use super::FailReason;
use crate::numerics::brent;

pub type State = [f64; 2];

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const A71: f64 = 35.0 / 384.0;
const A73: f64 = 500.0 / 1113.0;
const A74: f64 = 125.0 / 192.0;
const A75: f64 = -2187.0 / 6784.0;
const A76: f64 = 11.0 / 84.0;

const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const D1: f64 = -12715105075.0 / 11282082432.0;
const D3: f64 = 87487479700.0 / 32700410799.0;
const D4: f64 = -10690763975.0 / 1880347072.0;
const D5: f64 = 701980252875.0 / 199316789632.0;
const D6: f64 = -1453857185.0 / 822651844.0;
const D7: f64 = 69997945.0 / 29380423.0;

/// Continuous extension of one accepted step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DenseSegment {
    r0: f64,
    h: f64,
    c: [State; 5],
}

impl DenseSegment {
    pub fn hi(&self) -> f64 {
        self.r0.max(self.r0 + self.h)
    }

    /// Exact extension of a trajectory that is quadratic in `r` on `[r0, r0 + h]`:
    /// `y(r0 + x) = y0 + d x + dd x^2 / 2` per component.
    pub fn quadratic(r0: f64, h: f64, y0: State, d: State, dd: State) -> Self {
        let mut c = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = h * d[i] + 0.5 * h * h * dd[i];
            c[0][i] = y0[i];
            c[1][i] = ydiff;
            c[2][i] = h * d[i] - ydiff;
        }
        Self { r0, h, c }
    }

    #[inline]
    fn theta(&self, r: f64) -> f64 {
        (r - self.r0) / self.h
    }

    pub fn eval(&self, r: f64) -> State {
        let t = self.theta(r);
        let t1 = 1.0 - t;
        let c = &self.c;
        let mut y = [0.0; 2];
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = c[0][i] + t * (c[1][i] + t1 * (c[2][i] + t * (c[3][i] + t1 * c[4][i])));
        }
        y
    }

    /// Derivative of the continuous extension with respect to `r`.
    pub fn eval_deriv(&self, r: f64) -> State {
        let t = self.theta(r);
        let t1 = 1.0 - t;
        let c = &self.c;
        let mut dy = [0.0; 2];
        for (i, d) in dy.iter_mut().enumerate() {
            let q = c[3][i] + t1 * c[4][i];
            let dq = -c[4][i];
            let p = c[2][i] + t * q;
            let dp = q + t * dq;
            let m = c[1][i] + t1 * p;
            let dm = -p + t1 * dp;
            *d = (m + t * dm) / self.h;
        }
        dy
    }
}

#[derive(Debug, Clone, Copy)]
pub struct StepOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h0: f64,
    pub overflow_guard: f64,
    pub max_steps: usize,
}

/// How the run ended.
#[derive(Debug, Clone, PartialEq)]
pub enum Termination {
    Reached,
    /// `u` crossed zero from positive values at `r`.
    Zero { r: f64, state: State },
    Failed(FailReason),
}

#[derive(Debug, Clone)]
pub struct Run {
    /// Radii of accepted nodes in integration order (includes the start).
    pub nodes: Vec<f64>,
    pub states: Vec<State>,
    pub segments: Vec<DenseSegment>,
    pub termination: Termination,
}

#[inline]
fn axpy(y: &State, h: f64, terms: &[(f64, &State)]) -> State {
    let mut out = *y;
    for (coef, k) in terms {
        out[0] += h * coef * k[0];
        out[1] += h * coef * k[1];
    }
    out
}

// Interior fractions of a step sampled for sign changes in addition to the
// endpoint, so that a double crossing inside one step is not missed.
const PROBES: [f64; 4] = [0.25, 0.5, 0.75, 1.0];

/// Integrate `y' = rhs(r, y)` from `r_start` toward `r_end` (either direction).
///
/// With `stop_at_zero`, the run ends at the first radius where `u = y[0]`
/// passes from positive to non-positive; a start with `u = 0` is allowed and
/// only arms the detector once `u` becomes positive.
pub fn integrate<F>(rhs: F, r_start: f64, y_start: State, r_end: f64, opts: &StepOptions, stop_at_zero: bool) -> Run
where
    F: Fn(f64, &State) -> State,
{
    let dir = (r_end - r_start).signum();
    let mut r = r_start;
    let mut y = y_start;
    let mut k1 = rhs(r, &y);
    let mut h = opts.h0.abs().min((r_end - r_start).abs()) * dir;
    let mut armed = y[0] > 0.0;

    let mut run = Run {
        nodes: vec![r],
        states: vec![y],
        segments: Vec::new(),
        termination: Termination::Reached,
    };

    let expo = 0.2;
    let safety = 0.9;
    let mut steps = 0usize;

    loop {
        if (r_end - r) * dir <= 0.0 {
            run.termination = Termination::Reached;
            return run;
        }
        if steps >= opts.max_steps {
            run.termination = Termination::Failed(FailReason::MaxSteps);
            return run;
        }
        let min_step = 16.0 * f64::EPSILON * r.abs().max(f64::MIN_POSITIVE);
        if h.abs() < min_step {
            run.termination = Termination::Failed(FailReason::StepUnderflow { radius: r });
            return run;
        }
        let mut last = false;
        if ((r + h) - r_end) * dir >= 0.0 {
            h = r_end - r;
            last = true;
        }

        let k2 = rhs(r + C2 * h, &axpy(&y, h, &[(A21, &k1)]));
        let k3 = rhs(r + C3 * h, &axpy(&y, h, &[(A31, &k1), (A32, &k2)]));
        let k4 = rhs(r + C4 * h, &axpy(&y, h, &[(A41, &k1), (A42, &k2), (A43, &k3)]));
        let k5 = rhs(
            r + C5 * h,
            &axpy(&y, h, &[(A51, &k1), (A52, &k2), (A53, &k3), (A54, &k4)]),
        );
        let k6 = rhs(
            r + h,
            &axpy(&y, h, &[(A61, &k1), (A62, &k2), (A63, &k3), (A64, &k4), (A65, &k5)]),
        );
        let y1 = axpy(&y, h, &[(A71, &k1), (A73, &k3), (A74, &k4), (A75, &k5), (A76, &k6)]);
        let r1 = if last { r_end } else { r + h };
        let k7 = rhs(r1, &y1);
        steps += 1;

        let mut err = 0.0;
        let mut finite = true;
        for i in 0..2 {
            let e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let sk = opts.atol + opts.rtol * y[i].abs().max(y1[i].abs());
            finite &= e.is_finite() && y1[i].is_finite();
            err += (e / sk) * (e / sk);
        }
        err = (err / 2.0).sqrt();

        if !finite {
            h *= 0.2;
            continue;
        }

        if err > 1.0 {
            let fac = (safety * err.powf(-expo)).max(0.2);
            h *= fac;
            continue;
        }

        let mut c = [[0.0; 2]; 5];
        for i in 0..2 {
            let ydiff = y1[i] - y[i];
            let bspl = h * k1[i] - ydiff;
            c[0][i] = y[i];
            c[1][i] = ydiff;
            c[2][i] = bspl;
            c[3][i] = ydiff - h * k7[i] - bspl;
            c[4][i] = h * (D1 * k1[i] + D3 * k3[i] + D4 * k4[i] + D5 * k5[i] + D6 * k6[i] + D7 * k7[i]);
        }
        let seg = DenseSegment { r0: r, h, c };

        if stop_at_zero {
            if !armed {
                // leaving a boundary zero
                if y1[0] > 0.0 {
                    armed = true;
                }
            } else if let Some(zero) = locate_zero(&seg, r, r1) {
                run.segments.push(seg);
                let state = seg.eval(zero);
                run.nodes.push(zero);
                run.states.push(state);
                run.termination = Termination::Zero { r: zero, state };
                return run;
            }
        }

        run.segments.push(seg);
        run.nodes.push(r1);
        run.states.push(y1);
        r = r1;
        y = y1;
        k1 = k7;

        // |u'| r has the scale of u near both the center and a singular start
        if y[0].abs() > opts.overflow_guard || (y[1] * r).abs() > opts.overflow_guard {
            run.termination = Termination::Failed(FailReason::Overflow { radius: r });
            return run;
        }

        let fac = (safety * err.max(1e-10).powf(-expo)).clamp(0.2, 10.0);
        h *= fac;
    }
}

fn locate_zero(seg: &DenseSegment, r0: f64, r1: f64) -> Option<f64> {
    let mut prev_t = 0.0;
    for &t in &PROBES {
        let rt = if t == 1.0 { r1 } else { r0 + t * (r1 - r0) };
        let u = seg.eval(rt)[0];
        if u <= 0.0 {
            let ra = r0 + prev_t * (r1 - r0);
            if u == 0.0 {
                return Some(rt);
            }
            let xtol = 4.0 * f64::EPSILON * rt.abs();
            return brent(|x| seg.eval(x)[0], ra, rt, xtol, 0.0, 200).ok();
        }
        prev_t = t;
    }
    None
}
