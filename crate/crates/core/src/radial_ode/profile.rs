use super::dopri::{DenseSegment, Run};

/// Where a trajectory was started.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub enum StartKind {
    Center,
    InnerBoundary,
    OuterBoundaryBackward,
    SingularAsymptotic,
}

/// Dense numerical trajectory `(r, u(r), u'(r))` of one initial value solve.
///
/// Nodes are stored in increasing radius regardless of the direction of
/// integration; between nodes the solver's continuous extension is used.
#[derive(Debug, Clone)]
pub struct RadialProfile {
    nodes: Vec<f64>,
    u: Vec<f64>,
    uprime: Vec<f64>,
    start_kind: StartKind,
    segments: Vec<DenseSegment>,
}

impl RadialProfile {
    pub(crate) fn from_run(run: &Run, start_kind: StartKind) -> Self {
        let mut nodes = run.nodes.clone();
        let mut u: Vec<f64> = run.states.iter().map(|s| s[0]).collect();
        let mut uprime: Vec<f64> = run.states.iter().map(|s| s[1]).collect();
        let mut segments = run.segments.clone();
        let backward = nodes.len() > 1 && nodes[nodes.len() - 1] < nodes[0];
        if backward {
            nodes.reverse();
            u.reverse();
            uprime.reverse();
            segments.reverse();
        }
        // an event can land on top of the previous node; keep strict order
        if nodes.windows(2).any(|w| w[1] <= w[0]) {
            let mut keep = Vec::with_capacity(nodes.len());
            for (i, r) in nodes.iter().enumerate() {
                if keep.last().map_or(true, |&j: &usize| *r > nodes[j]) {
                    keep.push(i);
                }
            }
            nodes = keep.iter().map(|&i| nodes[i]).collect();
            u = keep.iter().map(|&i| u[i]).collect();
            uprime = keep.iter().map(|&i| uprime[i]).collect();
        }
        Self {
            nodes,
            u,
            uprime,
            start_kind,
            segments,
        }
    }

    /// Prepend the series part `[0, nodes[0]]` of a center start: `u(0) = alpha`,
    /// `u'(0) = 0`, `u''(0) = -curvature`.
    pub(crate) fn with_center_cap(mut self, alpha: f64, curvature: f64) -> Self {
        let eps = self.nodes[0];
        let cap = DenseSegment::quadratic(0.0, eps, [alpha, 0.0], [0.0, -curvature], [-curvature, 0.0]);
        self.nodes.insert(0, 0.0);
        self.u.insert(0, alpha);
        self.uprime.insert(0, 0.0);
        self.segments.insert(0, cap);
        self
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn u(&self) -> &[f64] {
        &self.u
    }

    pub fn uprime(&self) -> &[f64] {
        &self.uprime
    }

    pub fn start_kind(&self) -> StartKind {
        self.start_kind
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Smallest and largest stored radius.
    pub fn span(&self) -> (f64, f64) {
        (self.nodes[0], self.nodes[self.nodes.len() - 1])
    }

    pub fn max_abs_u(&self) -> f64 {
        self.u.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    fn segment_for(&self, r: f64) -> Option<&DenseSegment> {
        let (lo, hi) = self.span();
        if !(lo..=hi).contains(&r) || self.segments.is_empty() {
            return None;
        }
        let idx = self.segments.partition_point(|s| s.hi() < r);
        self.segments.get(idx.min(self.segments.len() - 1))
    }

    /// `(u, u')` at `r` through the continuous extension, or `None` outside
    /// the stored span.
    pub fn eval(&self, r: f64) -> Option<(f64, f64)> {
        if let Ok(i) = self.nodes.binary_search_by(|x| x.total_cmp(&r)) {
            return Some((self.u[i], self.uprime[i]));
        }
        self.segment_for(r).map(|s| {
            let y = s.eval(r);
            (y[0], y[1])
        })
    }

    /// `(u', u'')` at `r`, by differentiating the continuous extension.
    pub fn eval_deriv(&self, r: f64) -> Option<(f64, f64)> {
        self.segment_for(r).map(|s| {
            let dy = s.eval_deriv(r);
            (dy[0], dy[1])
        })
    }

    /// Iterator over `(r, u, u')` node triples.
    pub fn rows(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        self.nodes
            .iter()
            .zip(&self.u)
            .zip(&self.uprime)
            .map(|((r, u), up)| (*r, *u, *up))
    }

    /// Consecutive node pairs, used as quadrature cells.
    pub fn cells(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.nodes.windows(2).map(|w| (w[0], w[1]))
    }
}
