//! Piecewise functions on (0,1) with explicit jumps.
//!
//! A [`Curve`] stores strictly increasing nodes with a left limit and a value
//! (right limit) at each node, interpolating linearly inside cells. An
//! optional exact closure overrides interpolation for evaluation inside
//! cells, so quadrature sees the true function while rearrangement and
//! monotonicity checks work on the node data.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::grid::{self, Grid};

/// Shared scalar function.
pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

#[derive(Clone)]
pub struct Curve {
    nodes: Vec<f64>,
    left: Vec<f64>,
    right: Vec<f64>,
    exact: Option<RealFn>,
}

impl fmt::Debug for Curve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Curve")
            .field("nodes", &self.nodes.len())
            .field("exact", &self.exact.is_some())
            .finish()
    }
}

impl Curve {
    pub fn from_parts(
        nodes: Vec<f64>,
        left: Vec<f64>,
        right: Vec<f64>,
        exact: Option<RealFn>,
    ) -> Result<Self> {
        if nodes.is_empty() {
            return Err(Error::EmptyInput("curve without nodes".into()));
        }
        if left.len() != nodes.len() || right.len() != nodes.len() {
            return Err(Error::Domain("node/value length mismatch".into()));
        }
        if nodes.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::Domain("curve nodes must be strictly increasing".into()));
        }
        if nodes.iter().any(|&t| !(0.0..=1.0).contains(&t)) {
            return Err(Error::Domain("curve nodes must lie in [0,1]".into()));
        }
        if left.iter().chain(&right).any(|v| v.is_nan()) {
            return Err(Error::Domain("function undefined at a node".into()));
        }
        Ok(Self {
            nodes,
            left,
            right,
            exact,
        })
    }

    /// Continuous curve sampled from `f` at `nodes`, keeping `f` for exact
    /// evaluation.
    pub fn from_fn(nodes: &[f64], f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        Self::from_shared(nodes, Arc::new(f))
    }

    pub fn from_shared(nodes: &[f64], f: RealFn) -> Result<Self> {
        let values: Vec<f64> = nodes.iter().map(|&t| f(t)).collect();
        Self::from_parts(nodes.to_vec(), values.clone(), values, Some(f))
    }

    /// Continuous piecewise-linear interpolant of `values` at `nodes`.
    pub fn piecewise_linear(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        Self::from_parts(nodes, values.clone(), values, None)
    }

    /// Right-continuous step function equal to `values[i]` on
    /// `[breaks[i], breaks[i+1])`.
    pub fn steps(breaks: &[f64], values: &[f64]) -> Result<Self> {
        if breaks.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Domain("steps need one more break than values".into()));
        }
        let k = values.len();
        let mut left = Vec::with_capacity(k + 1);
        let mut right = Vec::with_capacity(k + 1);
        for i in 0..=k {
            left.push(values[i.saturating_sub(1)]);
            right.push(values[i.min(k - 1)]);
        }
        Self::from_parts(breaks.to_vec(), left, right, None)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            nodes: vec![0.0, 1.0],
            left: vec![c, c],
            right: vec![c, c],
            exact: None,
        }
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn left_values(&self) -> &[f64] {
        &self.left
    }

    pub fn right_values(&self) -> &[f64] {
        &self.right
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    pub fn exact_fn(&self) -> Option<&RealFn> {
        self.exact.as_ref()
    }

    fn locate(&self, t: f64) -> usize {
        // index of the first node strictly greater than t
        self.nodes.partition_point(|&x| x <= t)
    }

    /// Right-continuous value at `t`.
    pub fn eval(&self, t: f64) -> f64 {
        if let Some(f) = &self.exact {
            return f(t);
        }
        self.interpolate(t)
    }

    /// Value of the node interpolant, ignoring any exact closure.
    pub fn interpolate(&self, t: f64) -> f64 {
        let i = self.locate(t);
        if i == 0 {
            return self.right[0];
        }
        let n = self.nodes.len();
        if i == n {
            return self.right[n - 1];
        }
        let (a, b) = (self.nodes[i - 1], self.nodes[i]);
        let (va, vb) = (self.right[i - 1], self.left[i]);
        if t == a {
            return va;
        }
        va + (vb - va) * (t - a) / (b - a)
    }

    /// Left limit at `t` (differs from [`Curve::eval`] only at jump nodes).
    pub fn eval_left(&self, t: f64) -> f64 {
        let i = self.locate(t);
        if i > 0 && self.nodes[i - 1] == t {
            return self.left[i - 1];
        }
        self.eval(t)
    }

    /// Pointwise transform `t, v -> g(t, v)`, applied to both one-sided
    /// values at every node and to the exact closure. `g` must be continuous
    /// in `t`.
    pub fn map(&self, g: impl Fn(f64, f64) -> f64 + Send + Sync + 'static) -> Self {
        let g = Arc::new(g);
        let left = self
            .nodes
            .iter()
            .zip(&self.left)
            .map(|(&t, &v)| g(t, v))
            .collect();
        let right = self
            .nodes
            .iter()
            .zip(&self.right)
            .map(|(&t, &v)| g(t, v))
            .collect();
        let exact = self.exact.clone().map(|f| {
            let g = g.clone();
            Arc::new(move |t: f64| g(t, f(t))) as RealFn
        });
        Self {
            nodes: self.nodes.clone(),
            left,
            right,
            exact,
        }
    }

    /// Same function with a new exact closure (or none).
    pub fn with_exact(mut self, exact: Option<RealFn>) -> Self {
        self.exact = exact;
        self
    }

    /// Inserts extra nodes (values taken from [`Curve::eval`]); the function
    /// is unchanged wherever the curve has an exact closure.
    pub fn refined(&self, extra: &[f64]) -> Self {
        let merged = grid::merge_nodes(&self.nodes, extra);
        if merged.len() == self.nodes.len() {
            return self.clone();
        }
        let mut left = Vec::with_capacity(merged.len());
        let mut right = Vec::with_capacity(merged.len());
        let mut j = 0;
        for &t in &merged {
            while j < self.nodes.len() && self.nodes[j] < t {
                j += 1;
            }
            if j < self.nodes.len() && self.nodes[j] == t {
                left.push(self.left[j]);
                right.push(self.right[j]);
            } else {
                let v = self.eval(t);
                left.push(v);
                right.push(v);
            }
        }
        Self {
            nodes: merged,
            left,
            right,
            exact: self.exact.clone(),
        }
    }

    /// `t -> f(t) w(t)` on the curve's nodes merged with `extra`. The
    /// product carries a closure, so `w` is exact between nodes even when
    /// `f` is only a node interpolant. A zero factor wins over an infinite
    /// one (this only happens at the endpoints).
    pub fn times(&self, w: RealFn, extra: &[f64]) -> Result<Self> {
        let nodes = grid::merge_nodes(&self.nodes, extra);
        let prod = |v: f64, x: f64| if v == 0.0 || x == 0.0 { 0.0 } else { v * x };
        let mut left = Vec::with_capacity(nodes.len());
        let mut right = Vec::with_capacity(nodes.len());
        for &t in &nodes {
            let x = w(t);
            left.push(prod(self.eval_left(t), x));
            right.push(prod(self.eval(t), x));
        }
        let f = self.clone();
        let exact: RealFn = Arc::new(move |t: f64| prod(f.eval(t), w(t)));
        Self::from_parts(nodes, left, right, Some(exact))
    }

    /// Splits every cell into `k` equal sub-cells.
    pub fn subdivided(&self, k: usize) -> Self {
        if k <= 1 {
            return self.clone();
        }
        let mut extra = Vec::with_capacity(self.nodes.len() * (k - 1));
        for w in self.nodes.windows(2) {
            for j in 1..k {
                extra.push(w[0] + (w[1] - w[0]) * j as f64 / k as f64);
            }
        }
        self.refined(&extra)
    }

    /// `t -> f(1 - t)`.
    pub fn reflected(&self) -> Self {
        let n = self.nodes.len();
        let nodes = (0..n).map(|i| 1.0 - self.nodes[n - 1 - i]).collect();
        // right limits of the reflection are the old left limits
        let left = (0..n).map(|i| self.right[n - 1 - i]).collect();
        let right = (0..n).map(|i| self.left[n - 1 - i]).collect();
        let exact = self
            .exact
            .clone()
            .map(|f| Arc::new(move |t: f64| f(1.0 - t)) as RealFn);
        Self {
            nodes,
            left,
            right,
            exact,
        }
    }

    /// Smallest and largest one-sided node values.
    pub fn node_range(&self) -> (f64, f64) {
        self.left
            .iter()
            .chain(&self.right)
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }

    fn scale(&self) -> f64 {
        let (lo, hi) = self.node_range();
        lo.abs().max(hi.abs()).max(1.0)
    }

    pub fn is_nonincreasing(&self, tol: f64) -> bool {
        let tol = tol * self.scale();
        let n = self.nodes.len();
        (0..n).all(|i| self.right[i] <= self.left[i] + tol)
            && (0..n - 1).all(|i| self.left[i + 1] <= self.right[i] + tol)
    }

    pub fn is_nondecreasing(&self, tol: f64) -> bool {
        self.map(|_, v| -v).is_nonincreasing(tol)
    }

    /// Piecewise-constant difference quotients of the node interpolant.
    pub fn difference_slopes(&self) -> Self {
        let n = self.nodes.len();
        if n < 2 {
            return Self {
                nodes: self.nodes.clone(),
                left: vec![0.0; n],
                right: vec![0.0; n],
                exact: None,
            };
        }
        let slopes: Vec<f64> = (0..n - 1)
            .map(|i| (self.left[i + 1] - self.right[i]) / (self.nodes[i + 1] - self.nodes[i]))
            .collect();
        let mut left = Vec::with_capacity(n);
        let mut right = Vec::with_capacity(n);
        for i in 0..n {
            left.push(slopes[i.saturating_sub(1).min(n - 2)]);
            right.push(slopes[i.min(n - 2)]);
        }
        Self {
            nodes: self.nodes.clone(),
            left,
            right,
            exact: None,
        }
    }

    /// Quadrature nodes: the grid merged with the curve's own nodes inside
    /// `(floor, 1 - floor)`.
    pub fn quadrature_nodes(&self, grid: &Grid) -> Vec<f64> {
        let floor = grid.floor();
        let inner: Vec<f64> = self
            .nodes
            .iter()
            .copied()
            .filter(|&t| t > floor && t < 1.0 - floor)
            .collect();
        grid::merge_nodes(grid.nodes(), &inner)
    }

    /// `∫_0^1 k(t, f(t)) dt`: one Gauss panel per quadrature cell plus
    /// power-law extrapolation on `(0, floor)` and `(1 - floor, 1)`.
    pub fn integrate(&self, grid: &Grid, k: impl Fn(f64, f64) -> f64) -> f64 {
        let nodes = self.quadrature_nodes(grid);
        let g = |t: f64| k(t, self.eval(t));
        integrate_nodes(&nodes, grid.floor(), &g)
    }

    /// Largest value of `k(t, f(t))` over node one-sided limits and Gauss
    /// points of every quadrature cell.
    pub fn sup(&self, grid: &Grid, k: impl Fn(f64, f64) -> f64) -> f64 {
        let nodes = self.quadrature_nodes(grid);
        let mut best = f64::NEG_INFINITY;
        for &t in &nodes {
            best = best.max(k(t, self.eval(t))).max(k(t, self.eval_left(t)));
        }
        let (x, _) = grid::gauss_legendre();
        for w in nodes.windows(2) {
            let (a, b) = (w[0], w[1]);
            for xi in x {
                let t = 0.5 * (a + b) + 0.5 * (b - a) * xi;
                best = best.max(k(t, self.eval(t)));
            }
        }
        best
    }
}

/// `∫_0^1 g` over the given cells with endpoint extrapolation.
pub fn integrate_nodes(nodes: &[f64], floor: f64, g: &impl Fn(f64) -> f64) -> f64 {
    let head = grid::head_integral(floor, g);
    let tail = grid::tail_integral(floor, g);
    let body: f64 = nodes.windows(2).map(|w| grid::gauss_cell(w[0], w[1], g)).sum();
    head + body + tail
}

/// The curve `t -> ∫_{anchor}^t g` on `nodes` (anchor must be one of the
/// nodes), carrying an exact closure that finishes the partial cell with a
/// Gauss panel. Cells are accumulated outward from the anchor so values near
/// it do not inherit rounding from large contributions far away.
pub fn integral_curve(nodes: Vec<f64>, anchor: f64, g: RealFn) -> Result<Curve> {
    let k = nodes
        .iter()
        .position(|&t| t == anchor)
        .ok_or_else(|| Error::Domain("integration anchor is not a node".into()))?;
    let gf = |t: f64| g(t);
    let mut values = vec![0.0; nodes.len()];
    for i in (0..k).rev() {
        values[i] = values[i + 1] - grid::gauss_cell(nodes[i], nodes[i + 1], &gf);
    }
    for i in k + 1..nodes.len() {
        values[i] = values[i - 1] + grid::gauss_cell(nodes[i - 1], nodes[i], &gf);
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Integrability("integrand undefined on the grid".into()));
    }
    let shared_nodes = Arc::new(nodes.clone());
    let shared_values = Arc::new(values.clone());
    let gg = g.clone();
    let exact: RealFn = Arc::new(move |t: f64| {
        let nodes = &shared_nodes;
        let i = nodes.partition_point(|&x| x <= t);
        if i > 0 && (i > k || i == nodes.len()) {
            shared_values[i - 1] + grid::gauss_cell(nodes[i - 1], t, &|s| gg(s))
        } else {
            shared_values[i] - grid::gauss_cell(t, nodes[i], &|s| gg(s))
        }
    });
    Curve::from_parts(nodes, values.clone(), values, Some(exact))
}
