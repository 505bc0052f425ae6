//! Decreasing and signed rearrangements, maximal functions, medians and
//! truncations.
//!
//! Rearrangements of sampled data are weighted step functions. Rearrangements
//! of transfer profiles `F` on (0,1) are exact: monotone inputs are returned
//! (or reflected) together with their closed form, anything else goes
//! through a distribution-function sweep that is exact for the piecewise
//! linear node interpolant.

use std::sync::Arc;

use crate::curve::{integral_curve, Curve, RealFn};
use crate::error::{Error, Result};
use crate::grid::{self, Grid};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileKind {
    /// `f*`, rearrangement of `|f|`.
    Nonincreasing,
    /// `f★`, rearrangement of `f` itself.
    Signed,
}

/// A nonincreasing function on (0,1).
#[derive(Debug, Clone)]
pub struct QuantileProfile {
    curve: Curve,
    kind: ProfileKind,
    slope: Option<Curve>,
}

/// Relative tolerance of the monotonicity check on construction.
const MONOTONE_TOL: f64 = 1e-12;

impl QuantileProfile {
    pub fn new(curve: Curve, kind: ProfileKind) -> Result<Self> {
        if !curve.is_nonincreasing(MONOTONE_TOL) {
            return Err(Error::Domain("quantile profile must be nonincreasing".into()));
        }
        if kind == ProfileKind::Nonincreasing && curve.node_range().0 < -MONOTONE_TOL {
            return Err(Error::Domain("decreasing rearrangement must be nonnegative".into()));
        }
        Ok(Self {
            curve,
            kind,
            slope: None,
        })
    }

    /// `χ_{[0,u)}`.
    pub fn indicator(u: f64) -> Result<Self> {
        if !(u > 0.0 && u <= 1.0) {
            return Err(Error::Domain(format!("indicator length must lie in (0,1], got {u}")));
        }
        let curve = if u == 1.0 {
            Curve::constant(1.0)
        } else {
            Curve::steps(&[0.0, u, 1.0], &[1.0, 0.0])?
        };
        Self::new(curve, ProfileKind::Nonincreasing)
    }

    /// Profile given by a closed form, sampled on `nodes`.
    pub fn from_fn(
        nodes: &[f64],
        kind: ProfileKind,
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Self::new(Curve::from_fn(nodes, f)?, kind)
    }

    /// Attaches the exact derivative of the profile.
    pub fn with_slope(mut self, slope: Curve) -> Self {
        self.slope = Some(slope);
        self
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn curve(&self) -> &Curve {
        &self.curve
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.curve.eval(t)
    }

    /// Derivative: the attached one if any, otherwise difference quotients of
    /// the node interpolant.
    pub fn slope(&self) -> Curve {
        self.slope
            .clone()
            .unwrap_or_else(|| self.curve.difference_slopes())
    }

    pub fn has_exact_slope(&self) -> bool {
        self.slope.is_some()
    }

    /// `f★(0⁺)`.
    pub fn ess_sup(&self) -> f64 {
        let v = self.curve.eval(0.0);
        if v.is_nan() {
            self.curve.right_values()[0]
        } else {
            v
        }
    }

    /// `f★(1⁻)`.
    pub fn ess_inf(&self) -> f64 {
        let v = self.curve.eval_left(1.0);
        if v.is_nan() {
            *self.curve.left_values().last().unwrap()
        } else {
            v
        }
    }

    /// Same profile reinterpreted as `f*`; requires nonnegative values.
    pub fn into_nonincreasing(self) -> Result<Self> {
        let slope = self.slope;
        let mut p = Self::new(self.curve, ProfileKind::Nonincreasing)?;
        p.slope = slope;
        Ok(p)
    }

    /// `λ f★` for `λ ≥ 0`.
    pub fn scaled(&self, lambda: f64) -> Self {
        Self {
            curve: self.curve.map(move |_, v| lambda * v),
            kind: self.kind,
            slope: self.slope.as_ref().map(|s| s.map(move |_, v| lambda * v)),
        }
    }
}

/// A function `F` on (0,1), optionally with its derivative.
#[derive(Debug, Clone)]
pub struct Transfer {
    pub value: Curve,
    pub slope: Option<Curve>,
}

impl Transfer {
    pub fn new(value: Curve) -> Self {
        Self { value, slope: None }
    }

    pub fn with_slope(value: Curve, slope: Curve) -> Self {
        Self {
            value,
            slope: Some(slope),
        }
    }

    /// Continuous closed-form `F` with closed-form `F′`.
    pub fn from_fns(
        nodes: &[f64],
        f: impl Fn(f64) -> f64 + Send + Sync + 'static,
        df: impl Fn(f64) -> f64 + Send + Sync + 'static,
    ) -> Result<Self> {
        Ok(Self::with_slope(Curve::from_fn(nodes, f)?, Curve::from_fn(nodes, df)?))
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.value.eval(t)
    }
}

/// What to rearrange.
#[derive(Debug, Clone, Copy)]
pub enum Input<'a> {
    /// Values with probability weights (uniform when `weights` is `None`).
    Samples {
        values: &'a [f64],
        weights: Option<&'a [f64]>,
    },
    Transfer(&'a Transfer),
}

/// `f*`, the nonincreasing rearrangement of `|input|`.
pub fn decreasing_rearrangement(input: Input<'_>) -> Result<QuantileProfile> {
    rearrange(input, true)
}

/// `f★`, the nonincreasing rearrangement of `input`.
pub fn signed_rearrangement(input: Input<'_>) -> Result<QuantileProfile> {
    rearrange(input, false)
}

fn rearrange(input: Input<'_>, abs: bool) -> Result<QuantileProfile> {
    let kind = if abs {
        ProfileKind::Nonincreasing
    } else {
        ProfileKind::Signed
    };
    match input {
        Input::Samples { values, weights } => {
            let curve = rearrange_samples(values, weights, abs)?;
            QuantileProfile::new(curve, kind)
        }
        Input::Transfer(t) => rearrange_transfer(t, abs, kind),
    }
}

fn rearrange_samples(values: &[f64], weights: Option<&[f64]>, abs: bool) -> Result<Curve> {
    if values.is_empty() {
        return Err(Error::EmptyInput("no sample values".into()));
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::Domain("sample values contain NaN".into()));
    }
    let n = values.len();
    let w: Vec<f64> = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::Domain("weights and values differ in length".into()));
            }
            if w.iter().any(|&x| !(x >= 0.0 && x.is_finite())) {
                return Err(Error::Domain("weights must be nonnegative".into()));
            }
            let total: f64 = w.iter().sum();
            if (total - 1.0).abs() > 1e-9 {
                return Err(Error::Domain(format!("weights sum to {total}, not 1")));
            }
            w.to_vec()
        }
        None => vec![1.0 / n as f64; n],
    };
    let vals: Vec<f64> = if abs {
        values.iter().map(|v| v.abs()).collect()
    } else {
        values.to_vec()
    };
    let mut order: Vec<usize> = (0..n).filter(|&i| w[i] > 0.0).collect();
    if order.is_empty() {
        return Err(Error::EmptyInput("all sample weights are zero".into()));
    }
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]));
    let mut breaks = vec![0.0];
    let mut steps: Vec<f64> = Vec::new();
    let mut acc = 0.0;
    for &i in &order {
        acc += w[i];
        if steps.last() == Some(&vals[i]) {
            *breaks.last_mut().unwrap() = acc;
        } else {
            steps.push(vals[i]);
            breaks.push(acc);
        }
    }
    let k = breaks.len() - 1;
    breaks[k] = 1.0;
    // drop breaks made non-increasing by rounding
    for i in 1..k {
        if breaks[i] >= 1.0 {
            return Err(Error::Domain("sample weights too small to resolve".into()));
        }
    }
    Curve::steps(&breaks, &steps)
}

fn rearrange_transfer(t: &Transfer, abs: bool, kind: ProfileKind) -> Result<QuantileProfile> {
    let f = &t.value;
    let (lo, hi) = f.node_range();
    let (curve, slope) = if abs && lo < 0.0 {
        if hi <= 0.0 {
            (
                f.map(|_, v| -v),
                t.slope.as_ref().map(|s| s.map(|_, v| -v)),
            )
        } else {
            // |F| has kinks between nodes; only the sweep is exact here
            return QuantileProfile::new(sweep(f, abs)?, kind);
        }
    } else {
        (f.clone(), t.slope.clone())
    };
    if curve.is_nonincreasing(0.0) {
        let p = QuantileProfile::new(curve, kind)?;
        return Ok(match slope {
            Some(s) => p.with_slope(s),
            None => p,
        });
    }
    if curve.is_nondecreasing(0.0) {
        let p = QuantileProfile::new(curve.reflected(), kind)?;
        return Ok(match slope {
            Some(s) => p.with_slope(s.reflected().map(|_, v| -v)),
            None => p,
        });
    }
    let swept = sweep(f, abs)?;
    QuantileProfile::new(swept, kind)
}

/// Nonincreasing rearrangement of an arbitrary curve on (0,1) (or of its
/// absolute value).
pub fn rearrange_curve(curve: &Curve, abs: bool) -> Result<QuantileProfile> {
    rearrange_transfer(&Transfer::new(curve.clone()), abs, kind_of(abs))
}

fn kind_of(abs: bool) -> ProfileKind {
    if abs {
        ProfileKind::Nonincreasing
    } else {
        ProfileKind::Signed
    }
}

struct Piece {
    len: f64,
    lo: f64,
    hi: f64,
}

/// Exact rearrangement of the node interpolant through its distribution
/// function `y -> |{F > y}|`, which is piecewise linear in `y`.
fn sweep(f: &Curve, abs: bool) -> Result<Curve> {
    let nodes = f.nodes();
    let (left, right) = (f.left_values(), f.right_values());
    let n = nodes.len();
    let mut raw: Vec<(f64, f64, f64, f64)> = Vec::with_capacity(n + 1);
    if nodes[0] > 0.0 {
        raw.push((0.0, nodes[0], right[0], right[0]));
    }
    for i in 0..n - 1 {
        raw.push((nodes[i], nodes[i + 1], right[i], left[i + 1]));
    }
    if nodes[n - 1] < 1.0 {
        raw.push((nodes[n - 1], 1.0, right[n - 1], right[n - 1]));
    }
    let mut pieces = Vec::with_capacity(raw.len() + 8);
    for (t0, t1, a, b) in raw {
        if abs && a * b < 0.0 {
            let tz = t0 + (t1 - t0) * a / (a - b);
            push_piece(&mut pieces, tz - t0, a.abs(), 0.0);
            push_piece(&mut pieces, t1 - tz, 0.0, b.abs());
        } else if abs {
            push_piece(&mut pieces, t1 - t0, a.abs(), b.abs());
        } else {
            push_piece(&mut pieces, t1 - t0, a, b);
        }
    }
    let mut levels: Vec<f64> = pieces.iter().flat_map(|p| [p.lo, p.hi]).collect();
    levels.sort_by(|a, b| b.total_cmp(a));
    levels.dedup();
    let index = |y: f64| levels.partition_point(|&l| l > y);
    let k = levels.len();
    let mut start = vec![0.0; k];
    let mut stop = vec![0.0; k];
    let mut flat = vec![0.0; k];
    for p in &pieces {
        if p.hi == p.lo {
            flat[index(p.hi)] += p.len;
        } else {
            let rate = p.len / (p.hi - p.lo);
            start[index(p.hi)] += rate;
            stop[index(p.lo)] += rate;
        }
    }
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(2 * k);
    let mut mass = 0.0;
    let mut rate = 0.0;
    for j in 0..k {
        points.push((mass, levels[j]));
        mass += flat[j];
        points.push((mass, levels[j]));
        rate += start[j] - stop[j];
        if rate < 0.0 {
            rate = 0.0;
        }
        if j + 1 < k {
            mass += rate * (levels[j] - levels[j + 1]);
        }
    }
    let total = mass;
    let mut s_nodes: Vec<f64> = Vec::with_capacity(points.len());
    let mut lv: Vec<f64> = Vec::new();
    let mut rv: Vec<f64> = Vec::new();
    for (s, y) in points {
        let s = (s / total).clamp(0.0, 1.0);
        match s_nodes.last() {
            Some(&last) if s - last <= 1e-15 => {
                *rv.last_mut().unwrap() = y;
            }
            _ => {
                s_nodes.push(s);
                lv.push(y);
                rv.push(y);
            }
        }
    }
    let last = s_nodes.len() - 1;
    s_nodes[last] = 1.0;
    if s_nodes.len() == 1 {
        return Ok(Curve::constant(rv[0]));
    }
    s_nodes[0] = 0.0;
    Curve::from_parts(s_nodes, lv, rv, None)
}

fn push_piece(out: &mut Vec<Piece>, len: f64, a: f64, b: f64) {
    if len <= 0.0 {
        return;
    }
    let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
    // numerically flat pieces count as constants
    let flat = hi - lo <= 1e-13 * lo.abs().max(hi.abs());
    out.push(Piece {
        len,
        lo: if flat { hi } else { lo },
        hi,
    });
}

/// `f**(t) = (1/t)∫_0^t f*`.
pub fn maximal(p: &QuantileProfile, grid: &Grid) -> Result<QuantileProfile> {
    if p.kind != ProfileKind::Nonincreasing {
        return Err(Error::Kind("maximal function needs a decreasing rearrangement".into()));
    }
    let curve = p.curve.clone();
    let nodes = curve.quadrature_nodes(grid);
    let floor = nodes[0];
    let head = grid::head_integral(floor, &|t| curve.eval(t));
    if !head.is_finite() {
        return Err(Error::Integrability("f* is not integrable near 0".into()));
    }
    let g: RealFn = {
        let c = curve.clone();
        Arc::new(move |t: f64| c.eval(t))
    };
    let cum = integral_curve(nodes.clone(), floor, g)?;
    let values: Vec<f64> = nodes
        .iter()
        .zip(cum.right_values())
        .map(|(&t, &c)| (head + c) / t)
        .collect();
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Integrability("f** is not finite on the grid".into()));
    }
    let exact: RealFn = Arc::new(move |t: f64| (head + cum.eval(t)) / t);
    let out = Curve::from_parts(nodes, values.clone(), values, Some(exact))?;
    QuantileProfile::new(out, ProfileKind::Nonincreasing)
}

/// `f★(1/2)`.
pub fn median(p: &QuantileProfile) -> f64 {
    p.eval(0.5)
}

/// `min(t₂ - t₁, max(0, F - t₁))`.
pub fn truncate(f: &Transfer, t1: f64, t2: f64) -> Result<Transfer> {
    if !(t1 < t2) {
        return Err(Error::Domain(format!("truncation needs t1 < t2, got {t1} >= {t2}")));
    }
    let mut value = f.value.clone();
    if !value.has_exact() {
        // break cells where the interpolant crosses a truncation level
        let nodes = value.nodes();
        let (l, r) = (value.left_values(), value.right_values());
        let mut extra = Vec::new();
        for i in 0..nodes.len() - 1 {
            let (a, b) = (r[i], l[i + 1]);
            for level in [t1, t2] {
                if (a - level) * (b - level) < 0.0 {
                    extra.push(nodes[i] + (nodes[i + 1] - nodes[i]) * (level - a) / (b - a));
                }
            }
        }
        extra.sort_by(f64::total_cmp);
        value = value.refined(&extra);
    }
    let cap = t2 - t1;
    let out = value.map(move |_, v| (v - t1).max(0.0).min(cap));
    let slope = match &f.slope {
        Some(s) => {
            let v = f.value.clone();
            Some(s.map(move |t, d| {
                let x = v.eval(t);
                if x > t1 && x < t2 {
                    d
                } else {
                    0.0
                }
            }))
        }
        None => None,
    };
    Ok(Transfer { value: out, slope })
}

/// `|{s : f★(s) > y}|`, the distribution function read off a profile.
pub fn distribution(p: &QuantileProfile, y: f64) -> f64 {
    if p.eval(0.0) <= y && p.ess_sup() <= y {
        return 0.0;
    }
    if p.eval(1.0 - f64::EPSILON) > y {
        return 1.0;
    }
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if p.eval(mid) > y {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

/// Kolmogorov distance between the empirical law of `samples` and the law of
/// `exact` (both in the signed or absolute sense matching `exact.kind()`).
pub fn ks_distance(samples: &[f64], exact: &QuantileProfile) -> Result<f64> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("no samples".into()));
    }
    let mut v: Vec<f64> = match exact.kind() {
        ProfileKind::Nonincreasing => samples.iter().map(|x| x.abs()).collect(),
        ProfileKind::Signed => samples.to_vec(),
    };
    v.sort_by(|a, b| b.total_cmp(a));
    let n = v.len() as f64;
    let mut worst: f64 = 0.0;
    let mut i = 0;
    while i < v.len() {
        let mut j = i;
        while j + 1 < v.len() && v[j + 1] == v[i] {
            j += 1;
        }
        // empirical |{f > y}| at the sample value and just below it
        let above = i as f64 / n;
        let at = (j + 1) as f64 / n;
        let d = distribution(exact, v[i]);
        let d_below = distribution(exact, v[i].next_down());
        worst = worst.max((d - above).abs()).max((d_below - at).abs());
        i = j + 1;
    }
    Ok(worst)
}

/// Half-width of the two-sided DKW band at confidence `1 - alpha`.
pub fn dkw_band(count: usize, alpha: f64) -> f64 {
    ((2.0 / alpha).ln() / (2.0 * count as f64)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::graded(1024)
    }

    fn samples(values: &[f64]) -> Input<'_> {
        Input::Samples {
            values,
            weights: None,
        }
    }

    #[test]
    fn sample_examples() {
        let p = decreasing_rearrangement(samples(&[3.0, 1.0, 2.0])).unwrap();
        assert_eq!(p.eval(0.1), 3.0);
        assert_eq!(p.eval(0.5), 2.0);
        assert_eq!(p.eval(0.9), 1.0);
        let s = signed_rearrangement(samples(&[-1.0, -2.0, 0.0])).unwrap();
        assert_eq!(s.eval(0.1), 0.0);
        assert_eq!(s.eval(0.5), -1.0);
        assert_eq!(s.eval(0.9), -2.0);
        let m = signed_rearrangement(samples(&[5.0, 5.0, 1.0])).unwrap();
        assert_eq!(median(&m), 5.0);
        assert!(decreasing_rearrangement(samples(&[])).is_err());
    }

    #[test]
    fn weights_must_sum_to_one() {
        let r = decreasing_rearrangement(Input::Samples {
            values: &[1.0, 2.0],
            weights: Some(&[0.5, 0.6]),
        });
        assert!(r.is_err());
        let p = decreasing_rearrangement(Input::Samples {
            values: &[1.0, 2.0],
            weights: Some(&[0.75, 0.25]),
        })
        .unwrap();
        assert_eq!(p.eval(0.2), 2.0);
        assert_eq!(p.eval(0.3), 1.0);
    }

    #[test]
    fn transfer_examples() {
        let g = grid();
        let f = Transfer::new(Curve::from_fn(g.nodes(), |t| (0.5 - t).max(0.0)).unwrap());
        let p = decreasing_rearrangement(Input::Transfer(&f)).unwrap();
        for t in [0.1, 0.3, 0.6] {
            assert_eq!(p.eval(t), (0.5 - t).max(0.0));
        }
        let id = Transfer::new(Curve::from_fn(g.nodes(), |t| t).unwrap());
        let p = decreasing_rearrangement(Input::Transfer(&id)).unwrap();
        for t in [0.1, 0.3, 0.6] {
            assert_relative_eq!(p.eval(t), 1.0 - t, epsilon = 1e-15);
        }
        let lin = Transfer::new(Curve::from_fn(g.nodes(), |t| 1.0 - 2.0 * t).unwrap());
        let s = signed_rearrangement(Input::Transfer(&lin)).unwrap();
        assert_eq!(median(&s), 0.0);
        for t in [0.1, 0.7] {
            assert_eq!(s.eval(t), 1.0 - 2.0 * t);
        }
        assert_eq!(s.ess_sup(), 1.0);
        let half = signed_rearrangement(Input::Transfer(&f)).unwrap();
        assert_eq!(median(&half), 0.0);
    }

    #[test]
    fn sweep_rearranges_absolute_value_of_a_line() {
        // |1 - 2t| rearranges to 1 - t
        let g = grid();
        let lin = Transfer::new(Curve::piecewise_linear(vec![0.0, 1.0], vec![1.0, -1.0]).unwrap());
        let p = decreasing_rearrangement(Input::Transfer(&lin)).unwrap();
        for &t in g.nodes() {
            assert!((p.eval(t) - (1.0 - t)).abs() < 1e-14, "t={t}");
        }
    }

    #[test]
    fn sweep_handles_jumps_and_plateaus() {
        // F = 0 on [0,0.2), 3 on [0.2,0.3), 1 on [0.3,0.7), 2 on [0.7,1)
        let f = Curve::steps(&[0.0, 0.2, 0.3, 0.7, 1.0], &[0.0, 3.0, 1.0, 2.0]).unwrap();
        let p = decreasing_rearrangement(Input::Transfer(&Transfer::new(f))).unwrap();
        assert_eq!(p.eval(0.05), 3.0);
        assert_eq!(p.eval(0.2), 2.0);
        assert_eq!(p.eval(0.5), 1.0);
        assert_eq!(p.eval(0.85), 0.0);
        assert!(p.curve().is_nonincreasing(0.0));
    }

    #[test]
    fn sweep_of_a_tent_matches_closed_form() {
        // F(t) = 1 - |2t - 1| is equimeasurable with 1 - t
        let g = grid();
        let f = Curve::from_fn(g.nodes(), |t| 1.0 - (2.0 * t - 1.0).abs()).unwrap();
        let p = rearrange_curve(&f, false).unwrap();
        for &t in g.nodes() {
            assert!((p.eval(t) - (1.0 - t)).abs() < 1e-12, "t={t}");
        }
    }

    #[test]
    fn maximal_examples() {
        let g = grid();
        let ind = QuantileProfile::indicator(0.25).unwrap();
        assert_relative_eq!(maximal(&ind, &g).unwrap().eval(0.5), 0.5, epsilon = 1e-14);
        let lin = QuantileProfile::from_fn(g.nodes(), ProfileKind::Nonincreasing, |t| 1.0 - t).unwrap();
        let m = maximal(&lin, &g).unwrap();
        for t in [1e-6, 0.1, 0.5, 0.9] {
            assert_relative_eq!(m.eval(t), 1.0 - t / 2.0, max_relative = 1e-12);
        }
        let pow = QuantileProfile::from_fn(g.nodes(), ProfileKind::Nonincreasing, |t| t.powf(-0.5)).unwrap();
        let m = maximal(&pow, &g).unwrap();
        for t in [1e-9, 1e-3, 0.3, 0.8] {
            assert_relative_eq!(m.eval(t), 2.0 * t.powf(-0.5), max_relative = 1e-10);
        }
        let inv = QuantileProfile::from_fn(g.nodes(), ProfileKind::Nonincreasing, |t| 1.0 / t).unwrap();
        assert!(matches!(maximal(&inv, &g), Err(Error::Integrability(_))));
        let signed = signed_rearrangement(samples(&[1.0, -1.0])).unwrap();
        assert!(matches!(maximal(&signed, &g), Err(Error::Kind(_))));
    }

    #[test]
    fn truncate_examples() {
        let f = Transfer::new(Curve::steps(&[0.0, 0.25, 0.5, 0.75, 1.0], &[0.0, 1.0, 2.0, 3.0]).unwrap());
        let t = truncate(&f, 1.0, 2.0).unwrap();
        let vals: Vec<f64> = [0.1, 0.3, 0.6, 0.9].iter().map(|&s| t.eval(s)).collect();
        assert_eq!(vals, vec![0.0, 0.0, 1.0, 1.0]);
        let t = truncate(&f, 0.0, 3.0).unwrap();
        for s in [0.1, 0.3, 0.6, 0.9] {
            assert_eq!(t.eval(s), f.eval(s));
        }
        let g = grid();
        let tri = Transfer::new(Curve::from_fn(g.nodes(), |t| (0.5 - t).max(0.0)).unwrap());
        let t = truncate(&tri, 0.1, 0.3).unwrap();
        let p = signed_rearrangement(Input::Transfer(&t)).unwrap();
        assert_relative_eq!(p.ess_sup() - p.ess_inf(), 0.2, epsilon = 1e-12);
        assert!(truncate(&tri, 0.3, 0.3).is_err());
    }

    #[test]
    fn truncating_an_interpolant_inserts_crossings() {
        let f = Transfer::new(Curve::piecewise_linear(vec![0.0, 1.0], vec![1.0, 0.0]).unwrap());
        let t = truncate(&f, 0.25, 0.5).unwrap();
        assert_relative_eq!(t.eval(0.6), 0.15, epsilon = 1e-15);
        assert_eq!(t.eval(0.2), 0.25);
        assert_eq!(t.eval(0.9), 0.0);
    }

    #[test]
    fn transfer_dkw_consistency() {
        let g = grid();
        let f = Transfer::new(Curve::from_fn(g.nodes(), |t| (1.0 - t).powi(2)).unwrap());
        let exact = decreasing_rearrangement(Input::Transfer(&f)).unwrap();
        let n = 100_000;
        let draws: Vec<f64> = (0..n)
            .map(|i| {
                use rand::Rng;
                let mut rng = crate::measures::point_rng(11, i as u64);
                f.eval(rng.random::<f64>())
            })
            .collect();
        let d = ks_distance(&draws, &exact).unwrap();
        assert!(d <= dkw_band(n, 0.01), "{d}");
    }

    proptest! {
        #[test]
        fn samples_are_equimeasurable(values in prop::collection::vec(-10.0f64..10.0, 1..60)) {
            let p = decreasing_rearrangement(samples(&values)).unwrap();
            let n = values.len();
            let mut from_profile: Vec<f64> = (0..n).map(|i| p.eval((i as f64 + 0.5) / n as f64)).collect();
            let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
            abs.sort_by(|a, b| b.total_cmp(a));
            from_profile.sort_by(|a, b| b.total_cmp(a));
            prop_assert_eq!(from_profile, abs);
        }

        #[test]
        fn maximal_dominates_and_is_subadditive(
            pairs in prop::collection::vec((0.0f64..5.0, 0.0f64..5.0), 1..40)
        ) {
            let g = Grid::graded(256);
            let u: Vec<f64> = pairs.iter().map(|p| p.0).collect();
            let v: Vec<f64> = pairs.iter().map(|p| p.1).collect();
            let w: Vec<f64> = pairs.iter().map(|p| p.0 + p.1).collect();
            let us = maximal(&decreasing_rearrangement(samples(&u)).unwrap(), &g).unwrap();
            let vs = maximal(&decreasing_rearrangement(samples(&v)).unwrap(), &g).unwrap();
            let wp = decreasing_rearrangement(samples(&w)).unwrap();
            let ws = maximal(&wp, &g).unwrap();
            for &t in g.nodes() {
                prop_assert!(ws.eval(t) <= us.eval(t) + vs.eval(t) + 1e-10);
                prop_assert!(wp.eval(t) <= ws.eval(t) + 1e-10);
            }
        }

        #[test]
        fn sweep_preserves_integrals(coef in prop::collection::vec(-3.0f64..3.0, 2..30)) {
            let k = coef.len();
            let nodes: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
            let f = Curve::piecewise_linear(nodes, coef.clone()).unwrap();
            let g = Grid::graded(256);
            let p = rearrange_curve(&f, true).unwrap();
            let direct: f64 = f.refined(&zero_crossings(&f)).integrate(&g, |_, v| v.abs());
            let rearranged = p.curve().integrate(&g, |_, v| v);
            prop_assert!((direct - rearranged).abs() <= 1e-12 * direct.max(1.0));
            let p2 = rearrange_curve(&f, false).unwrap();
            let sq: f64 = f.integrate(&g, |_, v| v * v);
            prop_assert!((sq - p2.curve().integrate(&g, |_, v| v * v)).abs() <= 1e-11 * sq.max(1.0));
        }
    }

    fn zero_crossings(f: &Curve) -> Vec<f64> {
        let nodes = f.nodes();
        let v = f.right_values();
        let mut out = Vec::new();
        for i in 0..nodes.len() - 1 {
            if v[i] * v[i + 1] < 0.0 {
                out.push(nodes[i] + (nodes[i + 1] - nodes[i]) * v[i] / (v[i] - v[i + 1]));
            }
        }
        out
    }
}
