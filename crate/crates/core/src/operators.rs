//! Hardy operators `P`, `Q`, the isoperimetric Hardy operators `Q_I`, `Q̄_I`,
//! `Q̃_I`, the Bobkov modulus `β₁` with its dual recovery formula, and the
//! (peso) constant.

use std::sync::Arc;

use crate::curve::{integral_curve, Curve, RealFn};
use crate::error::{Error, Result};
use crate::grid::{self, Grid};
use crate::measures::ConvexEstimator;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HardyKind {
    /// `Pf(t) = (1/t)∫_0^t f`
    P,
    /// `Qf(t) = ∫_t^1 f(s) ds/s`
    Q,
}

/// Output of an operator on (0,1) with a description of how it was made.
#[derive(Debug, Clone)]
pub struct OperatorResult {
    pub curve: Curve,
    pub operator: &'static str,
    pub estimator: Option<String>,
    pub grid_len: usize,
}

impl OperatorResult {
    pub fn eval(&self, t: f64) -> f64 {
        self.curve.eval(t)
    }
}

fn shared(f: &Curve) -> RealFn {
    let f = f.clone();
    Arc::new(move |t: f64| f.eval(t))
}

pub fn hardy(f: &Curve, kind: HardyKind, grid: &Grid) -> Result<OperatorResult> {
    let nodes = f.quadrature_nodes(grid);
    let fe = shared(f);
    let curve = match kind {
        HardyKind::P => {
            let floor = nodes[0];
            let head = grid::head_integral(floor, &|t| fe(t));
            if !head.is_finite() {
                return Err(Error::Integrability("Pf: f is not integrable near 0".into()));
            }
            let cum = integral_curve(nodes.clone(), floor, fe)?;
            let vals: Vec<f64> = nodes
                .iter()
                .zip(cum.right_values())
                .map(|(&t, &c)| (head + c) / t)
                .collect();
            let exact: RealFn = Arc::new(move |t: f64| (head + cum.eval(t)) / t);
            Curve::from_parts(nodes, vals.clone(), vals, Some(exact))?
        }
        HardyKind::Q => {
            let last = *nodes.last().unwrap();
            let k: RealFn = Arc::new(move |s: f64| fe(s) / s);
            let tail = grid::tail_integral(1.0 - last, &|s| k(s));
            if !tail.is_finite() {
                return Err(Error::Integrability("Qf: f/s is not integrable near 1".into()));
            }
            let cum = integral_curve(nodes.clone(), last, k)?;
            let vals: Vec<f64> = cum.right_values().iter().map(|&c| tail - c).collect();
            let exact: RealFn = Arc::new(move |t: f64| tail - cum.eval(t));
            Curve::from_parts(nodes, vals.clone(), vals, Some(exact))?
        }
    };
    Ok(OperatorResult {
        curve,
        operator: match kind {
            HardyKind::P => "P",
            HardyKind::Q => "Q",
        },
        estimator: None,
        grid_len: grid.len(),
    })
}

/// `Q̄_I f(t) = ∫_t^{1/2} f(s) ds/I(s)` for `0 < t < 1`. On `(0,1/2)` this is
/// `Q_I f`.
pub fn q_bar(est: &ConvexEstimator, f: &Curve, grid: &Grid) -> Result<OperatorResult> {
    let nodes = f.quadrature_nodes(grid);
    let fe = shared(f);
    let e = *est;
    let k: RealFn = Arc::new(move |s: f64| {
        let v = fe(s);
        if v == 0.0 {
            0.0
        } else {
            v / e.eval(s)
        }
    });
    let cum = integral_curve(nodes.clone(), 0.5, k)?;
    let curve = cum.map(|_, v| -v);
    Ok(OperatorResult {
        curve,
        operator: "Q_bar_I",
        estimator: Some(est.name()),
        grid_len: grid.len(),
    })
}

/// `Q̄_I f(t)` at one point, integrating on graded cells between `t` and
/// `1/2` (geometric cells continue below the grid floor).
pub fn q_bar_at(est: &ConvexEstimator, f: &Curve, t: f64, grid: &Grid) -> Result<f64> {
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::Domain(format!("Q_bar_I needs t in (0,1), got {t}")));
    }
    let (lo, hi, sign) = if t <= 0.5 { (t, 0.5, 1.0) } else { (0.5, t, -1.0) };
    let mut cells: Vec<f64> = vec![lo];
    let mut x = grid.floor();
    while x > lo {
        x *= 0.5;
    }
    let mut below = Vec::new();
    let mut y = x * 2.0;
    while y < grid.floor() && y > lo {
        below.push(y);
        y *= 2.0;
    }
    cells.extend(below);
    cells.extend(
        f.quadrature_nodes(grid)
            .into_iter()
            .filter(|&s| s > lo && s < hi),
    );
    cells.push(hi);
    let k = |s: f64| {
        let v = f.eval(s);
        if v == 0.0 {
            0.0
        } else {
            v / est.eval(s)
        }
    };
    let v: f64 = cells.windows(2).map(|w| grid::gauss_cell(w[0], w[1], &k)).sum();
    Ok(sign * v)
}

/// `Q̃_I f(t) = (I(t)/t) Q_I f(t)` on `(0,1/2)`, zero on `[1/2,1)`.
pub fn q_tilde(est: &ConvexEstimator, f: &Curve, grid: &Grid) -> Result<OperatorResult> {
    let qb = q_bar(est, f, grid)?;
    let e = *est;
    let curve = qb
        .curve
        .map(move |t, v| if t < 0.5 { e.eval(t) / t * v } else { 0.0 });
    Ok(OperatorResult {
        curve,
        operator: "Q_tilde_I",
        estimator: Some(est.name()),
        grid_len: grid.len(),
    })
}

const SUP_XTOL: f64 = 1e-13;

/// `β₁(s) = sup_{s<t≤1/2} (t-s)/I(t)`.
pub fn beta1(est: &ConvexEstimator, s: f64, grid: &Grid) -> Result<f64> {
    if !(s > 0.0 && s < 0.5) {
        return Err(Error::Domain(format!("beta1 needs s in (0,1/2), got {s}")));
    }
    Ok(beta1_unchecked(est, s, grid.left_half()))
}

fn beta1_unchecked(est: &ConvexEstimator, s: f64, half: &[f64]) -> f64 {
    let start = half.partition_point(|&t| t <= s);
    let mut scan: Vec<f64> = Vec::with_capacity(half.len() - start + 1);
    scan.push(s);
    scan.extend_from_slice(&half[start..]);
    if *scan.last().unwrap() < 0.5 {
        scan.push(0.5);
    }
    let f = |t: f64| if t <= s { 0.0 } else { (t - s) / est.eval(t) };
    grid::scan_then_golden(&f, &scan, SUP_XTOL).1
}

/// `sup_{0<s<t} (t-s)/β₁(s)`, the estimator recovered from its Bobkov
/// modulus.
pub fn recover_estimator(est: &ConvexEstimator, t: f64, grid: &Grid) -> Result<f64> {
    Ok(recover_estimator_many(est, &[t], grid)?[0])
}

/// [`recover_estimator`] at many points sharing one table of `β₁`.
pub fn recover_estimator_many(est: &ConvexEstimator, ts: &[f64], grid: &Grid) -> Result<Vec<f64>> {
    if let Some(&t) = ts.iter().find(|&&t| !(t > 0.0 && t <= 0.5)) {
        return Err(Error::Domain(format!("recovery needs t in (0,1/2], got {t}")));
    }
    let half = grid.left_half();
    let s_nodes: Vec<f64> = half.iter().copied().filter(|&s| s < 0.5).collect();
    let table: Vec<f64> = s_nodes.iter().map(|&s| beta1_unchecked(est, s, half)).collect();
    Ok(ts
        .iter()
        .map(|&t| {
            let end = s_nodes.partition_point(|&s| s < t);
            if end == 0 {
                let f = |s: f64| (t - s) / beta1_unchecked(est, s, half);
                return grid::golden_max(&f, 0.0, t, SUP_XTOL).1.max(0.0);
            }
            let mut best = 0;
            let mut best_val = 0.0;
            for i in 0..end {
                let v = (t - s_nodes[i]) / table[i];
                if v > best_val {
                    best_val = v;
                    best = i;
                }
            }
            let lo = if best == 0 { 0.0 } else { s_nodes[best - 1] };
            let hi = if best + 1 < end { s_nodes[best + 1] } else { t };
            let f = |s: f64| {
                if s <= 0.0 || s >= t {
                    0.0
                } else {
                    (t - s) / beta1_unchecked(est, s, half)
                }
            };
            let (_, v) = grid::golden_max(&f, lo, hi, SUP_XTOL);
            best_val.max(v)
        })
        .collect())
}

/// Octaves below which the (peso) function is extrapolated.
const PESO_PROBES: [i32; 3] = [30, 60, 90];
/// Successive-difference ratio at which the (peso) function is taken to grow
/// without bound.
const PESO_DIVERGENCE_RATIO: f64 = 0.75;

/// `(I(t)/t)∫_t^{1/2} ds/I(s)` on log-spaced Gauss panels.
pub fn peso_function(est: &ConvexEstimator, t: f64) -> f64 {
    if !(t > 0.0 && t < 0.5) {
        return 0.0;
    }
    let (a, b) = (t.ln(), 0.5f64.ln());
    let panels = (((b - a) / std::f64::consts::LN_2) * 4.0).ceil().max(1.0) as usize;
    let h = (b - a) / panels as f64;
    let g = |u: f64| {
        let s = u.exp();
        s / est.eval(s)
    };
    let integral: f64 = (0..panels)
        .map(|i| grid::gauss_cell(a + h * i as f64, a + h * (i + 1) as f64, &g))
        .sum();
    est.eval(t) / t * integral
}

/// Smallest `c` with `∫_t^{1/2} ds/I(s) ≤ c t/I(t)` on `(0,1/2)`: grid
/// supremum plus an Aitken extrapolation of `t -> 0`; `+∞` when the
/// function keeps growing.
pub fn peso_constant(est: &ConvexEstimator, grid: &Grid) -> f64 {
    let mut best: f64 = 0.0;
    for &t in grid.left_half() {
        best = best.max(peso_function(est, t));
    }
    let g: Vec<f64> = PESO_PROBES
        .iter()
        .map(|&k| peso_function(est, 2f64.powi(-k)))
        .collect();
    if g.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    for &v in &g {
        best = best.max(v);
    }
    let (d1, d2) = (g[1] - g[0], g[2] - g[1]);
    let scale = g[2].abs().max(1e-300);
    if d1.abs() <= 1e-12 * scale && d2.abs() <= 1e-12 * scale {
        return best;
    }
    let r = d2 / d1;
    if d2 > 0.0 && r >= PESO_DIVERGENCE_RATIO {
        return f64::INFINITY;
    }
    if r.is_finite() && r.abs() < 1.0 {
        best = best.max(g[2] + d2 * r / (1.0 - r));
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{make_estimator, EstimatorFamily};
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn grid() -> Grid {
        Grid::graded(1024)
    }

    fn cauchy(alpha: f64) -> ConvexEstimator {
        make_estimator(EstimatorFamily::CauchyAlpha { alpha }, 1, 1.0).unwrap()
    }

    fn one() -> Curve {
        Curve::constant(1.0)
    }

    #[test]
    fn hardy_examples() {
        let g = grid();
        let p = hardy(&one(), HardyKind::P, &g).unwrap();
        for t in [1e-9, 0.3, 0.9] {
            assert_relative_eq!(p.eval(t), 1.0, max_relative = 1e-13);
        }
        let lin = Curve::from_fn(g.nodes(), |t| t).unwrap();
        let p = hardy(&lin, HardyKind::P, &g).unwrap();
        for t in [1e-9, 0.3, 0.9] {
            assert_relative_eq!(p.eval(t), t / 2.0, max_relative = 1e-12);
        }
        let q = hardy(&one(), HardyKind::Q, &g).unwrap();
        for t in [1e-9, 0.3, 0.9] {
            assert_relative_eq!(q.eval(t), (1.0 / t).ln(), max_relative = 1e-12);
        }
        let inv = Curve::from_fn(g.nodes(), |t| 1.0 / t).unwrap();
        assert!(matches!(hardy(&inv, HardyKind::P, &g), Err(Error::Integrability(_))));
    }

    #[test]
    fn q_bar_examples() {
        let g = grid();
        let est = cauchy(1.0);
        let qb = q_bar(&est, &one(), &g).unwrap();
        assert_relative_eq!(qb.eval(0.25), 2.0, max_relative = 1e-13);
        assert_relative_eq!(qb.eval(0.75), -2.0, max_relative = 1e-13);
        for t in [1e-6, 0.1, 0.3, 0.6, 0.9] {
            let want = if t <= 0.5 { 1.0 / t - 2.0 } else { 2.0 - 1.0 / (1.0 - t) };
            assert_relative_eq!(qb.eval(t), want, max_relative = 1e-11);
            assert_relative_eq!(q_bar_at(&est, &one(), t, &g).unwrap(), want, max_relative = 1e-11);
        }
        let e2 = est;
        let f_is_i = Curve::from_fn(g.nodes(), move |t| e2.eval(t)).unwrap();
        let qi = q_bar(&est, &f_is_i, &g).unwrap();
        for t in [1e-6, 0.1, 0.4] {
            assert_relative_eq!(qi.eval(t), 0.5 - t, max_relative = 1e-12);
        }
        assert!(q_bar_at(&est, &one(), 0.0, &g).is_err());
    }

    #[test]
    fn q_tilde_examples() {
        let g = grid();
        let est = cauchy(1.0);
        assert_relative_eq!(q_tilde(&est, &one(), &g).unwrap().eval(0.25), 0.5, max_relative = 1e-13);
        assert_eq!(q_tilde(&est, &Curve::constant(0.0), &g).unwrap().eval(0.25), 0.0);
        let e2 = est;
        let f_is_i = Curve::from_fn(g.nodes(), move |t| e2.eval(t)).unwrap();
        assert_relative_eq!(
            q_tilde(&est, &f_is_i, &g).unwrap().eval(0.25),
            1.0 / 16.0,
            max_relative = 1e-12
        );
    }

    #[test]
    fn beta1_examples() {
        let g = grid();
        let est = cauchy(1.0);
        assert_relative_eq!(beta1(&est, 0.1, &g).unwrap(), 2.5, max_relative = 1e-9);
        assert_relative_eq!(beta1(&est, 0.3, &g).unwrap(), 0.8, max_relative = 1e-12);
        assert!(beta1(&est, 0.5 - 1e-9, &g).unwrap() < 1e-7);
        assert!(beta1(&est, 0.5, &g).is_err());
        let prev: Vec<f64> = g.left_half()[..g.left_half().len() - 1]
            .iter()
            .map(|&s| beta1(&est, s, &g).unwrap())
            .collect();
        assert!(prev.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }

    #[test]
    fn recovery_examples() {
        let g = grid();
        let est = cauchy(1.0);
        assert_relative_eq!(recover_estimator(&est, 0.3, &g).unwrap(), 0.09, max_relative = 1e-9);
        let e2 = cauchy(2.0);
        let ts: Vec<f64> = g.left_half().to_vec();
        let rec = recover_estimator_many(&e2, &ts, &g).unwrap();
        for (&t, &r) in ts.iter().zip(&rec) {
            let i = e2.eval(t);
            assert!(r <= i * (1.0 + 1e-9), "t={t}");
            assert!((r / i - 1.0).abs() <= 1e-3, "t={t} r={r} I={i}");
        }
    }

    #[test]
    fn peso_examples() {
        let g = grid();
        for alpha in [0.5, 1.0, 2.0, 5.0] {
            let c = peso_constant(&cauchy(alpha), &g);
            assert!((c - alpha).abs() <= 1e-6, "alpha={alpha} c={c}");
        }
        assert_relative_eq!(peso_function(&cauchy(1.0), 0.25), 0.5, max_relative = 1e-13);
        // ∫ds/(s sqrt(ln e/s)) grows like sqrt(ln 1/t): the function is unbounded
        let gauss = make_estimator(EstimatorFamily::GaussianConcave, 1, 1.0).unwrap();
        assert!(peso_constant(&gauss, &g).is_infinite());
        let sub = make_estimator(EstimatorFamily::SubExpP { p: 0.5 }, 1, 1.0).unwrap();
        assert!(peso_constant(&sub, &g).is_infinite());
        let neg = make_estimator(EstimatorFamily::NegDimN { n: -0.5 }, 1, 1.0).unwrap();
        assert!((peso_constant(&neg, &g) - 1.0).abs() <= 1e-6);
    }

    #[test]
    fn q_bar_reflection_identity() {
        // f supported in (1/2,1): direct and reflected norms agree
        let g = grid();
        let est = cauchy(1.5);
        let f = Curve::from_fn(g.nodes(), |t| if t > 0.5 { (t - 0.5) * (1.0 - t) } else { 0.0 }).unwrap();
        let direct = q_bar(&est, &f, &g).unwrap();
        let reflected_f = f.reflected();
        let refl = q_bar(&est, &reflected_f, &g).unwrap();
        let y = crate::rispace::RISpace::lp(2.0).unwrap();
        let a = crate::rispace::norm_of_curve(&y, &direct.curve.map(|t, v| if t > 0.5 { v } else { 0.0 }), &g).unwrap();
        let b = crate::rispace::norm_of_curve(&y, &refl.curve.map(|t, v| if t < 0.5 { v } else { 0.0 }), &g).unwrap();
        assert!((a - b).abs() <= 1e-8 * a.max(1e-300), "{a} vs {b}");
    }

    #[test]
    fn q_bar_is_nonincreasing_for_nonnegative_input() {
        let g = grid();
        let est = cauchy(1.0);
        let f = Curve::from_fn(g.nodes(), |t| (10.0 * t).sin().abs()).unwrap();
        let qb = q_bar(&est, &f, &g).unwrap();
        assert!(qb.curve.is_nonincreasing(0.0));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]

        #[test]
        fn q_tilde_contractions(knots in prop::collection::vec(0.0f64..10.0, 2..12)) {
            let g = Grid::graded(512);
            let est = cauchy(1.0);
            let k = knots.len();
            let nodes: Vec<f64> = (0..k).map(|i| i as f64 / (k - 1) as f64).collect();
            let f = Curve::piecewise_linear(nodes, knots.clone()).unwrap().refined(g.nodes());
            let qt = q_tilde(&est, &f, &g).unwrap();
            let l1_f = f.integrate(&g, |_, v| v.abs());
            let l1_q = qt.curve.integrate(&g, |_, v| v.abs());
            prop_assert!(l1_q <= l1_f * (1.0 + 1e-6));
            let sup_f = knots.iter().cloned().fold(0.0, f64::max);
            let sup_q = qt.curve.sup(&g, |_, v| v.abs());
            prop_assert!(sup_q <= peso_constant(&est, &g) * sup_f * (1.0 + 1e-6));
        }
    }
}
