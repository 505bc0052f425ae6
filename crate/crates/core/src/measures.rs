//! Model probability measures on ℝ, their products on ℝⁿ, exact isoperimetric
//! profiles `I_μ = φ ∘ H⁻¹`, and parametric convex isoperimetric estimators.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI, SQRT_2};

use rand::distr::{Distribution, Open01};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::function::{erf, gamma};

use crate::error::{Error, Result};
use crate::grid::Grid;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    CauchyAlpha,
    SubExpP,
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Law {
    /// `φ(s) = (α/2)(1+|s|)^{-(1+α)}`
    Cauchy { alpha: f64 },
    /// `φ(s) = e^{-|s|^p} / Z_p`
    SubExp { p: f64, z: f64 },
    Gaussian,
}

/// A symmetric probability measure on ℝ with closed-form or root-found
/// quantile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelMeasure1D {
    law: Law,
}

/// α-Cauchy law with the `(1+|s|)` density, whose profile is exactly
/// `α 2^{1/α} min(t,1-t)^{1+1/α}`.
pub fn make_cauchy(alpha: f64) -> Result<ModelMeasure1D> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::ParameterDomain(format!("cauchy alpha must be > 0, got {alpha}")));
    }
    Ok(ModelMeasure1D {
        law: Law::Cauchy { alpha },
    })
}

/// Sub-exponential law `e^{-|s|^p}/Z_p` with `Z_p = 2Γ(1+1/p)`.
pub fn make_subexp(p: f64) -> Result<ModelMeasure1D> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ParameterDomain(format!("sub-exponential p must lie in (0,1), got {p}")));
    }
    Ok(ModelMeasure1D {
        law: Law::SubExp {
            p,
            z: 2.0 * gamma::gamma(1.0 + 1.0 / p),
        },
    })
}

pub fn make_gaussian() -> ModelMeasure1D {
    ModelMeasure1D { law: Law::Gaussian }
}

impl ModelMeasure1D {
    pub fn family(&self) -> Family {
        match self.law {
            Law::Cauchy { .. } => Family::CauchyAlpha,
            Law::SubExp { .. } => Family::SubExpP,
            Law::Gaussian => Family::Gaussian,
        }
    }

    /// α for Cauchy, p for sub-exponential.
    pub fn parameter(&self) -> Option<f64> {
        match self.law {
            Law::Cauchy { alpha } => Some(alpha),
            Law::SubExp { p, .. } => Some(p),
            Law::Gaussian => None,
        }
    }

    pub fn normalization(&self) -> f64 {
        match self.law {
            Law::Cauchy { .. } => 1.0,
            Law::SubExp { z, .. } => z,
            Law::Gaussian => (2.0 * PI).sqrt(),
        }
    }

    pub fn name(&self) -> &'static str {
        match self.law {
            Law::Cauchy { .. } => "cauchy",
            Law::SubExp { .. } => "subexp",
            Law::Gaussian => "gaussian",
        }
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("measure".into(), self.name().into());
        match self.law {
            Law::Cauchy { alpha } => {
                m.insert("alpha".into(), alpha.to_string());
            }
            Law::SubExp { p, .. } => {
                m.insert("p".into(), p.to_string());
            }
            Law::Gaussian => {}
        }
        m
    }

    pub fn density(&self, s: f64) -> f64 {
        let x = s.abs();
        match self.law {
            Law::Cauchy { alpha } => 0.5 * alpha * (1.0 + x).powf(-(1.0 + alpha)),
            Law::SubExp { p, z } => (-x.powf(p)).exp() / z,
            Law::Gaussian => (-0.5 * x * x).exp() / (2.0 * PI).sqrt(),
        }
    }

    /// `μ((x, ∞))` for `x ≥ 0`.
    fn upper_tail(&self, x: f64) -> f64 {
        if x == 0.0 {
            return 0.5;
        }
        match self.law {
            Law::Cauchy { alpha } => 0.5 * (1.0 + x).powf(-alpha),
            Law::SubExp { p, .. } => 0.5 * gamma::gamma_ur(1.0 / p, x.powf(p)),
            Law::Gaussian => 0.5 * erf::erfc(x / SQRT_2),
        }
    }

    /// Distribution function `H(r) = μ((-∞, r])`.
    pub fn cdf(&self, r: f64) -> f64 {
        if r.is_nan() {
            return f64::NAN;
        }
        if r <= 0.0 {
            self.upper_tail(-r)
        } else {
            1.0 - self.upper_tail(r)
        }
    }

    /// `H⁻¹(t)` for `t ∈ (0,1)`.
    pub fn quantile(&self, t: f64) -> Result<f64> {
        if !(t > 0.0 && t < 1.0) {
            return Err(Error::Domain(format!("quantile needs t in (0,1), got {t}")));
        }
        Ok(self.quantile_unchecked(t))
    }

    pub(crate) fn quantile_unchecked(&self, t: f64) -> f64 {
        if t == 0.5 {
            0.0
        } else if t < 0.5 {
            -self.inverse_tail(t)
        } else {
            self.inverse_tail(1.0 - t)
        }
    }

    /// Solves `μ((x, ∞)) = tau` for `x ≥ 0`, `tau ∈ (0, 1/2]`.
    fn inverse_tail(&self, tau: f64) -> f64 {
        match self.law {
            Law::Cauchy { alpha } => (2.0 * tau).powf(-1.0 / alpha) - 1.0,
            Law::Gaussian => {
                let guess = SQRT_2 * erf::erfc_inv(2.0 * tau);
                self.newton_tail(tau, guess)
            }
            Law::SubExp { p, .. } => {
                let guess = (-(2.0 * tau).ln()).max(1e-3).powf(1.0 / p);
                self.newton_tail(tau, guess)
            }
        }
    }

    /// Safeguarded Newton iteration on `ln μ((x,∞)) - ln tau`, bracketed by
    /// bisection.
    fn newton_tail(&self, tau: f64, guess: f64) -> f64 {
        let target = tau.ln();
        let h = |x: f64| self.upper_tail(x).ln() - target;
        let mut lo = 0.0;
        let mut hi = guess.max(1.0);
        while h(hi) > 0.0 {
            lo = hi;
            hi *= 2.0;
            if hi > 1e300 {
                return f64::INFINITY;
            }
        }
        let mut x = if guess.is_finite() && guess > lo && guess < hi {
            guess
        } else {
            0.5 * (lo + hi)
        };
        for _ in 0..200 {
            let tail = self.upper_tail(x);
            let hx = tail.ln() - target;
            if hx == 0.0 {
                return x;
            }
            if hx > 0.0 {
                lo = x;
            } else {
                hi = x;
            }
            let slope = -self.density(x) / tail;
            let mut next = x - hx / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 4.0 * f64::EPSILON * x.abs().max(1e-300) || hi - lo <= f64::EPSILON * hi
            {
                return next;
            }
            x = next;
        }
        x
    }
}

/// `I_μ(t) = φ(H⁻¹(t))`.
pub fn exact_profile(m: &ModelMeasure1D, t: f64) -> Result<f64> {
    let r = m.quantile(t)?;
    Ok(m.density(r))
}

/// Product of `dim` identical copies of a one-dimensional model measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProductMeasure {
    base: ModelMeasure1D,
    dim: usize,
}

impl ProductMeasure {
    pub fn new(base: ModelMeasure1D, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::ParameterDomain("product dimension must be >= 1".into()));
        }
        Ok(Self { base, dim })
    }

    pub fn base(&self) -> &ModelMeasure1D {
        &self.base
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = self.base.params();
        m.insert("dim".into(), self.dim.to_string());
        m
    }
}

impl From<ModelMeasure1D> for ProductMeasure {
    fn from(base: ModelMeasure1D) -> Self {
        Self { base, dim: 1 }
    }
}

/// Seeded generator for point `index`; points are reproducible individually
/// regardless of evaluation order.
pub(crate) fn point_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// i.i.d. points of `μⁿ`, each coordinate drawn as `H⁻¹(U)`.
pub fn sample(m: &ProductMeasure, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    if count == 0 {
        return Err(Error::EmptyInput("sample count must be >= 1".into()));
    }
    Ok((0..count as u64)
        .map(|i| {
            let mut rng = point_rng(seed, i);
            (0..m.dim)
                .map(|_| {
                    let u: f64 = Open01.sample(&mut rng);
                    m.base.quantile_unchecked(u)
                })
                .collect()
        })
        .collect())
}

/// Mass and Minkowski content of the coordinate half-space `{x₁ < r}`.
pub fn halfspace(m: &ProductMeasure, r: f64) -> (f64, f64) {
    (m.base.cdf(r), m.base.density(r))
}

/// Parametric isoperimetric estimator families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimatorFamily {
    /// `c n^{-1/α} min(t,1-t)^{1+1/α}`
    CauchyAlpha { alpha: f64 },
    /// `c min(t,1-t) (ln(n/min(t,1-t)))^{1-1/p}`
    SubExpP { p: f64 },
    /// `c min(t,1-t)^{-1/N}` with `N < 0`
    NegDimN { n: f64 },
    /// `c min(t,1-t) (ln(e/min(t,1-t)))^{1/2}`
    GaussianConcave,
    /// `c I_μ(t)` for a model measure.
    Exact(ModelMeasure1D),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Convex,
    Concave,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConvexEstimator {
    family: EstimatorFamily,
    dim: usize,
    c: f64,
}

pub fn make_estimator(family: EstimatorFamily, dim: usize, c: f64) -> Result<ConvexEstimator> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::ParameterDomain(format!("estimator constant must be > 0, got {c}")));
    }
    if dim == 0 {
        return Err(Error::ParameterDomain("estimator dimension must be >= 1".into()));
    }
    match family {
        EstimatorFamily::CauchyAlpha { alpha } if !(alpha > 0.0 && alpha.is_finite()) => {
            return Err(Error::ParameterDomain(format!("alpha must be > 0, got {alpha}")))
        }
        EstimatorFamily::SubExpP { p } if !(p > 0.0 && p < 1.0) => {
            return Err(Error::ParameterDomain(format!("p must lie in (0,1), got {p}")))
        }
        EstimatorFamily::NegDimN { n } if !(n < 0.0 && n.is_finite()) => {
            return Err(Error::ParameterDomain(format!("N must be < 0, got {n}")))
        }
        _ => {}
    }
    Ok(ConvexEstimator { family, dim, c })
}

impl ConvexEstimator {
    /// Estimator equal to the exact profile of `m`.
    pub fn exact(m: ModelMeasure1D) -> Self {
        Self {
            family: EstimatorFamily::Exact(m),
            dim: 1,
            c: 1.0,
        }
    }

    pub fn family(&self) -> EstimatorFamily {
        self.family
    }

    pub fn constant(&self) -> f64 {
        self.c
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The same estimator multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            c: self.c * factor,
            ..*self
        }
    }

    pub fn eval(&self, t: f64) -> f64 {
        let m = t.min(1.0 - t);
        if !(m > 0.0) {
            return 0.0;
        }
        let n = self.dim as f64;
        let base = match self.family {
            EstimatorFamily::CauchyAlpha { alpha } => n.powf(-1.0 / alpha) * m.powf(1.0 + 1.0 / alpha),
            EstimatorFamily::SubExpP { p } => m * (n / m).ln().powf(1.0 - 1.0 / p),
            EstimatorFamily::NegDimN { n: big_n } => m.powf(-1.0 / big_n),
            EstimatorFamily::GaussianConcave => m * (E / m).ln().sqrt(),
            EstimatorFamily::Exact(measure) => {
                let r = measure.quantile_unchecked(m);
                measure.density(r)
            }
        };
        self.c * base
    }

    /// Shape guaranteed by the family on `(0, 1/2)`, when known analytically.
    pub fn shape(&self) -> Option<Shape> {
        match self.family {
            EstimatorFamily::CauchyAlpha { .. } | EstimatorFamily::SubExpP { .. } => Some(Shape::Convex),
            EstimatorFamily::NegDimN { n } if n >= -1.0 => Some(Shape::Convex),
            EstimatorFamily::NegDimN { .. } => Some(Shape::Concave),
            EstimatorFamily::GaussianConcave => Some(Shape::Concave),
            EstimatorFamily::Exact(m) => match m.family() {
                Family::CauchyAlpha => Some(Shape::Convex),
                Family::Gaussian => Some(Shape::Concave),
                Family::SubExpP => None,
            },
        }
    }

    /// Largest violation of convexity (positive) or concavity (negative
    /// second differences reported as their magnitude) on the left half of
    /// the grid, for the requested shape.
    pub fn shape_defect(&self, grid: &Grid, shape: Shape) -> f64 {
        let t = grid.left_half();
        let mut worst: f64 = 0.0;
        for w in t.windows(3) {
            let (a, b, c) = (w[0], w[1], w[2]);
            let (fa, fb, fc) = (self.eval(a), self.eval(b), self.eval(c));
            // divided second difference scaled to the cell
            let d2 = (fc - fb) / (c - b) - (fb - fa) / (b - a);
            let v = match shape {
                Shape::Convex => -d2,
                Shape::Concave => d2,
            };
            worst = worst.max(v);
        }
        worst
    }

    pub fn name(&self) -> String {
        match self.family {
            EstimatorFamily::CauchyAlpha { .. } => "cauchy".into(),
            EstimatorFamily::SubExpP { .. } => "subexp".into(),
            EstimatorFamily::NegDimN { .. } => "negdim".into(),
            EstimatorFamily::GaussianConcave => "gaussian-concave".into(),
            EstimatorFamily::Exact(m) => format!("exact-{}", m.name()),
        }
    }

    pub fn params(&self) -> BTreeMap<String, String> {
        let mut m = BTreeMap::new();
        m.insert("estimator".into(), self.name());
        m.insert("c".into(), self.c.to_string());
        m.insert("est_dim".into(), self.dim.to_string());
        match self.family {
            EstimatorFamily::CauchyAlpha { alpha } => {
                m.insert("est_alpha".into(), alpha.to_string());
            }
            EstimatorFamily::SubExpP { p } => {
                m.insert("est_p".into(), p.to_string());
            }
            EstimatorFamily::NegDimN { n } => {
                m.insert("est_N".into(), n.to_string());
            }
            EstimatorFamily::Exact(measure) => {
                if let Some(v) = measure.parameter() {
                    m.insert("est_param".into(), v.to_string());
                }
            }
            EstimatorFamily::GaussianConcave => {}
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cauchy_closed_profile(alpha: f64, t: f64) -> f64 {
        alpha * 2f64.powf(1.0 / alpha) * t.min(1.0 - t).powf(1.0 + 1.0 / alpha)
    }

    #[test]
    fn cauchy_examples() {
        let m = make_cauchy(1.0).unwrap();
        assert_eq!(m.density(0.0), 0.5);
        assert_eq!(m.cdf(0.0), 0.5);
        assert_relative_eq!(m.quantile(0.25).unwrap(), -1.0, epsilon = 1e-15);
        assert_relative_eq!(exact_profile(&m, 0.25).unwrap(), 0.125, epsilon = 1e-15);
        assert_relative_eq!(exact_profile(&m, 0.5).unwrap(), 0.5, epsilon = 1e-15);
        let m2 = make_cauchy(2.0).unwrap();
        assert_relative_eq!(exact_profile(&m2, 0.125).unwrap(), 0.125, epsilon = 1e-14);
        assert!(make_cauchy(0.0).is_err());
        assert!(make_cauchy(-1.0).is_err());
    }

    #[test]
    fn cauchy_profile_identity_on_grid() {
        let grid = Grid::graded(1024);
        for alpha in [0.5, 1.0, 2.0, 3.5] {
            let m = make_cauchy(alpha).unwrap();
            for &t in grid.nodes() {
                let got = exact_profile(&m, t).unwrap();
                let want = cauchy_closed_profile(alpha, t);
                assert!((got - want).abs() <= 1e-8, "alpha={alpha} t={t}");
            }
        }
    }

    #[test]
    fn subexp_examples() {
        let m = make_subexp(0.5).unwrap();
        assert_relative_eq!(m.normalization(), 4.0, epsilon = 1e-12);
        assert_relative_eq!(m.density(0.0), 0.25, epsilon = 1e-13);
        assert_eq!(m.cdf(0.0), 0.5);
        let r = m.quantile(m.cdf(1.7)).unwrap();
        assert!((r - 1.7).abs() < 1e-8);
        assert_relative_eq!(exact_profile(&m, 0.5).unwrap(), 0.25, epsilon = 1e-13);
        assert!(make_subexp(1.0).is_err());
        assert!(make_subexp(0.0).is_err());
    }

    #[test]
    fn gaussian_examples() {
        let m = make_gaussian();
        assert_eq!(m.cdf(0.0), 0.5);
        assert_relative_eq!(
            exact_profile(&m, 0.5).unwrap(),
            1.0 / (2.0 * PI).sqrt(),
            epsilon = 1e-15
        );
        for k in 0..=50 {
            let t = 10f64.powf(-8.0 + 5.0 * k as f64 / 50.0);
            let ratio = exact_profile(&m, t).unwrap() / (t * (1.0 / t).ln().sqrt());
            assert!((0.9..=1.5).contains(&ratio), "t={t} ratio={ratio}");
        }
    }

    #[test]
    fn quantile_round_trip_all_families() {
        let grid = Grid::graded(512);
        for m in [make_cauchy(0.7).unwrap(), make_subexp(0.3).unwrap(), make_gaussian()] {
            for &t in grid.nodes() {
                let r = m.quantile(t).unwrap();
                assert!((m.cdf(r) - t).abs() <= 1e-10 * t.min(1.0 - t).max(1e-3), "{m:?} t={t}");
            }
            assert!(m.quantile(0.0).is_err());
            assert!(m.quantile(1.0).is_err());
        }
    }

    #[test]
    fn densities_are_symmetric_and_normalized() {
        for m in [make_cauchy(1.5).unwrap(), make_subexp(0.5).unwrap(), make_gaussian()] {
            for s in [0.1, 1.0, 7.5] {
                assert_eq!(m.density(s), m.density(-s));
            }
            // 2∫_0^∞ φ
            let mut mass = 0.0;
            for j in -80..400 {
                let (a, b) = (2f64.powi(j), 2f64.powi(j + 1));
                for k in 0..8 {
                    let (lo, hi) = (a + (b - a) * k as f64 / 8.0, a + (b - a) * (k + 1) as f64 / 8.0);
                    mass += crate::grid::gauss_cell(lo, hi, &|s| m.density(s));
                }
            }
            assert_relative_eq!(2.0 * mass, 1.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn subexp_profile_ratio_stabilizes() {
        for p in [0.5, 0.75] {
            let m = make_subexp(p).unwrap();
            let r = |t: f64| exact_profile(&m, t).unwrap() / (t * (1.0 / t).ln().powf(1.0 - 1.0 / p));
            let (a, b) = (r(1e-6), r(1e-9));
            assert!((a - b).abs() <= 0.05 * a.max(b), "p={p}: {a} vs {b}");
        }
    }

    #[test]
    fn estimator_examples() {
        let c = make_estimator(EstimatorFamily::CauchyAlpha { alpha: 1.0 }, 1, 1.0).unwrap();
        assert_relative_eq!(c.eval(0.25), 0.0625, epsilon = 1e-16);
        let s = make_estimator(EstimatorFamily::SubExpP { p: 0.5 }, 1, 1.0).unwrap();
        assert_relative_eq!(s.eval(0.1), 0.1 / 10f64.ln(), epsilon = 1e-15);
        assert_relative_eq!(s.eval(0.1), 0.043429, epsilon = 1e-6);
        let n = make_estimator(EstimatorFamily::NegDimN { n: -2.0 }, 1, 1.0).unwrap();
        assert_relative_eq!(n.eval(0.25), 0.5, epsilon = 1e-16);
        assert!(make_estimator(EstimatorFamily::NegDimN { n: 1.0 }, 1, 1.0).is_err());
        assert!(make_estimator(EstimatorFamily::SubExpP { p: 1.5 }, 1, 1.0).is_err());
        assert!(make_estimator(EstimatorFamily::CauchyAlpha { alpha: 1.0 }, 1, 0.0).is_err());
    }

    #[test]
    fn estimator_invariants() {
        let grid = Grid::graded(1024);
        let families = [
            EstimatorFamily::CauchyAlpha { alpha: 0.5 },
            EstimatorFamily::CauchyAlpha { alpha: 3.0 },
            EstimatorFamily::SubExpP { p: 0.3 },
            EstimatorFamily::SubExpP { p: 0.8 },
            EstimatorFamily::NegDimN { n: -0.5 },
            EstimatorFamily::NegDimN { n: -1.0 },
            EstimatorFamily::GaussianConcave,
        ];
        for fam in families {
            for dim in [1, 3] {
                let est = make_estimator(fam, dim, 1.0).unwrap();
                assert_eq!(est.eval(0.0), 0.0);
                let left = grid.left_half();
                for w in left.windows(2) {
                    assert!(est.eval(w[0]) > 0.0);
                    assert!(est.eval(w[1]) - est.eval(w[0]) >= -1e-12, "{fam:?} not increasing");
                }
                for &t in grid.nodes() {
                    assert!((est.eval(t) - est.eval(1.0 - t)).abs() <= 1e-12);
                }
                let shape = est.shape().unwrap();
                assert!(est.shape_defect(&grid, shape) <= 1e-9, "{fam:?} dim={dim} {shape:?}");
            }
        }
        // N < -1 gives a concave power, which the family reports
        let n2 = make_estimator(EstimatorFamily::NegDimN { n: -2.0 }, 1, 1.0).unwrap();
        assert_eq!(n2.shape(), Some(Shape::Concave));
        assert!(n2.shape_defect(&grid, Shape::Convex) > 0.0);
    }

    #[test]
    fn exact_profile_dominates_estimators_with_reported_constant() {
        let grid = Grid::graded(1024);
        for alpha in [0.25, 0.5, 1.0, 2.0] {
            let m = make_cauchy(alpha).unwrap();
            let est = make_estimator(EstimatorFamily::CauchyAlpha { alpha }, 1, 1.0).unwrap();
            let k = alpha * 2f64.powf(1.0 / alpha);
            for &t in grid.nodes() {
                let ratio = exact_profile(&m, t).unwrap() / est.eval(t);
                assert!((ratio - k).abs() <= 1e-9 * k, "alpha={alpha} t={t}");
            }
        }
        for p in [0.3, 0.5, 0.8] {
            let m = make_subexp(p).unwrap();
            let est = make_estimator(EstimatorFamily::SubExpP { p }, 1, 1.0).unwrap();
            let lower = grid
                .nodes()
                .iter()
                .map(|&t| exact_profile(&m, t).unwrap() / est.eval(t))
                .fold(f64::INFINITY, f64::min);
            assert!(lower > 0.0 && lower.is_finite(), "p={p} lower={lower}");
        }
    }

    #[test]
    fn halfspace_examples() {
        let m = ProductMeasure::new(make_cauchy(1.0).unwrap(), 3).unwrap();
        let (mass, per) = halfspace(&m, -1.0);
        assert_relative_eq!(mass, 0.25, epsilon = 1e-16);
        assert_relative_eq!(per, 0.125, epsilon = 1e-16);
        let (mass, per) = halfspace(&m, -1e12);
        assert!(mass < 1e-11 && per < 1e-23);
        let g = ProductMeasure::from(make_gaussian());
        let (mass, per) = halfspace(&g, 0.0);
        assert_eq!(mass, 0.5);
        assert_relative_eq!(per, 0.398_942_280_401_432_7, epsilon = 1e-15);
        assert!(ProductMeasure::new(make_gaussian(), 0).is_err());
    }

    #[test]
    fn halfspace_perimeter_is_profile_of_mass() {
        for base in [make_cauchy(0.5).unwrap(), make_subexp(0.5).unwrap(), make_gaussian()] {
            for dim in [1, 4] {
                let m = ProductMeasure::new(base, dim).unwrap();
                for k in 0..64 {
                    let r = -8.0 + 16.0 * k as f64 / 63.0;
                    let (mass, per) = halfspace(&m, r);
                    let prof = exact_profile(&base, mass).unwrap();
                    assert!((per - prof).abs() <= 1e-10, "{base:?} r={r}");
                }
            }
        }
    }

    #[test]
    fn sampling_is_deterministic_and_rejects_empty() {
        let m = ProductMeasure::new(make_subexp(0.5).unwrap(), 2).unwrap();
        assert_eq!(sample(&m, 1, 9).unwrap(), sample(&m, 1, 9).unwrap());
        assert_ne!(sample(&m, 1, 9).unwrap(), sample(&m, 1, 10).unwrap());
        assert!(sample(&m, 0, 9).is_err());
    }

    #[test]
    fn cauchy_samples_within_dkw_band() {
        let base = make_cauchy(1.0).unwrap();
        let n = 100_000;
        let mut xs: Vec<f64> = sample(&base.into(), n, 7)
            .unwrap()
            .into_iter()
            .map(|p| p[0])
            .collect();
        xs.sort_by(f64::total_cmp);
        let band = ((2.0f64 / 0.01).ln() / (2.0 * n as f64)).sqrt();
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let h = base.cdf(x);
                ((i + 1) as f64 / n as f64 - h).max(h - i as f64 / n as f64)
            })
            .fold(0.0, f64::max);
        assert!(d <= band, "KS distance {d} exceeds DKW band {band}");
    }

    #[test]
    fn gaussian_sample_mean_is_centered() {
        let n = 100_000;
        let mean: f64 = sample(&make_gaussian().into(), n, 3)
            .unwrap()
            .iter()
            .map(|p| p[0])
            .sum::<f64>()
            / n as f64;
        assert!(mean.abs() <= 4.0 / (n as f64).sqrt());
    }
}
