//! Test functions on `(ℝⁿ, μⁿ)`: transfer functions `u = F(H(x₁))`, the
//! extremal family `F(t) = ∫_t^1 f/I_μ`, and seeded families of smooth bumps
//! sampled at random points.

use std::sync::Arc;

use rand::Rng;

use crate::curve::{Curve, RealFn};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::measures::{exact_profile, point_rng, sample, ConvexEstimator, Family, ModelMeasure1D, ProductMeasure};
use crate::operators::q_bar;
use crate::rispace::{norm_of_curve, quasinorm, RISpace};
use crate::rearrange::{
    decreasing_rearrangement, rearrange_curve, signed_rearrangement, truncate, Input, QuantileProfile, Transfer,
};

/// Default number of sample points of a bump family.
pub const BUMP_SAMPLES: usize = 20_000;

/// `a exp(-|x - c|² / (2w²))`.
#[derive(Debug, Clone, PartialEq)]
pub struct Bump {
    pub center: Vec<f64>,
    pub width: f64,
    pub amplitude: f64,
}

impl Bump {
    pub fn eval(&self, x: &[f64]) -> f64 {
        let r2: f64 = x.iter().zip(&self.center).map(|(a, c)| (a - c).powi(2)).sum();
        self.amplitude * (-r2 / (2.0 * self.width * self.width)).exp()
    }

    /// Gradient, accumulated into `out`.
    pub fn add_gradient(&self, x: &[f64], out: &mut [f64]) {
        let v = self.eval(x);
        let w2 = self.width * self.width;
        for ((o, a), c) in out.iter_mut().zip(x).zip(&self.center) {
            *o -= v * (a - c) / w2;
        }
    }
}

/// `offset + Σ bumps`.
#[derive(Debug, Clone, PartialEq)]
pub struct BumpSum {
    pub bumps: Vec<Bump>,
    pub offset: f64,
}

impl BumpSum {
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.offset + self.bumps.iter().map(|b| b.eval(x)).sum::<f64>()
    }

    pub fn gradient_modulus(&self, x: &[f64]) -> f64 {
        let mut g = vec![0.0; x.len()];
        for b in &self.bumps {
            b.add_gradient(x, &mut g);
        }
        g.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

#[derive(Debug, Clone)]
pub enum Representation {
    /// `u(x) = F(H(x₁))`; `gradient` is `|F′| I_μ` on (0,1), which is
    /// equimeasurable with `|∇u|`.
    Transfer { profile: Transfer, gradient: Curve },
    /// Values and gradient moduli at i.i.d. points of the measure, with the
    /// closed form they came from when it is still a bump sum.
    Sampled {
        points: Vec<Vec<f64>>,
        values: Vec<f64>,
        gradient: Vec<f64>,
        source: Option<BumpSum>,
    },
}

#[derive(Debug, Clone)]
pub struct TestFunction {
    repr: Representation,
    measure: ProductMeasure,
    label: String,
}

/// Relative growth over one octave beyond which an endpoint limit is taken
/// to be infinite.
const UNBOUNDED_RATIO: f64 = 0.98;

/// Limit of `g(ε/2^k)` as `k -> ∞`, extrapolated from three octaves.
fn endpoint_limit(g: impl Fn(f64) -> f64, eps: f64) -> f64 {
    let v = [g(eps), g(eps / 2.0), g(eps / 4.0)];
    if v.iter().any(|x| !x.is_finite()) {
        return if v[2].is_nan() { f64::NAN } else { v[2] };
    }
    let (d1, d2) = (v[1] - v[0], v[2] - v[1]);
    let scale = v[2].abs().max(1e-300);
    if d2.abs() <= 1e-12 * scale {
        return v[2];
    }
    let r = d2 / d1;
    if r >= UNBOUNDED_RATIO {
        return f64::INFINITY * d2.signum();
    }
    if r > 0.0 {
        v[2] + d2 * r / (1.0 - r)
    } else {
        v[2]
    }
}

fn profile_1d(m: &ProductMeasure) -> impl Fn(f64) -> f64 + Send + Sync + 'static {
    let base: ModelMeasure1D = *m.base();
    move |t: f64| exact_profile(&base, t).unwrap_or(0.0)
}

impl TestFunction {
    pub fn representation(&self) -> &Representation {
        &self.repr
    }

    pub fn measure(&self) -> &ProductMeasure {
        &self.measure
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn is_transfer(&self) -> bool {
        matches!(self.repr, Representation::Transfer { .. })
    }

    /// `u★`.
    pub fn signed(&self) -> Result<QuantileProfile> {
        match &self.repr {
            Representation::Transfer { profile, .. } => signed_rearrangement(Input::Transfer(profile)),
            Representation::Sampled { values, .. } => signed_rearrangement(Input::Samples { values, weights: None }),
        }
    }

    /// `u*`.
    pub fn decreasing(&self) -> Result<QuantileProfile> {
        match &self.repr {
            Representation::Transfer { profile, .. } => decreasing_rearrangement(Input::Transfer(profile)),
            Representation::Sampled { values, .. } => {
                decreasing_rearrangement(Input::Samples { values, weights: None })
            }
        }
    }

    /// `|∇u|*`.
    pub fn gradient(&self) -> Result<QuantileProfile> {
        match &self.repr {
            Representation::Transfer { gradient, .. } => rearrange_curve(gradient, true),
            Representation::Sampled { gradient, .. } => decreasing_rearrangement(Input::Samples {
                values: gradient,
                weights: None,
            }),
        }
    }

    /// `‖|∇u|‖_X`; transfer functions with a Lebesgue-type `X` integrate
    /// the closed form directly instead of rearranging it first.
    pub fn gradient_norm(&self, x: &RISpace, grid: &Grid) -> Result<f64> {
        match &self.repr {
            Representation::Transfer { gradient, .. } => norm_of_curve(x, gradient, grid),
            Representation::Sampled { .. } => quasinorm(x, &self.gradient()?, grid),
        }
    }

    /// `m(u) = u★(1/2)`.
    pub fn median(&self) -> Result<f64> {
        Ok(self.signed()?.eval(0.5))
    }

    /// `(ess sup u, ess inf u)`; infinite when `u` is unbounded.
    pub fn range(&self) -> (f64, f64) {
        match &self.repr {
            Representation::Transfer { profile, .. } => {
                let f = &profile.value;
                let (lo_node, hi_node) = f.node_range();
                if !f.has_exact() {
                    return (hi_node, lo_node);
                }
                let first = f.nodes()[0];
                let last = 1.0 - *f.nodes().last().unwrap();
                let at0 = endpoint_limit(|t| f.eval(t), first.max(f64::MIN_POSITIVE));
                let at1 = endpoint_limit(|t| f.eval(1.0 - t), last.max(f64::EPSILON));
                let hi = hi_node.max(at0).max(at1);
                let lo = lo_node.min(at0).min(at1);
                (hi, lo)
            }
            Representation::Sampled { values, .. } => values
                .iter()
                .fold((f64::NEG_INFINITY, f64::INFINITY), |(h, l), &v| (h.max(v), l.min(v))),
        }
    }

    /// `Osc_μ(u) = ess sup u - ess inf u`.
    pub fn oscillation(&self) -> Result<f64> {
        let (hi, lo) = self.range();
        let osc = hi - lo;
        if !osc.is_finite() {
            return Err(Error::Oscillation(format!("{} is unbounded", self.label)));
        }
        Ok(osc)
    }

    /// `∫|u - c| dμ`.
    pub fn integral_abs_centered(&self, c: f64, grid: &Grid) -> f64 {
        match &self.repr {
            Representation::Transfer { profile, .. } => profile.value.integrate(grid, |_, v| (v - c).abs()),
            Representation::Sampled { values, .. } => {
                values.iter().map(|v| (v - c).abs()).sum::<f64>() / values.len() as f64
            }
        }
    }

    /// `∫|u| dμ`.
    pub fn integral_abs(&self, grid: &Grid) -> f64 {
        self.integral_abs_centered(0.0, grid)
    }

    /// `∫|∇u| dμ`.
    pub fn integral_gradient(&self, grid: &Grid) -> f64 {
        match &self.repr {
            Representation::Transfer { gradient, .. } => gradient.integrate(grid, |_, v| v.abs()),
            Representation::Sampled { gradient, .. } => gradient.iter().sum::<f64>() / gradient.len() as f64,
        }
    }

    /// `λ u + c`.
    pub fn affine(&self, lambda: f64, c: f64) -> Self {
        let repr = match &self.repr {
            Representation::Transfer { profile, gradient } => Representation::Transfer {
                profile: Transfer {
                    value: profile.value.map(move |_, v| lambda * v + c),
                    slope: profile.slope.as_ref().map(|s| s.map(move |_, v| lambda * v)),
                },
                gradient: gradient.map(move |_, v| lambda.abs() * v),
            },
            Representation::Sampled {
                points,
                values,
                gradient,
                source,
            } => Representation::Sampled {
                points: points.clone(),
                values: values.iter().map(|v| lambda * v + c).collect(),
                gradient: gradient.iter().map(|g| lambda.abs() * g).collect(),
                source: source.as_ref().map(|src| BumpSum {
                    bumps: src
                        .bumps
                        .iter()
                        .map(|b| Bump {
                            amplitude: lambda * b.amplitude,
                            ..b.clone()
                        })
                        .collect(),
                    offset: lambda * src.offset + c,
                }),
            },
        };
        Self {
            repr,
            measure: self.measure,
            label: self.label.clone(),
        }
    }

    /// `u - m(u)`.
    pub fn recentred(&self) -> Result<Self> {
        let m = self.median()?;
        Ok(self.affine(1.0, -m))
    }

    /// `(u(x), |∇u(x)|)` at a point of `ℝⁿ`; `None` for sampled functions
    /// whose closed form was lost (after [`TestFunction::positive_part`]).
    pub fn eval_point(&self, x: &[f64]) -> Option<(f64, f64)> {
        match &self.repr {
            Representation::Transfer { profile, .. } => {
                let base = self.measure.base();
                let t = base.cdf(x[0]);
                let v = profile.value.eval(t);
                let d = match &profile.slope {
                    Some(s) => s.eval(t),
                    None => profile.value.difference_slopes().eval(t),
                };
                Some((v, d.abs() * base.density(x[0])))
            }
            Representation::Sampled { source, .. } => {
                source.as_ref().map(|s| (s.eval(x), s.gradient_modulus(x)))
            }
        }
    }

    /// `(u - c)₊`.
    pub fn positive_part(&self, c: f64) -> Result<Self> {
        let repr = match &self.repr {
            Representation::Transfer { profile, .. } => {
                let cut = truncate(profile, c, f64::INFINITY)?;
                let slope = cut.slope.clone().unwrap_or_else(|| cut.value.difference_slopes());
                let gradient = gradient_curve(&slope, cut.value.nodes(), &self.measure)?;
                Representation::Transfer { profile: cut, gradient }
            }
            Representation::Sampled {
                points,
                values,
                gradient,
                ..
            } => Representation::Sampled {
                points: points.clone(),
                values: values.iter().map(|&v| (v - c).max(0.0)).collect(),
                gradient: values
                    .iter()
                    .zip(gradient)
                    .map(|(&v, &g)| if v > c { g } else { 0.0 })
                    .collect(),
                source: None,
            },
        };
        Ok(Self {
            repr,
            measure: self.measure,
            label: self.label.clone(),
        })
    }
}

/// `|F′| I_μ` on the nodes of `F′` and `F`.
fn gradient_curve(slope: &Curve, value_nodes: &[f64], m: &ProductMeasure) -> Result<Curve> {
    let prof: RealFn = Arc::new(profile_1d(m));
    slope.map(|_, v| v.abs()).times(prof, value_nodes)
}

/// `u(x) = F(H(x₁))`.
pub fn transfer(f: Transfer, m: &ProductMeasure) -> Result<TestFunction> {
    let value = &f.value;
    if value
        .left_values()
        .iter()
        .chain(value.right_values())
        .any(|v| !v.is_finite())
    {
        return Err(Error::Domain("transfer profile is undefined at a node".into()));
    }
    let slope = f.slope.clone().unwrap_or_else(|| value.difference_slopes());
    let gradient = gradient_curve(&slope, value.nodes(), m)?;
    Ok(TestFunction {
        repr: Representation::Transfer { profile: f, gradient },
        measure: *m,
        label: "transfer".into(),
    })
}

/// The extremal function `F(t) = ∫_t^1 f(s) ds/I_μ(s)` for `f ≥ 0` supported
/// in `(0,1/2)`; `|∇u|* = f*` and `u* = Q̄_{I_μ} f`.
pub fn extremal(f: &Curve, m: &ProductMeasure, grid: &Grid) -> Result<TestFunction> {
    let nodes = f.nodes();
    let (l, r) = (f.left_values(), f.right_values());
    for i in 0..nodes.len() {
        if l[i] < 0.0 || r[i] < 0.0 || !l[i].is_finite() || !r[i].is_finite() {
            return Err(Error::Domain("extremal density must be finite and nonnegative".into()));
        }
        if nodes[i] > 0.5 && l[i] != 0.0 || nodes[i] >= 0.5 && r[i] != 0.0 {
            return Err(Error::Domain("extremal density must vanish on [1/2,1)".into()));
        }
    }
    let est = ConvexEstimator::exact(*m.base());
    let value = q_bar(&est, f, grid)?.curve;
    if value.right_values().iter().any(|v| !v.is_finite()) {
        return Err(Error::Integrability("f/I_μ is not integrable at the grid floor".into()));
    }
    let e = est;
    let slope = f.times(Arc::new(move |t: f64| -1.0 / e.eval(t)), value.nodes())?;
    Ok(TestFunction {
        repr: Representation::Transfer {
            profile: Transfer::with_slope(value, slope),
            gradient: f.clone(),
        },
        measure: *m,
        label: "extremal".into(),
    })
}

/// Evaluates a bump sum at given points.
pub fn sampled_bumps(m: &ProductMeasure, source: BumpSum, points: Vec<Vec<f64>>) -> Result<TestFunction> {
    if points.is_empty() {
        return Err(Error::EmptyInput("no sample points".into()));
    }
    if points.iter().any(|p| p.len() != m.dim()) {
        return Err(Error::Domain("sample point dimension differs from the measure".into()));
    }
    let values = points.iter().map(|x| source.eval(x)).collect();
    let gradient = points.iter().map(|x| source.gradient_modulus(x)).collect();
    Ok(TestFunction {
        repr: Representation::Sampled {
            points,
            values,
            gradient,
            source: Some(source),
        },
        measure: *m,
        label: "bump".into(),
    })
}

/// [`bump_family_sized`] with [`BUMP_SAMPLES`] points.
pub fn bump_family(m: &ProductMeasure, count: usize, seed: u64) -> Result<Vec<TestFunction>> {
    bump_family_sized(m, count, seed, BUMP_SAMPLES)
}

/// `count` bump sums (function `i` has `1 + i mod 3` bumps) evaluated on
/// `samples` seeded points shared by the family.
pub fn bump_family_sized(m: &ProductMeasure, count: usize, seed: u64, samples: usize) -> Result<Vec<TestFunction>> {
    if count == 0 {
        return Err(Error::EmptyInput("bump family needs count >= 1".into()));
    }
    let points = sample(m, samples, seed)?;
    let base = m.base();
    let q = |u: f64| base.quantile(u);
    let spread = q(0.75)? - q(0.25)?;
    (0..count)
        .map(|i| {
            // parameters come from a stream disjoint from the sample points
            let mut rng = point_rng(seed ^ 0x5eed_b0b5_u64, i as u64);
            let bumps = (0..1 + i % 3)
                .map(|_| {
                    let center = (0..m.dim())
                        .map(|_| q(rng.random_range(0.2..0.8)))
                        .collect::<Result<Vec<f64>>>()?;
                    let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                    Ok(Bump {
                        center,
                        width: spread * rng.random_range(0.3..1.5),
                        amplitude: sign * rng.random_range(0.5..2.0),
                    })
                })
                .collect::<Result<Vec<Bump>>>()?;
            let f = sampled_bumps(m, BumpSum { bumps, offset: 0.0 }, points.clone())?;
            Ok(f.with_label(format!("bump{i}")))
        })
        .collect()
}

/// `F(t) = (b - t)₊` with its slope, a bounded monotone transfer profile.
pub fn ramp(b: f64, grid: &Grid) -> Result<Transfer> {
    if !(b > 0.0 && b <= 1.0) {
        return Err(Error::Domain(format!("ramp end must lie in (0,1], got {b}")));
    }
    let mut nodes = grid.nodes().to_vec();
    if b < 1.0 {
        nodes = crate::grid::merge_nodes(&nodes, &[b]);
    }
    let value = Curve::piecewise_linear(nodes.clone(), nodes.iter().map(|&t| (b - t).max(0.0)).collect())?
        .with_exact(Some(Arc::new(move |t: f64| (b - t).max(0.0))));
    let slope = if b < 1.0 {
        Curve::steps(&[0.0, b, 1.0], &[-1.0, 0.0])?
    } else {
        Curve::constant(-1.0)
    };
    Ok(Transfer::with_slope(value, slope))
}

/// Transfer ramps `(k/count - t)₊`, `k = 1..count`.
pub fn ramp_family(m: &ProductMeasure, grid: &Grid, count: usize) -> Result<Vec<TestFunction>> {
    (1..=count)
        .map(|k| {
            let b = k as f64 / count as f64;
            Ok(transfer(ramp(b, grid)?, m)?.with_label(format!("ramp{k}")))
        })
        .collect()
}

/// Extremal functions of `f = t^a χ_{(0,1/2)}` for `count` exponents `a`
/// spaced by 1/4 above the threshold that keeps `u` bounded.
pub fn extremal_power_family(m: &ProductMeasure, grid: &Grid, count: usize) -> Result<Vec<TestFunction>> {
    let base = m.base();
    let a0 = match (base.family(), base.parameter()) {
        (Family::CauchyAlpha, Some(alpha)) => 1.0 / alpha,
        _ => 0.0,
    };
    (1..=count)
        .map(|k| {
            let a = a0 + 0.25 * k as f64;
            let f = Curve::from_fn(grid.nodes(), move |t| if t < 0.5 { t.powf(a) } else { 0.0 })?;
            Ok(extremal(&f, m, grid)?.with_label(format!("extremal{k}")))
        })
        .collect()
}

/// Transfer powers `(1 - t)^k`, `k = 1..count`.
pub fn power_family(m: &ProductMeasure, grid: &Grid, count: usize) -> Result<Vec<TestFunction>> {
    (1..=count)
        .map(|k| {
            let e = k as i32;
            let f = Transfer::from_fns(grid.nodes(), move |t| (1.0 - t).powi(e), move |t| {
                -(e as f64) * (1.0 - t).powi(e - 1)
            })?;
            Ok(transfer(f, m)?.with_label(format!("power{k}")))
        })
        .collect()
}

/// `u(x) = x₁`, the transfer of `F = H⁻¹`.
pub fn coordinate(m: &ProductMeasure, grid: &Grid) -> Result<TestFunction> {
    let base = *m.base();
    let f = Transfer::from_fns(
        grid.nodes(),
        move |t| base.quantile(t).unwrap_or(f64::NAN),
        move |t| 1.0 / exact_profile(&base, t).unwrap_or(f64::NAN),
    )?;
    Ok(transfer(f, m)?.with_label("coordinate"))
}
