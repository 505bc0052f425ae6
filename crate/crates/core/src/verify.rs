//! Inequality harness: both sides of each inequality on function families,
//! reduced to ratio certificates.

use std::collections::BTreeMap;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::curve::{Curve, RealFn};
use crate::error::{Error, Result};
use crate::functions::TestFunction;
use crate::grid::{self, Grid};
use crate::measures::{exact_profile, halfspace, make_estimator, ConvexEstimator, EstimatorFamily, Family, ProductMeasure};
use crate::operators::{beta1, peso_constant};
use crate::rearrange::{maximal, rearrange_curve, ProfileKind, QuantileProfile};
use crate::rispace::{boyd, fundamental, norm_of_curve, quasinorm, BoydMode, RISpace, Weight};

/// Ordered by severity; the worst status of a run decides its exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    Holds,
    HoldsWithConstant,
    /// The ratio is unbounded along the family.
    Diverges,
    /// Some instance has `∞/∞`.
    Indeterminate,
    /// A hypothesis of the inequality fails for the instance.
    Flagged,
    Error,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Holds => "holds",
            Status::HoldsWithConstant => "holds-with-constant",
            Status::Diverges => "diverges",
            Status::Indeterminate => "indeterminate",
            Status::Flagged => "flagged",
            Status::Error => "error",
        }
    }
}

/// JSON has no non-finite numbers; they travel as `"inf"`, `"-inf"`, `"nan"`.
mod float_repr {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Str(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => match s.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("not a number: {other}"))),
            },
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Target accuracy of quadratures, recorded for provenance.
    pub quad: f64,
    /// Slack above 1 still reported as "holds".
    pub assert: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            quad: 1e-10,
            assert: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub label: String,
    #[serde(with = "float_repr")]
    pub lhs: f64,
    #[serde(with = "float_repr")]
    pub rhs: f64,
    #[serde(with = "float_repr")]
    pub ratio: f64,
}

impl Instance {
    pub fn new(label: impl Into<String>, lhs: f64, rhs: f64) -> Self {
        Self {
            label: label.into(),
            lhs,
            rhs,
            ratio: ratio(lhs, rhs),
        }
    }
}

/// `lhs/rhs` with `0/0 = 0` and `x/0 = ∞`.
pub fn ratio(lhs: f64, rhs: f64) -> f64 {
    if lhs == 0.0 {
        0.0
    } else if rhs == 0.0 {
        f64::INFINITY
    } else {
        lhs / rhs
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RatioCertificate {
    pub inequality_id: String,
    pub params: BTreeMap<String, String>,
    pub family: String,
    pub n_grid: usize,
    pub tol: Tolerances,
    pub instances: Vec<Instance>,
    #[serde(with = "float_repr")]
    pub sup_ratio: f64,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl RatioCertificate {
    pub fn new(
        inequality_id: &str,
        params: BTreeMap<String, String>,
        family: &str,
        settings: &Settings,
        instances: Vec<Instance>,
    ) -> Self {
        let sup_ratio = instances
            .iter()
            .map(|i| i.ratio)
            .fold(0.0, |a: f64, r| if r.is_nan() || a.is_nan() { f64::NAN } else { a.max(r) });
        let status = if instances.iter().any(|i| i.ratio.is_nan()) {
            Status::Indeterminate
        } else if sup_ratio <= 1.0 + settings.tol.assert {
            Status::Holds
        } else if sup_ratio.is_finite() {
            Status::HoldsWithConstant
        } else {
            Status::Diverges
        };
        Self {
            inequality_id: inequality_id.to_string(),
            params,
            family: family.to_string(),
            n_grid: settings.grid.len(),
            tol: settings.tol,
            instances,
            sup_ratio,
            status,
            note: None,
        }
    }

    /// Marks a hypothesis violation; the ratios stay as computed.
    pub fn flagged(mut self, note: impl Into<String>) -> Self {
        self.status = self.status.max(Status::Flagged);
        self.note = Some(note.into());
        self
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }
}

/// Numerical settings shared by every check.
#[derive(Debug, Clone)]
pub struct Settings {
    pub grid: Grid,
    pub tol: Tolerances,
    /// Points per octave of the Nash `r`-grid on `[1, 2^20]`.
    pub nash_r_per_octave: usize,
}

impl Settings {
    pub fn new(n_grid: usize) -> Self {
        Self {
            grid: Grid::graded(n_grid),
            tol: Tolerances::default(),
            nash_r_per_octave: 4,
        }
    }

    pub fn with_tol(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }
}

const NASH_R_OCTAVES: usize = 20;

fn est_fn(est: &ConvexEstimator) -> RealFn {
    let e = *est;
    Arc::new(move |t: f64| e.eval(t))
}

/// `I(t)/t`, read at the smallest positive double for `t = 0`.
fn over_t(est: &ConvexEstimator) -> RealFn {
    let e = *est;
    Arc::new(move |t: f64| {
        let t = t.max(f64::MIN_POSITIVE);
        e.eval(t) / t
    })
}

fn params_of(est: &ConvexEstimator, m: Option<&ProductMeasure>) -> BTreeMap<String, String> {
    let mut p = est.params();
    if let Some(m) = m {
        p.extend(m.params());
    }
    p
}

fn fmt_num(v: f64) -> String {
    format!("{v:.17e}")
}

/// `∫ g d(-p)`, the level integral `∫ g(|{f > s}|) ds` after substituting
/// `s = f★(t)`. Uses the exact slope when present, otherwise the cells and
/// jumps of the node interpolant.
fn level_integral(p: &QuantileProfile, g: &RealFn, grid: &Grid) -> f64 {
    if p.has_exact_slope() {
        let g = g.clone();
        return p.slope().integrate(grid, move |t, v| if v == 0.0 { 0.0 } else { -v * g(t) });
    }
    let c = p.curve().refined(grid.nodes());
    let (nodes, l, r) = (c.nodes(), c.left_values(), c.right_values());
    let mut total = 0.0;
    for i in 0..nodes.len() {
        let jump = l[i] - r[i];
        if i > 0 && jump != 0.0 {
            total += g(nodes[i]) * jump;
        }
        if i + 1 < nodes.len() {
            let drop = r[i] - l[i + 1];
            if drop != 0.0 {
                let w = grid::gauss_cell(nodes[i], nodes[i + 1], &|t| g(t));
                total += w * drop / (nodes[i + 1] - nodes[i]);
            }
        }
    }
    total
}

/// Ledoux: `∫ I(μ{f > s}) ds ≤ ∫|∇f| dμ`.
pub fn check_ledoux(fs: &[TestFunction], est: &ConvexEstimator, settings: &Settings) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let g = est_fn(est);
    let mut instances = Vec::with_capacity(fs.len());
    for f in fs {
        let lhs = level_integral(&f.signed()?, &g, grid);
        let rhs = f.integral_gradient(grid);
        if !rhs.is_finite() {
            return Err(Error::Integrability(format!("∫|∇f| diverges for {}", f.label())));
        }
        instances.push(Instance::new(f.label(), lhs, rhs));
    }
    Ok(RatioCertificate::new(
        "ledoux",
        params_of(est, fs.first().map(|f| f.measure())),
        &family_label(fs),
        settings,
        instances,
    ))
}

fn family_label(fs: &[TestFunction]) -> String {
    match fs.first() {
        None => "empty".into(),
        Some(f) => format!("{}x{}", f.label().trim_end_matches(char::is_numeric), fs.len()),
    }
}

/// Averages of a step profile over windows of width `1/n` (clipped to
/// `[0,1]`) at `k/n`; nonincreasing because window averages of a
/// nonincreasing function are.
pub fn smooth_profile(p: &QuantileProfile, n: usize) -> Result<QuantileProfile> {
    let c = p.curve();
    let (nodes, r) = (c.nodes(), c.right_values());
    let prefix: Vec<f64> = {
        let mut acc = vec![0.0; nodes.len()];
        for i in 1..nodes.len() {
            acc[i] = acc[i - 1] + r[i - 1] * (nodes[i] - nodes[i - 1]);
        }
        acc
    };
    let cum = |x: f64| {
        let i = nodes.partition_point(|&t| t <= x).max(1) - 1;
        prefix[i] + r[i] * (x - nodes[i])
    };
    let h = 1.0 / n as f64;
    let ts: Vec<f64> = (0..=n).map(|k| k as f64 * h).collect();
    let vals: Vec<f64> = ts
        .iter()
        .map(|&t| {
            let (a, b) = ((t - 0.5 * h).max(0.0), (t + 0.5 * h).min(1.0));
            (cum(b) - cum(a)) / (b - a)
        })
        .collect();
    QuantileProfile::new(Curve::piecewise_linear(ts, vals)?, p.kind())
}

/// `(-f★)′ I` as a curve, from the exact slope of `f★` or (for sampled
/// profiles) from the smoothed profile.
fn level_density(p: &QuantileProfile, est: &ConvexEstimator, grid: &Grid, sampled: bool) -> Result<Curve> {
    let slope = if sampled {
        smooth_profile(p, grid.len())?.slope()
    } else {
        p.slope()
    };
    slope.map(|_, v| -v).times(est_fn(est), grid.nodes())
}

/// Sup over the grid of `∫_0^t a / ∫_0^t b` for two decreasing
/// rearrangements, as `(t, lhs, rhs)` at the maximizing node.
fn sup_cumulative_ratio(a: &QuantileProfile, b: &QuantileProfile, grid: &Grid) -> Result<(f64, f64, f64)> {
    let (ma, mb) = (maximal(a, grid)?, maximal(b, grid)?);
    let mut best = (0.0, 0.0, 0.0);
    let mut best_ratio = f64::NEG_INFINITY;
    for &t in grid.nodes() {
        let (x, y) = (t * ma.eval(t), t * mb.eval(t));
        let r = ratio(x, y);
        if r > best_ratio || r.is_nan() {
            best_ratio = r;
            best = (t, x, y);
            if r.is_nan() {
                break;
            }
        }
    }
    Ok(best)
}

/// `∫_0^t ((-f★)′ I)* ≤ ∫_0^t |∇f|*`, sup over `t`.
pub fn check_reafun(fs: &[TestFunction], est: &ConvexEstimator, settings: &Settings) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let mut instances = Vec::with_capacity(fs.len());
    for f in fs {
        let dens = level_density(&f.signed()?, est, grid, !f.is_transfer())?;
        let lhs = rearrange_curve(&dens, true)?;
        let rhs = f.gradient()?;
        let (t, x, y) = sup_cumulative_ratio(&lhs, &rhs, grid)?;
        instances.push(Instance::new(format!("{}@t={}", f.label(), fmt_num(t)), x, y));
    }
    Ok(RatioCertificate::new(
        "reafun",
        params_of(est, fs.first().map(|f| f.measure())),
        &family_label(fs),
        settings,
        instances,
    ))
}

/// `s`-grid of `count` equispaced points inside `(0,1/2)`.
pub fn bobkov_s_grid(count: usize) -> Vec<f64> {
    (1..=count).map(|k| 0.5 * k as f64 / (count + 1) as f64).collect()
}

/// Bobkov: `∫|f - m(f)| dμ ≤ β₁(s) ∫|∇f| dμ + s Osc_μ(f)` for each `s`.
pub fn check_bobkov(
    fs: &[TestFunction],
    est: &ConvexEstimator,
    s_grid: &[f64],
    settings: &Settings,
) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let betas = s_grid
        .iter()
        .map(|&s| beta1(est, s, grid))
        .collect::<Result<Vec<f64>>>()?;
    let mut instances = Vec::with_capacity(fs.len() * s_grid.len());
    for f in fs {
        let u = f.recentred()?;
        let osc = u.oscillation()?;
        let lhs = u.integral_abs(grid);
        let grad = u.integral_gradient(grid);
        for (&s, &b) in s_grid.iter().zip(&betas) {
            instances.push(Instance::new(format!("{}@s={}", f.label(), fmt_num(s)), lhs, b * grad + s * osc));
        }
    }
    Ok(RatioCertificate::new(
        "bobkov",
        params_of(est, fs.first().map(|f| f.measure())),
        &family_label(fs),
        settings,
        instances,
    ))
}

/// Isoperimetry on half-spaces `{x₁ < r}`: `I(μ(A)) ≤ μ⁺(A)`.
pub fn check_halfspace(m: &ProductMeasure, est: &ConvexEstimator, r_grid: &[f64], settings: &Settings) -> RatioCertificate {
    let mut exact_sup: f64 = 0.0;
    let instances = r_grid
        .iter()
        .map(|&r| {
            let (mass, perimeter) = halfspace(m, r);
            if let Ok(i) = exact_profile(m.base(), mass) {
                exact_sup = exact_sup.max(ratio(i, perimeter));
            }
            Instance::new(format!("r={}", fmt_num(r)), est.eval(mass), perimeter)
        })
        .collect();
    let mut params = params_of(est, Some(m));
    params.insert("exact_sup_ratio".into(), fmt_num(exact_sup));
    RatioCertificate::new("halfspace", params, "halfspace", settings, instances)
}

/// Which hypothesis makes the Poincaré inequality available.
fn poincare_branch(x: &RISpace, est: &ConvexEstimator, grid: &Grid) -> Result<Option<String>> {
    let b = boyd(x, BoydMode::Analytic, grid)?;
    if b.lower > 0.0 {
        return Ok(Some(format!("boyd_lower={}", b.lower)));
    }
    let c = peso_constant(est, grid);
    if c.is_finite() {
        return Ok(Some(format!("peso={c}")));
    }
    Ok(None)
}

/// `‖(f - c)* I/t‖_X̄`.
pub fn poincare_lhs(f: &TestFunction, c: f64, x: &RISpace, est: &ConvexEstimator, grid: &Grid) -> Result<f64> {
    let star = f.affine(1.0, -c).decreasing()?;
    let w = over_t(est);
    norm_of_curve(x, &star.curve().times(w, grid.nodes())?, grid)
}

/// Centre minimizing [`poincare_lhs`] over `[ess inf, ess sup]` (golden
/// section); a diagnostic, the certificates centre at the median.
pub fn best_center(f: &TestFunction, x: &RISpace, est: &ConvexEstimator, grid: &Grid) -> Result<(f64, f64)> {
    let (hi, lo) = f.range();
    if !(hi.is_finite() && lo.is_finite()) {
        return Err(Error::Oscillation(format!("{} is unbounded", f.label())));
    }
    if hi == lo {
        return Ok((lo, 0.0));
    }
    let obj = |c: f64| -poincare_lhs(f, c, x, est, grid).unwrap_or(f64::INFINITY);
    let (c, v) = grid::golden_max(&obj, lo, hi, 1e-10);
    Ok((c, -v))
}

/// Poincaré: `‖(f - m(f))* I/t‖_X̄ ≼ ‖|∇f|‖_X`.
pub fn check_poincare(
    fs: &[TestFunction],
    x: &RISpace,
    est: &ConvexEstimator,
    settings: &Settings,
) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let branch = poincare_branch(x, est, grid)?;
    let mut instances = Vec::with_capacity(fs.len());
    for f in fs {
        let lhs = poincare_lhs(f, f.median()?, x, est, grid)?;
        let rhs = f.gradient_norm(x, grid)?;
        instances.push(Instance::new(f.label(), lhs, rhs));
    }
    let mut params = params_of(est, fs.first().map(|f| f.measure()));
    params.insert("space".into(), x.descriptor());
    params.insert("branch".into(), branch.clone().unwrap_or_else(|| "none".into()));
    let cert = RatioCertificate::new("poincare", params, &family_label(fs), settings, instances);
    Ok(match branch {
        Some(_) => cert,
        None => cert.flagged("neither a positive lower Boyd index nor a finite peso constant"),
    })
}

/// `‖f*‖_Y ≼ ‖f* I/t‖_X̄` on given decreasing rearrangements.
pub fn check_embedding(
    y: &RISpace,
    x: &RISpace,
    est: &ConvexEstimator,
    profiles: &[QuantileProfile],
    settings: &Settings,
) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let w = over_t(est);
    let mut instances = Vec::with_capacity(profiles.len());
    for (i, p) in profiles.iter().enumerate() {
        if p.kind() != ProfileKind::Nonincreasing {
            return Err(Error::Kind("embedding checks take decreasing rearrangements".into()));
        }
        let lhs = quasinorm(y, p, grid)?;
        let rhs = norm_of_curve(x, &p.curve().times(w.clone(), grid.nodes())?, grid)?;
        instances.push(Instance::new(format!("f{i}"), lhs, rhs));
    }
    let mut params = est.params();
    params.insert("target".into(), y.descriptor());
    params.insert("space".into(), x.descriptor());
    Ok(RatioCertificate::new("embedding", params, &format!("profiles x{}", profiles.len()), settings, instances))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum NashVariant {
    /// `r‖∇f‖_X + ‖f‖_{q,∞} φ_X(r^{-α}) r^{α/q}`, minimized over `r`.
    CauchyType { alpha: f64, q: f64 },
    /// `‖∇f‖_X^{β/(β+1)} ‖f‖_{X(ln(1/t)^{β(1/p-1)})}^{1/(β+1)}`.
    SubExpType { p: f64, beta: f64 },
}

/// Nash inequalities for `(f - m(f))₊`.
pub fn check_nash(fs: &[TestFunction], x: &RISpace, variant: NashVariant, settings: &Settings) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let mut params = BTreeMap::new();
    params.insert("space".into(), x.descriptor());
    if let Some(f) = fs.first() {
        params.extend(f.measure().params());
    }
    params.insert("r_per_octave".into(), settings.nash_r_per_octave.to_string());
    let mut flag = None;
    let rhs_fn: Box<dyn Fn(f64, &QuantileProfile) -> Result<f64>> = match variant {
        NashVariant::CauchyType { alpha, q } => {
            params.insert("variant".into(), "cauchy".into());
            params.insert("alpha".into(), alpha.to_string());
            params.insert("q".into(), q.to_string());
            let lower = boyd(x, BoydMode::Analytic, grid)?.lower;
            if !(1.0 / q < lower) {
                flag = Some(format!("1/q = {} is not below the lower Boyd index {lower}", 1.0 / q));
            }
            let k = settings.nash_r_per_octave.max(1);
            let rs: Vec<f64> = (0..=NASH_R_OCTAVES * k).map(|j| 2f64.powf(j as f64 / k as f64)).collect();
            let phis = rs
                .iter()
                .map(|&r| fundamental(x, r.powf(-alpha), grid))
                .collect::<Result<Vec<f64>>>()?;
            let weak = RISpace::lorentz(q, f64::INFINITY)?;
            let grid = grid.clone();
            Box::new(move |grad: f64, star: &QuantileProfile| {
                let wq = quasinorm(&weak, star, &grid)?;
                Ok(rs
                    .iter()
                    .zip(&phis)
                    .map(|(&r, &phi)| {
                        let tail = if wq == 0.0 { 0.0 } else { wq * phi * r.powf(alpha / q) };
                        r * grad + tail
                    })
                    .fold(f64::INFINITY, f64::min))
            })
        }
        NashVariant::SubExpType { p, beta } => {
            params.insert("variant".into(), "subexp".into());
            params.insert("p".into(), p.to_string());
            params.insert("beta".into(), beta.to_string());
            let wx = RISpace::weighted(x.clone(), Weight::log_power(beta * (1.0 / p - 1.0)));
            let grid = grid.clone();
            Box::new(move |grad: f64, star: &QuantileProfile| {
                let wn = quasinorm(&wx, star, &grid)?;
                Ok(grad.powf(beta / (beta + 1.0)) * wn.powf(1.0 / (beta + 1.0)))
            })
        }
    };
    let mut instances = Vec::with_capacity(fs.len());
    for f in fs {
        let u = f.positive_part(f.median()?)?;
        let star = u.decreasing()?;
        let lhs = quasinorm(x, &star, grid)?;
        let grad = u.gradient_norm(x, grid)?;
        let rhs = if lhs == 0.0 { 0.0 } else { rhs_fn(grad, &star)? };
        instances.push(Instance::new(f.label(), lhs, rhs));
    }
    let cert = RatioCertificate::new("nash", params, &family_label(fs), settings, instances);
    Ok(match flag {
        Some(n) => cert.flagged(n),
        None => cert,
    })
}

/// `(f** - f*) I/t ≤ |∇f|**` on Gaussian space with the exact profile, sup
/// over the grid.
pub fn check_concave_gaussian(fs: &[TestFunction], settings: &Settings) -> Result<RatioCertificate> {
    let grid = &settings.grid;
    let mut instances = Vec::with_capacity(fs.len());
    for f in fs {
        let base = *f.measure().base();
        if base.family() != Family::Gaussian {
            return Err(Error::Kind("the concave comparison is stated for Gaussian measures".into()));
        }
        let star = f.decreasing()?;
        let ss = maximal(&star, grid)?;
        let gs = maximal(&f.gradient()?, grid)?;
        let mut best = (0.0, 0.0, f64::NEG_INFINITY);
        for &t in grid.nodes() {
            let i = exact_profile(&base, t)?;
            let lhs = (ss.eval(t) - star.eval(t)).max(0.0) * i / t;
            let rhs = gs.eval(t);
            let r = ratio(lhs, rhs);
            if r > best.2 {
                best = (lhs, rhs, r);
            }
        }
        instances.push(Instance::new(f.label(), best.0, best.1));
    }
    let params = fs.first().map(|f| f.measure().params()).unwrap_or_default();
    Ok(RatioCertificate::new("concave-gaussian", params, &family_label(fs), settings, instances))
}

/// An embedding instance to be swept along a family.
#[derive(Debug, Clone)]
pub struct SharpnessSetup {
    pub target: RISpace,
    pub space: RISpace,
    pub est: ConvexEstimator,
    pub label: String,
}

impl SharpnessSetup {
    /// `L^{pα/(p+α) - δ, q} ← L^{p,q}` on Cauchy space (`c = 1`); `δ = 0` is
    /// the sharp exponent.
    pub fn cauchy_lorentz(p: f64, q: f64, alpha: f64, delta: f64) -> Result<Self> {
        let exponent = p * alpha / (p + alpha) - delta;
        Ok(Self {
            target: RISpace::lorentz(exponent, q)?,
            space: RISpace::lorentz(p, q)?,
            est: make_estimator(EstimatorFamily::CauchyAlpha { alpha }, 1, 1.0)?,
            label: format!("cauchy-lorentz p={p} q={q} alpha={alpha} delta={delta}"),
        })
    }
}

/// `χ_{[0,2^{-k})}` for each `k`.
pub fn indicator_sweep(ks: impl IntoIterator<Item = i32>) -> Result<Vec<QuantileProfile>> {
    ks.into_iter().map(|k| QuantileProfile::indicator(2f64.powi(-k))).collect()
}

/// One embedding certificate per family member, in order.
pub fn sharpness_scan(
    setup: &SharpnessSetup,
    family: &[QuantileProfile],
    settings: &Settings,
) -> Result<Vec<RatioCertificate>> {
    family
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let mut c = check_embedding(&setup.target, &setup.space, &setup.est, std::slice::from_ref(p), settings)?;
            c.inequality_id = "sharpness".into();
            c.family = setup.label.clone();
            c.params.insert("index".into(), i.to_string());
            Ok(c)
        })
        .collect()
}

/// `last / first` sup ratio of a scan.
pub fn scan_growth(scan: &[RatioCertificate]) -> f64 {
    match (scan.first(), scan.last()) {
        (Some(a), Some(b)) => ratio(b.sup_ratio, a.sup_ratio),
        _ => 0.0,
    }
}

/// Worst status of a run.
pub fn worst_status(certs: &[RatioCertificate]) -> Option<Status> {
    certs.iter().map(|c| c.status).max()
}

/// Header of [`write_csv`].
pub const CSV_HEADER: [&str; 9] = [
    "inequality_id",
    "family",
    "params",
    "n_grid",
    "status",
    "sup_ratio",
    "instance",
    "lhs",
    "rhs",
];

/// One row per instance; floats in scientific notation with 17 significant
/// digits.
pub fn write_csv<W: Write>(certs: &[RatioCertificate], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let mut header: Vec<&str> = CSV_HEADER.to_vec();
    header.push("ratio");
    w.write_record(&header)?;
    for c in certs {
        let params = c
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";");
        for i in &c.instances {
            w.write_record([
                c.inequality_id.as_str(),
                c.family.as_str(),
                params.as_str(),
                &c.n_grid.to_string(),
                c.status.as_str(),
                &fmt_csv(c.sup_ratio),
                i.label.as_str(),
                &fmt_csv(i.lhs),
                &fmt_csv(i.rhs),
                &fmt_csv(i.ratio),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

fn fmt_csv(v: f64) -> String {
    format!("{v:.16e}")
}
