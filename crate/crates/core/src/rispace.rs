//! Rearrangement-invariant quasi-norms on (0,1): Lebesgue, Lorentz,
//! Lorentz-Zygmund, weighted, Marcinkiewicz and Λ spaces.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::curve::{Curve, RealFn};
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::rearrange::{rearrange_curve, ProfileKind, QuantileProfile};

/// A positive function on (0,1) used as a weight or fundamental function.
#[derive(Clone)]
pub struct Weight {
    label: String,
    f: RealFn,
    df: Option<RealFn>,
    /// `t^a` weights are recognized by the Boyd registry.
    power: Option<f64>,
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({})", self.label)
    }
}

impl Weight {
    /// `t^a`.
    pub fn power(a: f64) -> Self {
        Self {
            label: format!("t^{a}"),
            f: Arc::new(move |t: f64| t.powf(a)),
            df: Some(Arc::new(move |t: f64| a * t.powf(a - 1.0))),
            power: Some(a),
        }
    }

    /// `t^a (1 + ln 1/t)^b`.
    pub fn power_log(a: f64, b: f64) -> Self {
        if b == 0.0 {
            return Self::power(a);
        }
        Self {
            label: format!("t^{a}(1+ln1/t)^{b}"),
            f: Arc::new(move |t: f64| t.powf(a) * (1.0 - t.ln()).powf(b)),
            df: Some(Arc::new(move |t: f64| {
                let l = 1.0 - t.ln();
                t.powf(a - 1.0) * l.powf(b - 1.0) * (a * l - b)
            })),
            power: None,
        }
    }

    /// `(ln 1/t)^b`.
    pub fn log_power(b: f64) -> Self {
        Self {
            label: format!("(ln1/t)^{b}"),
            f: Arc::new(move |t: f64| (-t.ln()).powf(b)),
            df: Some(Arc::new(move |t: f64| -b * (-t.ln()).powf(b - 1.0) / t)),
            power: None,
        }
    }

    /// Arbitrary closed form, optionally with its derivative.
    pub fn custom(label: &str, f: RealFn, df: Option<RealFn>) -> Self {
        Self {
            label: label.to_string(),
            f,
            df,
            power: None,
        }
    }

    /// Piecewise-linear interpolant of samples; its derivative for Λ norms
    /// comes from the least concave majorant.
    pub fn sampled(nodes: &[f64], values: &[f64]) -> Result<Self> {
        let curve = Curve::piecewise_linear(nodes.to_vec(), values.to_vec())?;
        let hull = concave_majorant(nodes, values)?;
        let slopes = hull.difference_slopes();
        let c = curve.clone();
        Ok(Self {
            label: "sampled".into(),
            f: Arc::new(move |t: f64| c.eval(t)),
            df: Some(Arc::new(move |t: f64| slopes.eval(t))),
            power: None,
        })
    }

    pub fn eval(&self, t: f64) -> f64 {
        (self.f)(t)
    }

    pub fn derivative(&self) -> Option<&RealFn> {
        self.df.as_ref()
    }

    pub fn label(&self) -> &str {
        &self.label
    }
}

/// Descriptor of a rearrangement-invariant (quasi-)space on (0,1).
#[derive(Debug, Clone)]
pub enum RISpace {
    Lp { p: f64 },
    Lorentz { p: f64, q: f64 },
    LorentzZygmund { p: f64, q: f64, a: f64 },
    Weighted { base: Box<RISpace>, weight: Weight },
    Marcinkiewicz { phi: Weight },
    Lambda { phi: Weight },
}

impl RISpace {
    pub fn lp(p: f64) -> Result<Self> {
        check_exponent("p", p)?;
        Ok(Self::Lp { p })
    }

    pub fn lorentz(p: f64, q: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        Ok(Self::Lorentz { p, q })
    }

    pub fn lorentz_zygmund(p: f64, q: f64, a: f64) -> Result<Self> {
        check_exponent("p", p)?;
        check_exponent("q", q)?;
        if !a.is_finite() {
            return Err(Error::ParameterDomain(format!("log exponent must be finite, got {a}")));
        }
        Ok(Self::LorentzZygmund { p, q, a })
    }

    pub fn weighted(base: RISpace, weight: Weight) -> Self {
        Self::Weighted {
            base: Box::new(base),
            weight,
        }
    }

    /// Short descriptor, parseable back for the Lebesgue/Lorentz scale.
    pub fn descriptor(&self) -> String {
        match self {
            Self::Lp { p } => format!("lp:{}", fmt_exp(*p)),
            Self::Lorentz { p, q } => format!("lorentz:{},{}", fmt_exp(*p), fmt_exp(*q)),
            Self::LorentzZygmund { p, q, a } => format!("lz:{},{},{}", fmt_exp(*p), fmt_exp(*q), a),
            Self::Weighted { base, weight } => format!("{}[w={}]", base.descriptor(), weight.label()),
            Self::Marcinkiewicz { phi } => format!("M[{}]", phi.label()),
            Self::Lambda { phi } => format!("Lambda[{}]", phi.label()),
        }
    }

    /// True for the spaces on which Hardy-Littlewood-Pólya domination holds
    /// with constant 1.
    pub fn is_banach(&self) -> bool {
        match self {
            Self::Lp { p } => *p >= 1.0,
            Self::Lorentz { p, q } => (*p > 1.0 && *q >= 1.0) || (*p == 1.0 && *q == 1.0),
            _ => false,
        }
    }
}

fn check_exponent(name: &str, v: f64) -> Result<()> {
    if v > 0.0 {
        Ok(())
    } else {
        Err(Error::ParameterDomain(format!("{name} must be > 0, got {v}")))
    }
}

fn fmt_exp(v: f64) -> String {
    if v.is_infinite() {
        "inf".into()
    } else {
        v.to_string()
    }
}

fn parse_exp(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.eq_ignore_ascii_case("inf") || s == "∞" {
        return Ok(f64::INFINITY);
    }
    s.parse::<f64>()
        .map_err(|_| Error::Usage(format!("bad exponent '{s}' in space descriptor")))
}

impl FromStr for RISpace {
    type Err = Error;

    /// `lp:p`, `lorentz:p,q`, `lz:p,q,a` (`inf` allowed for exponents).
    fn from_str(s: &str) -> Result<Self> {
        let (head, args) = s
            .split_once(':')
            .ok_or_else(|| Error::Usage(format!("space descriptor '{s}' lacks ':'")))?;
        let parts: Vec<&str> = args.split(',').collect();
        match (head.trim().to_ascii_lowercase().as_str(), parts.len()) {
            ("lp", 1) => Self::lp(parse_exp(parts[0])?),
            ("lorentz", 2) => Self::lorentz(parse_exp(parts[0])?, parse_exp(parts[1])?),
            ("lz", 3) => Self::lorentz_zygmund(
                parse_exp(parts[0])?,
                parse_exp(parts[1])?,
                parts[2]
                    .trim()
                    .parse()
                    .map_err(|_| Error::Usage(format!("bad log exponent in '{s}'")))?,
            ),
            _ => Err(Error::Usage(format!("unknown space descriptor '{s}'"))),
        }
        .map_err(|e| match e {
            Error::ParameterDomain(m) => Error::Usage(m),
            other => other,
        })
    }
}

/// Relative growth threshold at the grid floor beyond which a supremum is
/// reported as unbounded.
const SUP_GROWTH: f64 = 1e-6;

/// `sup_t k(t, f(t))` with divergence detection at `t -> 0`.
fn sup_profile(curve: &Curve, grid: &Grid, k: impl Fn(f64, f64) -> f64) -> f64 {
    let s = curve.sup(grid, &k);
    let floor = grid.floor();
    let (a, b) = (k(floor, curve.eval(floor)), k(2.0 * floor, curve.eval(2.0 * floor)));
    if a.is_infinite() {
        return f64::INFINITY;
    }
    if a > 0.0 && b > 0.0 && (a / b).log2() > SUP_GROWTH {
        return f64::INFINITY;
    }
    let at0 = k(0.0, curve.eval(0.0));
    if at0.is_infinite() && at0 > 0.0 && a > 0.0 {
        return f64::INFINITY;
    }
    s
}

fn finite_or_inf(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// `‖f‖_X` of a decreasing rearrangement; `+∞` for divergent norms.
pub fn quasinorm(space: &RISpace, f: &QuantileProfile, grid: &Grid) -> Result<f64> {
    if f.kind() != ProfileKind::Nonincreasing {
        return Err(Error::Kind("quasi-norms take f*, rearrange |f| first".into()));
    }
    Ok(finite_or_inf(norm_decreasing(space, f.curve(), grid)?))
}

fn norm_decreasing(space: &RISpace, c: &Curve, grid: &Grid) -> Result<f64> {
    Ok(match space {
        RISpace::Lp { p } => lp_norm(c, *p, grid),
        RISpace::Lorentz { p, q } => lorentz(c, *p, *q, 0.0, grid),
        RISpace::LorentzZygmund { p, q, a } => lorentz(c, *p, *q, *a, grid),
        RISpace::Weighted { base, weight } => {
            let w = weight.f.clone();
            let g = c.map(move |t, v| v * w(t));
            norm_of_curve(base, &g, grid)?
        }
        RISpace::Marcinkiewicz { phi } => {
            let w = phi.f.clone();
            sup_profile(c, grid, |t, v| if v == 0.0 { 0.0 } else { v * w(t) })
        }
        RISpace::Lambda { phi } => {
            let dphi = match &phi.df {
                Some(d) => d.clone(),
                None => {
                    let nodes = grid.nodes();
                    let vals: Vec<f64> = nodes.iter().map(|&t| phi.eval(t)).collect();
                    let w = Weight::sampled(nodes, &vals)?;
                    w.df.unwrap()
                }
            };
            c.integrate(grid, |t, v| if v == 0.0 { 0.0 } else { v * dphi(t) })
        }
    })
}

fn lp_norm(c: &Curve, p: f64, grid: &Grid) -> f64 {
    if p.is_infinite() {
        return sup_profile(c, grid, |_, v| v.abs());
    }
    c.integrate(grid, |_, v| v.abs().powf(p)).powf(1.0 / p)
}

fn lorentz(c: &Curve, p: f64, q: f64, a: f64, grid: &Grid) -> f64 {
    let log_w = move |t: f64| if a == 0.0 { 1.0 } else { (1.0 - t.ln()).powf(a) };
    if q.is_infinite() {
        return sup_profile(c, grid, |t, v| {
            if v == 0.0 {
                0.0
            } else {
                t.powf(1.0 / p) * log_w(t) * v
            }
        });
    }
    if p == q && a == 0.0 {
        return lp_norm(c, p, grid);
    }
    let e = q / p - 1.0;
    c.integrate(grid, |t, v| {
        if v == 0.0 {
            0.0
        } else {
            t.powf(e) * (log_w(t) * v).powf(q)
        }
    })
    .powf(1.0 / q)
}

/// Sub-cells per grid cell when rearranging a closed-form curve.
const REARRANGE_SUBDIVISION: usize = 4;

/// `‖g‖_X̄` for an arbitrary function on (0,1): the norm of its decreasing
/// rearrangement (computed directly for Lebesgue spaces).
pub fn norm_of_curve(space: &RISpace, g: &Curve, grid: &Grid) -> Result<f64> {
    match space {
        RISpace::Lp { p } => return Ok(finite_or_inf(lp_norm(g, *p, grid))),
        RISpace::Lorentz { p, q } if p == q => return Ok(finite_or_inf(lp_norm(g, *p, grid))),
        _ => {}
    }
    if g.is_nonincreasing(0.0) && g.node_range().0 >= 0.0 {
        return Ok(finite_or_inf(norm_decreasing(space, g, grid)?));
    }
    let mut fine = g.refined(grid.nodes());
    if fine.has_exact() {
        // the sweep is exact only for the node interpolant
        fine = fine.subdivided(REARRANGE_SUBDIVISION);
    }
    let star = rearrange_curve(&fine, true)?;
    Ok(finite_or_inf(norm_decreasing(space, star.curve(), grid)?))
}

/// `φ_X(t) = ‖χ_{[0,t)}‖_X`.
pub fn fundamental(space: &RISpace, t: f64, grid: &Grid) -> Result<f64> {
    if !(t > 0.0 && t <= 1.0) {
        return Err(Error::Domain(format!("fundamental function needs t in (0,1], got {t}")));
    }
    quasinorm(space, &QuantileProfile::indicator(t)?, grid)
}

/// `E_s f(t) = f*(t/s)` for `t < min(s,1)`, zero beyond.
pub fn dilation(f: &QuantileProfile, s: f64) -> Result<QuantileProfile> {
    if !(s > 0.0 && s.is_finite()) {
        return Err(Error::Domain(format!("dilation factor must be > 0, got {s}")));
    }
    if s == 1.0 {
        return Ok(f.clone());
    }
    let c = f.curve();
    let mut nodes = Vec::with_capacity(c.nodes().len() + 2);
    let mut left = Vec::with_capacity(nodes.capacity());
    let mut right = Vec::with_capacity(nodes.capacity());
    for ((&x, &l), &r) in c.nodes().iter().zip(c.left_values()).zip(c.right_values()) {
        let t = s * x;
        if t < 1.0 {
            nodes.push(t);
            left.push(l);
            right.push(r);
        }
    }
    if s < 1.0 {
        let end = f.ess_inf();
        match nodes.last() {
            Some(&last) if last == s => {
                *right.last_mut().unwrap() = 0.0;
            }
            _ => {
                nodes.push(s);
                left.push(end);
                right.push(0.0);
            }
        }
        nodes.push(1.0);
        left.push(0.0);
        right.push(0.0);
    } else {
        let v = c.eval(1.0 / s);
        nodes.push(1.0);
        left.push(v);
        right.push(v);
    }
    let exact = c.exact_fn().cloned().map(|g| {
        Arc::new(move |t: f64| if t < s { g(t / s) } else { 0.0 }) as RealFn
    });
    let curve = Curve::from_parts(nodes, left, right, exact)?;
    QuantileProfile::new(curve, f.kind())
}

/// Boyd indices `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Boyd {
    pub lower: f64,
    pub upper: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoydMode {
    Analytic,
    Numeric,
}

/// Registry values where known in closed form.
pub fn boyd_analytic(space: &RISpace) -> Option<Boyd> {
    let both = |v: f64| Some(Boyd { lower: v, upper: v });
    match space {
        RISpace::Lp { p } | RISpace::Lorentz { p, .. } | RISpace::LorentzZygmund { p, .. } => both(1.0 / p),
        RISpace::Marcinkiewicz { phi } | RISpace::Lambda { phi } => phi.power.and_then(both),
        RISpace::Weighted { .. } => None,
    }
}

/// Boyd indices from the registry, or estimated numerically when asked or
/// when the space is not registered.
pub fn boyd(space: &RISpace, mode: BoydMode, grid: &Grid) -> Result<Boyd> {
    match (mode, boyd_analytic(space)) {
        (BoydMode::Analytic, Some(b)) => Ok(b),
        _ => boyd_numeric(space, grid),
    }
}

const PROBE_SUPPORT: f64 = 1.0 / 4096.0;
/// Probes are held constant below this point so every norm is finite and
/// resolved by the grid.
const PROBE_CAP: f64 = 1.0 / 1_073_741_824.0;
const DILATION_OCTAVES: i32 = 8;

fn probe(grid: &Grid, a: f64, b: f64) -> Result<QuantileProfile> {
    let shape = move |t: f64| t.powf(-a) * (1.0 - t.ln()).powf(b);
    let g = move |t: f64| {
        if t < PROBE_SUPPORT {
            shape(t.max(PROBE_CAP))
        } else {
            0.0
        }
    };
    let mut nodes: Vec<f64> = grid
        .nodes()
        .iter()
        .copied()
        .filter(|&t| t < PROBE_SUPPORT)
        .collect();
    let mut left: Vec<f64> = nodes.iter().map(|&t| g(t)).collect();
    let mut right = left.clone();
    nodes.push(PROBE_SUPPORT);
    left.push(shape(PROBE_SUPPORT));
    right.push(0.0);
    nodes.push(1.0);
    left.push(0.0);
    right.push(0.0);
    let curve = Curve::from_parts(nodes, left, right, Some(Arc::new(g)))?;
    QuantileProfile::new(curve, ProfileKind::Nonincreasing)
}

fn probe_family(level: usize) -> Vec<(f64, f64)> {
    let na = 8 << level;
    let nb = 4 << level;
    let mut out = vec![(0.0, 0.0)];
    for i in 0..na {
        for j in 0..=nb {
            let a = i as f64 / na as f64;
            let b = -2.0 + 4.0 * j as f64 / nb as f64;
            if a == 0.0 && b == 0.0 {
                continue;
            }
            // nonincreasing on the support needs a + b/(1 + ln 4096) >= 0
            if a + b / (1.0 - PROBE_SUPPORT.ln()) < 0.0 {
                continue;
            }
            out.push((a, b));
        }
    }
    out
}

fn boyd_estimate(space: &RISpace, grid: &Grid, level: usize) -> Result<Boyd> {
    let mut h_up = vec![0.0f64; DILATION_OCTAVES as usize];
    let mut h_down = vec![0.0f64; DILATION_OCTAVES as usize];
    for (a, b) in probe_family(level) {
        let f = probe(grid, a, b)?;
        let nf = quasinorm(space, &f, grid)?;
        if !(nf.is_finite() && nf > 0.0) {
            continue;
        }
        for k in 1..=DILATION_OCTAVES {
            let s = 2f64.powi(k);
            let up = quasinorm(space, &dilation(&f, s)?, grid)?;
            let down = quasinorm(space, &dilation(&f, 1.0 / s)?, grid)?;
            let i = (k - 1) as usize;
            if up.is_finite() {
                h_up[i] = h_up[i].max(up / nf);
            }
            if down.is_finite() {
                h_down[i] = h_down[i].max(down / nf);
            }
        }
    }
    let mut upper = f64::INFINITY;
    let mut lower = f64::NEG_INFINITY;
    for k in 1..=DILATION_OCTAVES {
        let ln_s = (k as f64) * std::f64::consts::LN_2;
        let i = (k - 1) as usize;
        if h_up[i] > 0.0 {
            upper = upper.min(h_up[i].ln() / ln_s);
        }
        if h_down[i] > 0.0 {
            lower = lower.max(h_down[i].ln() / -ln_s);
        }
    }
    if !upper.is_finite() || !lower.is_finite() {
        return Err(Error::Convergence("no probe has a finite positive norm".into()));
    }
    Ok(Boyd { lower, upper })
}

/// Dilation-norm estimate of the Boyd indices over power-log probes,
/// checked against a doubled probe family.
pub fn boyd_numeric(space: &RISpace, grid: &Grid) -> Result<Boyd> {
    let coarse = boyd_estimate(space, grid, 0)?;
    let fine = boyd_estimate(space, grid, 1)?;
    let moved = |x: f64, y: f64| (x - y).abs() > 1e-3 && (x - y).abs() > 0.05 * x.abs().max(y.abs());
    if moved(coarse.lower, fine.lower) || moved(coarse.upper, fine.upper) {
        return Err(Error::Convergence(format!(
            "Boyd estimate moved from {coarse:?} to {fine:?} when the probe family doubled"
        )));
    }
    Ok(fine)
}

/// Least concave majorant of the points `(nodes[i], values[i])`, evaluated
/// as a piecewise-linear curve on the same nodes.
pub fn concave_majorant(nodes: &[f64], values: &[f64]) -> Result<Curve> {
    if nodes.is_empty() || nodes.len() != values.len() {
        return Err(Error::EmptyInput("concave majorant needs matching samples".into()));
    }
    if values.iter().any(|&v| v < 0.0 || v.is_nan()) {
        return Err(Error::Domain("concave majorant needs nonnegative samples".into()));
    }
    // upper hull by monotone chain
    let mut hull: Vec<usize> = Vec::with_capacity(nodes.len());
    for i in 0..nodes.len() {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            let cross = (nodes[b] - nodes[a]) * (values[i] - values[a])
                - (values[b] - values[a]) * (nodes[i] - nodes[a]);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(i);
    }
    let mut out = Vec::with_capacity(nodes.len());
    let mut j = 0;
    for (i, &t) in nodes.iter().enumerate() {
        while j + 1 < hull.len() && nodes[hull[j + 1]] < t {
            j += 1;
        }
        let a = hull[j];
        let v = if a == i || j + 1 >= hull.len() {
            values[a].max(values[i])
        } else {
            let b = hull[j + 1];
            values[a] + (values[b] - values[a]) * (t - nodes[a]) / (nodes[b] - nodes[a])
        };
        out.push(v.max(values[i]));
    }
    Curve::piecewise_linear(nodes.to_vec(), out)
}
