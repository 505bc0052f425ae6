//! Graded grids on (0,1), Gauss-Legendre cell quadrature and one-dimensional
//! supremum searches.
//!
//! Profiles, weights and Hardy kernels on (0,1) vanish or blow up like powers
//! of `t` and `1 - t`, so every grid is geometric toward both endpoints: the
//! octave `[2^-(k+1), 2^-k]` is split into `m` uniform cells for `k = 1..OCTAVES`
//! and the right half is the mirror image `t -> 1 - t`. Dyadic points and `1/2`
//! are always nodes.

use std::sync::OnceLock;

/// Number of octaves resolved toward each endpoint. The grid floor is
/// `2^-(OCTAVES + 1)`.
pub const OCTAVES: usize = 40;

/// Gauss-Legendre order used on every cell.
pub const GAUSS_ORDER: usize = 16;

/// A graded, symmetric grid of nodes strictly inside (0,1).
#[derive(Debug, Clone, PartialEq)]
pub struct Grid {
    nodes: Vec<f64>,
    per_octave: usize,
}

impl Grid {
    /// Builds a graded grid with roughly `n` nodes (at least two cells per
    /// octave).
    pub fn graded(n: usize) -> Self {
        let per_octave = (n / (2 * OCTAVES)).max(2);
        let mut left = Vec::with_capacity(OCTAVES * per_octave + 1);
        for k in (1..=OCTAVES).rev() {
            let a = 0.5f64.powi(k as i32 + 1);
            let b = 0.5f64.powi(k as i32);
            for j in 0..per_octave {
                left.push(a + (b - a) * j as f64 / per_octave as f64);
            }
        }
        let mut nodes = left.clone();
        nodes.push(0.5);
        nodes.extend(left.iter().rev().map(|x| 1.0 - x));
        Self { nodes, per_octave }
    }

    /// Grid of the same shape with twice as many cells per octave.
    pub fn doubled(&self) -> Self {
        Self::graded(4 * OCTAVES * self.per_octave)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn per_octave(&self) -> usize {
        self.per_octave
    }

    /// Smallest node; integrals over `(0, floor)` are extrapolated.
    pub fn floor(&self) -> f64 {
        self.nodes[0]
    }

    /// Nodes in `(0, 1/2]`.
    pub fn left_half(&self) -> &[f64] {
        let mid = self.nodes.len() / 2;
        &self.nodes[..=mid]
    }
}

impl Default for Grid {
    fn default() -> Self {
        Self::graded(4096)
    }
}

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre() -> &'static (Vec<f64>, Vec<f64>) {
    static RULE: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    RULE.get_or_init(|| legendre_rule(GAUSS_ORDER))
}

fn legendre_rule(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for j in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * j + 1) as f64 * z * p1 - j as f64 * p2) / (j + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// `∫_a^b g` by one Gauss-Legendre panel.
pub fn gauss_cell(a: f64, b: f64, g: &impl Fn(f64) -> f64) -> f64 {
    if b <= a {
        return 0.0;
    }
    let (x, w) = gauss_legendre();
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    x.iter()
        .zip(w)
        .map(|(xi, wi)| wi * g(mid + half * xi))
        .sum::<f64>()
        * half
}

/// Cumulative integrals `C[i] = ∫_{nodes[0]}^{nodes[i]} g`, one panel per cell.
pub fn cumulative(nodes: &[f64], g: &impl Fn(f64) -> f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(nodes.len());
    let mut acc = 0.0;
    out.push(0.0);
    for w in nodes.windows(2) {
        acc += gauss_cell(w[0], w[1], g);
        out.push(acc);
    }
    out
}

/// Local power-law exponents below this value are treated as non-integrable.
const DIVERGENCE_EXPONENT: f64 = -1.0 + 1e-6;

/// `∫_0^eps g` assuming `g(t) ≈ c t^a` on `(0, eps)`, with the exponent read
/// off from `g(eps/2)` and `g(eps/4)` (strictly inside, so a jump at `eps`
/// does not leak in). Returns `±∞` for a non-integrable head.
pub fn head_integral(eps: f64, g: &impl Fn(f64) -> f64) -> f64 {
    power_extrapolate(eps, g(0.5 * eps), g(0.25 * eps))
}

/// `∫_{1-eps}^1 g`, the mirror of [`head_integral`].
pub fn tail_integral(eps: f64, g: &impl Fn(f64) -> f64) -> f64 {
    power_extrapolate(eps, g(1.0 - 0.5 * eps), g(1.0 - 0.25 * eps))
}

/// `∫_0^eps c t^a` given the values at `eps/2` and `eps/4`.
fn power_extrapolate(eps: f64, at: f64, at_half: f64) -> f64 {
    if at == 0.0 && at_half == 0.0 {
        return 0.0;
    }
    if !at.is_finite() || !at_half.is_finite() {
        return if at.is_nan() || at_half.is_nan() {
            f64::NAN
        } else {
            f64::INFINITY * at.signum()
        };
    }
    if at == 0.0 || at_half == 0.0 || at.signum() != at_half.signum() {
        return eps * 0.5 * (at + at_half);
    }
    let a = (at / at_half).log2();
    if a <= DIVERGENCE_EXPONENT {
        return f64::INFINITY * at.signum();
    }
    at * 2f64.powf(a) * eps / (a + 1.0)
}

/// Sorted union of two sorted node lists, dropping near-duplicates.
pub fn merge_nodes(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            a[i - 1]
        } else {
            j += 1;
            b[j - 1]
        };
        match out.last() {
            Some(&last) if (next - last).abs() <= 1e-15 * next.abs().max(1e-300) => {}
            _ => out.push(next),
        }
    }
    out
}

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of `f` on `[lo, hi]`.
pub fn golden_max(f: &impl Fn(f64) -> f64, mut lo: f64, mut hi: f64, xtol: f64) -> (f64, f64) {
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..200 {
        if hi - lo <= xtol * lo.abs().max(hi.abs()) {
            break;
        }
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

/// Global grid scan followed by golden-section refinement in the bracket of
/// the best node. Returns the argmax and the maximum found.
pub fn scan_then_golden(f: &impl Fn(f64) -> f64, nodes: &[f64], xtol: f64) -> (f64, f64) {
    assert!(!nodes.is_empty());
    let mut best = 0;
    let mut best_val = f64::NEG_INFINITY;
    for (i, &x) in nodes.iter().enumerate() {
        let v = f(x);
        if v > best_val {
            best_val = v;
            best = i;
        }
    }
    let lo = nodes[best.saturating_sub(1)];
    let hi = nodes[(best + 1).min(nodes.len() - 1)];
    if hi > lo {
        let (x, v) = golden_max(f, lo, hi, xtol);
        if v > best_val {
            return (x, v);
        }
    }
    (nodes[best], best_val)
}
