//! Gauss–Legendre rules and composite grids on truncated real intervals.
//!
//! A [`QuadGrid`] is the discretization substrate for every operator in the
//! crate. Single-panel rules come from [`gauss_legendre`]; determinants of
//! kernels with interior breakpoints (projection levels, barrier values) use
//! composite rules from a [`GridPlan`], which places panel edges on every
//! breakpoint and grades panel widths toward them.
//!
//! ```
//! use airyproc_core::quadrature::gauss_legendre;
//!
//! let g = gauss_legendre(40, 0.0, 10.0).unwrap();
//! let s: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| w * (-x).exp()).sum();
//! assert!((s - (1.0 - (-10.0f64).exp())).abs() < 1e-12);
//! ```

use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::error::{invalid, Result};

/// Quadrature nodes and positive weights on `[lo, hi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadGrid {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub lo: f64,
    pub hi: f64,
}

impl QuadGrid {
    pub fn m(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `Σ wᵢ f(xᵢ)`.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Square roots of the weights, the Nyström symmetrization factors.
    pub fn sqrt_weights(&self) -> Vec<f64> {
        self.weights.iter().map(|w| libm::sqrt(*w)).collect()
    }

    /// Nodes in `[a, b)`, with their weights. Only exact when `a` and `b`
    /// are panel edges of a composite grid.
    pub fn restrict(&self, a: f64, b: f64) -> QuadGrid {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            if x >= a && x < b {
                nodes.push(x);
                weights.push(w);
            }
        }
        QuadGrid {
            nodes,
            weights,
            lo: a.max(self.lo),
            hi: b.min(self.hi),
        }
    }

    /// Concatenate grids on adjacent intervals.
    pub fn concat(parts: &[QuadGrid]) -> QuadGrid {
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for p in parts {
            nodes.extend_from_slice(&p.nodes);
            weights.extend_from_slice(&p.weights);
        }
        let lo = parts.first().map_or(0.0, |p| p.lo);
        let hi = parts.last().map_or(0.0, |p| p.hi);
        QuadGrid {
            nodes,
            weights,
            lo,
            hi,
        }
    }
}

/// Reference Gauss–Legendre rule on `[-1, 1]`, computed by Newton iteration
/// on the three-term Legendre recurrence.
pub fn legendre_reference(m: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = alloc::vec![0.0; m];
    let mut w = alloc::vec![0.0; m];
    let half = m.div_ceil(2);
    for i in 0..half {
        let mut z = libm::cos(PI * (i as f64 + 0.75) / (m as f64 + 0.5));
        let mut dp = 1.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(m, z);
            dp = d;
            let dz = p / d;
            z -= dz;
            if dz.abs() <= 1e-16 * z.abs().max(1e-3) {
                let (_, d) = legendre_with_derivative(m, z);
                dp = d;
                break;
            }
        }
        let wi = 2.0 / ((1.0 - z * z) * dp * dp);
        x[i] = -z;
        x[m - 1 - i] = z;
        w[i] = wi;
        w[m - 1 - i] = wi;
    }
    if m % 2 == 1 {
        x[m / 2] = 0.0;
    }
    (x, w)
}

fn legendre_with_derivative(m: usize, z: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = z;
    for k in 2..=m {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * z * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    let d = m as f64 * (z * p1 - p0) / (z * z - 1.0);
    (p1, d)
}

/// The `m`-point Gauss–Legendre rule mapped affinely to `[lo, hi]`.
pub fn gauss_legendre(m: usize, lo: f64, hi: f64) -> Result<QuadGrid> {
    if m < 2 {
        return Err(invalid("gauss_legendre needs m >= 2"));
    }
    if !(lo < hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(invalid("gauss_legendre needs finite lo < hi"));
    }
    let (x, w) = legendre_reference(m);
    Ok(map_rule(&x, &w, lo, hi))
}

fn map_rule(x: &[f64], w: &[f64], lo: f64, hi: f64) -> QuadGrid {
    let c = 0.5 * (lo + hi);
    let h = 0.5 * (hi - lo);
    QuadGrid {
        nodes: x.iter().map(|t| c + h * t).collect(),
        weights: w.iter().map(|v| h * v).collect(),
        lo,
        hi,
    }
}

/// Composite rule with `q` Gauss–Legendre nodes on each panel
/// `[edges[k], edges[k+1]]`.
pub fn composite(edges: &[f64], q: usize) -> Result<QuadGrid> {
    if edges.len() < 2 {
        return Err(invalid("composite rule needs at least one panel"));
    }
    if q < 2 {
        return Err(invalid("composite rule needs q >= 2"));
    }
    if edges.windows(2).any(|e| !(e[0] < e[1])) {
        return Err(invalid("panel edges must be strictly increasing"));
    }
    let (x, w) = legendre_reference(q);
    let mut nodes = Vec::with_capacity(q * (edges.len() - 1));
    let mut weights = Vec::with_capacity(nodes.capacity());
    for e in edges.windows(2) {
        let p = map_rule(&x, &w, e[0], e[1]);
        nodes.extend(p.nodes);
        weights.extend(p.weights);
    }
    Ok(QuadGrid {
        nodes,
        weights,
        lo: edges[0],
        hi: edges[edges.len() - 1],
    })
}

/// The library's plain default: 120 Gauss–Legendre nodes on
/// `[min(level_min, 0) − 10, max(10, level_min + 10)]`.
pub fn default_grid(t_scale: f64, level_min: f64) -> QuadGrid {
    let _ = t_scale;
    let lo = level_min.min(0.0) - 10.0;
    let hi = (10.0f64).max(level_min + 10.0);
    gauss_legendre(120, lo, hi).expect("default grid bounds are valid")
}

/// Resolution settings shared by every determinant evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridParams {
    /// Nominal node count; composite panels get `m / 10` nodes each.
    pub m: usize,
    /// Distance of the upper cutoff beyond the largest level.
    pub pad: f64,
    /// Compute `error_est` by re-evaluating at `2m`.
    pub estimate_error: bool,
}

impl Default for GridParams {
    fn default() -> Self {
        GridParams {
            m: 120,
            pad: 10.0,
            estimate_error: true,
        }
    }
}

impl GridParams {
    pub fn with_m(m: usize) -> Self {
        GridParams {
            m,
            ..Self::default()
        }
    }

    /// Nodes per composite panel.
    pub fn panel_nodes(&self) -> usize {
        (self.m / 10).max(4)
    }

    pub fn doubled(&self) -> Self {
        GridParams {
            m: 2 * self.m,
            ..*self
        }
    }

    pub fn without_error(&self) -> Self {
        GridParams {
            estimate_error: false,
            ..*self
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m < 16 {
            return Err(invalid("grid m must be at least 16"));
        }
        if !(self.pad > 0.0) || !self.pad.is_finite() {
            return Err(invalid("cutoff pad must be positive"));
        }
        Ok(())
    }
}

/// Description of a graded composite grid.
///
/// The local panel width at `x` is the minimum of `base`, of
/// `width + grow·|x − point|` over every refinement, and (when `osc` is
/// set to `c`) of `osc_scale / sqrt(−(x + c))`, which keeps Airy functions
/// of argument `x + c` resolved in their oscillatory region.
#[derive(Debug, Clone, PartialEq)]
pub struct GridPlan {
    pub lo: f64,
    pub hi: f64,
    pub base: f64,
    pub anchors: Vec<f64>,
    pub refinements: Vec<(f64, f64)>,
    pub grow: f64,
    pub osc: Option<f64>,
    pub osc_scale: f64,
}

impl GridPlan {
    pub fn new(lo: f64, hi: f64, base: f64) -> Self {
        GridPlan {
            lo,
            hi,
            base,
            anchors: Vec::new(),
            refinements: Vec::new(),
            grow: 0.6,
            osc: None,
            osc_scale: 2.0,
        }
    }

    pub fn anchor(mut self, x: f64) -> Self {
        self.anchors.push(x);
        self
    }

    pub fn refine(mut self, x: f64, width: f64) -> Self {
        self.refinements.push((x, width));
        self
    }

    pub fn oscillation(mut self, shift: f64) -> Self {
        self.osc = Some(shift);
        self
    }

    pub fn width(&self, x: f64) -> f64 {
        let mut w = self.base;
        for &(p, h) in &self.refinements {
            w = w.min(h + self.grow * (x - p).abs());
        }
        if let Some(c) = self.osc {
            let a = -(x + c);
            if a > 0.0 {
                w = w.min(self.osc_scale / libm::sqrt(a));
            }
        }
        w
    }

    /// Panel edges: every anchor inside `(lo, hi)` is an edge, and each gap
    /// between consecutive mandatory edges is cut so that panels follow the
    /// width function.
    pub fn edges(&self) -> Vec<f64> {
        let mut fixed: Vec<f64> = Vec::with_capacity(self.anchors.len() + 2);
        fixed.push(self.lo);
        let mut inner: Vec<f64> = self
            .anchors
            .iter()
            .copied()
            .filter(|&a| a > self.lo && a < self.hi)
            .collect();
        inner.sort_by(|a, b| a.partial_cmp(b).unwrap());
        inner.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        fixed.extend(inner);
        fixed.push(self.hi);
        fixed.dedup_by(|a, b| (*a - *b).abs() < 1e-12);

        let mut edges = Vec::new();
        edges.push(fixed[0]);
        for seg in fixed.windows(2) {
            let (a, b) = (seg[0], seg[1]);
            // cumulative count of panels, ∫ dx / width(x), on a fine sampling
            let samples = 400usize;
            let h = (b - a) / samples as f64;
            let mut cum = Vec::with_capacity(samples + 1);
            cum.push(0.0);
            let mut acc = 0.0;
            for k in 0..samples {
                let xm = a + (k as f64 + 0.5) * h;
                acc += h / self.width(xm);
                cum.push(acc);
            }
            let n = libm::ceil(acc - 1e-9).max(1.0) as usize;
            let mut k = 0usize;
            for j in 1..n {
                let target = acc * j as f64 / n as f64;
                while cum[k + 1] < target {
                    k += 1;
                }
                let frac = (target - cum[k]) / (cum[k + 1] - cum[k]);
                edges.push(a + (k as f64 + frac) * h);
            }
            edges.push(b);
        }
        edges
    }

    pub fn build(&self, q: usize) -> Result<QuadGrid> {
        if !(self.lo < self.hi) {
            return Err(invalid("grid plan needs lo < hi"));
        }
        composite(&self.edges(), q)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_point_rule() {
        let g = gauss_legendre(2, -1.0, 1.0).unwrap();
        let r = 1.0 / libm::sqrt(3.0);
        assert!((g.nodes[0] + r).abs() < 1e-15 && (g.nodes[1] - r).abs() < 1e-15);
        assert!((g.weights[0] - 1.0).abs() < 1e-15 && (g.weights[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_arguments() {
        assert!(gauss_legendre(1, 0.0, 1.0).is_err());
        assert!(gauss_legendre(4, 1.0, 1.0).is_err());
        assert!(composite(&[0.0, 0.0], 4).is_err());
    }

    #[test]
    fn default_grid_rule() {
        let g = default_grid(1.0, 0.0);
        assert_eq!((g.lo, g.hi, g.m()), (-10.0, 10.0, 120));
        assert_eq!(default_grid(1.0, -5.0).lo, -15.0);
    }

    #[test]
    fn graded_plan_respects_anchors_and_widths() {
        let plan = GridPlan::new(-5.0, 5.0, 1.0).anchor(0.3).refine(0.3, 0.05);
        let e = plan.edges();
        assert!(e.iter().any(|&x| (x - 0.3).abs() < 1e-14));
        for w in e.windows(2) {
            let mid = 0.5 * (w[0] + w[1]);
            assert!(w[1] - w[0] <= 1.6 * plan.width(mid) + 1e-12);
        }
        let g = plan.build(8).unwrap();
        let total: f64 = g.weights.iter().sum();
        assert!((total - 10.0).abs() < 1e-12);
    }
}
