//! The Airy₁ process: one-point law, finite-dimensional distributions by
//! the path-integral and extended-kernel formulas, hitting probabilities of
//! piecewise-linear barriers, conditional laws and local diagnostics.
//!
//! Every function takes the grid resolution explicitly. `DetResult`s carry
//! the difference against the doubled grid as their error estimate when
//! [`GridParams::estimate_error`] is set.

use alloc::vec::Vec;

use crate::engine::{condition_at, ExtendedProblem, Flavor, PathProblem, Step, StepKind};
use crate::error::{invalid, Error, Result};
use crate::fredholm::{fredholm_det, DetResult};
use crate::kernels::{e_tau_value, BarrierSegment};
use crate::par;
use crate::quadrature::{gauss_legendre, GridParams};

/// Ordered times with one level per time.
#[derive(Debug, Clone, PartialEq)]
pub struct FddQuery {
    pub times: Vec<f64>,
    pub levels: Vec<f64>,
}

impl FddQuery {
    pub fn new(times: Vec<f64>, levels: Vec<f64>) -> Result<Self> {
        let q = FddQuery { times, levels };
        q.validate()?;
        Ok(q)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.is_empty() || self.times.len() != self.levels.len() {
            return Err(invalid("times and levels must be non-empty and of equal length"));
        }
        if self.times.iter().any(|t| !t.is_finite()) || self.levels.iter().any(|x| x.is_nan()) {
            return Err(invalid("times must be finite and levels not NaN"));
        }
        if self.times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::UnorderedTimes);
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Every time moved by `c`.
    pub fn shifted(&self, c: f64) -> FddQuery {
        FddQuery {
            times: self.times.iter().map(|t| t + c).collect(),
            levels: self.levels.clone(),
        }
    }

    /// `(tᵢ, xᵢ) → (−t_{n+1−i}, x_{n+1−i})`.
    pub fn reflected(&self) -> FddQuery {
        FddQuery {
            times: self.times.iter().rev().map(|t| -t).collect(),
            levels: self.levels.iter().rev().copied().collect(),
        }
    }
}

/// Piecewise-linear barrier through `(time, height)` breakpoints.
#[derive(Debug, Clone, PartialEq)]
pub struct Barrier {
    pub breakpoints: Vec<(f64, f64)>,
}

impl Barrier {
    pub fn new(breakpoints: Vec<(f64, f64)>) -> Result<Self> {
        let b = Barrier { breakpoints };
        b.validate()?;
        Ok(b)
    }

    /// Constant height `m` on `[l, r]`.
    pub fn constant(l: f64, r: f64, m: f64) -> Result<Self> {
        Barrier::new(alloc::vec![(l, m), (r, m)])
    }

    pub fn validate(&self) -> Result<()> {
        if self.breakpoints.len() < 2 {
            return Err(Error::InvalidBarrier("at least two breakpoints are required".into()));
        }
        if self.breakpoints.iter().any(|(t, h)| !t.is_finite() || !h.is_finite()) {
            return Err(Error::InvalidBarrier("breakpoints must be finite".into()));
        }
        if self.breakpoints.windows(2).any(|w| !(w[0].0 < w[1].0)) {
            return Err(Error::InvalidBarrier("breakpoint times must be strictly increasing".into()));
        }
        Ok(())
    }

    pub fn start(&self) -> f64 {
        self.breakpoints[0].0
    }

    pub fn end(&self) -> f64 {
        self.breakpoints[self.breakpoints.len() - 1].0
    }

    /// Linear interpolation; clamped outside `[start, end]`.
    pub fn eval(&self, t: f64) -> f64 {
        let b = &self.breakpoints;
        if t <= b[0].0 {
            return b[0].1;
        }
        let k = b.partition_point(|p| p.0 <= t);
        if k >= b.len() {
            return b[b.len() - 1].1;
        }
        let (t0, g0) = b[k - 1];
        let (t1, g1) = b[k];
        g0 + (g1 - g0) * (t - t0) / (t1 - t0)
    }

    pub fn segments(&self) -> Vec<BarrierSegment> {
        self.breakpoints
            .windows(2)
            .map(|w| BarrierSegment {
                t0: w[0].0,
                t1: w[1].0,
                g0: w[0].1,
                g1: w[1].1,
            })
            .collect()
    }
}

/// Local-Brownian diagnostics at one `(x, t, y, ε)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalingDiagnostics {
    pub epsilon: f64,
    /// Ratio of resolvent-weighted integrals, evaluated at `z = y`.
    pub g_val: f64,
    /// `P(A₁(0) ≤ x, A₁(εt) ≤ x + √ε y) / F_GOE(2x)`.
    pub h_val: f64,
    /// Sup distance over the y-panel between the scaled conditional CDF and
    /// the Gaussian CDF with variance `2t`.
    pub gaussian_gap: f64,
    /// Least-squares variance constant `D` of the fit `Φ(y / √(D t))`.
    pub fitted_variance: f64,
}

/// y-panel used for the Gaussian comparison.
pub const SCALING_PANEL: [f64; 5] = [-2.0, -1.0, 0.0, 1.0, 2.0];

/// Conditioning is refused when `d/dx F_GOE(2x)` falls below this.
pub const DENSITY_FLOOR: f64 = 1e-6;

/// `P(A₁(0) ≤ x) = F_GOE(2x)`.
pub fn marginal_cdf(x: f64, params: &GridParams) -> Result<DetResult> {
    if !x.is_finite() {
        return Err(Error::Domain("marginal level must be finite".into()));
    }
    fredholm_det(&marginal_problem(x), params)
}

fn marginal_problem(x: f64) -> PathProblem {
    PathProblem {
        flavor: Flavor::Airy1,
        g0: x,
        steps: Vec::new(),
        conj_factor: 1.0,
    }
}

/// `d/dx P(A₁(0) ≤ x)`, from the resolvent of `P_x B₀`.
pub fn marginal_density(x: f64, params: &GridParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("marginal level must be finite".into()));
    }
    let c = condition_at(&marginal_problem(x), params)?;
    Ok(c.det * c.trace)
}

/// Joint CDF by the path-integral formula.
pub fn fdd_path_integral(q: &FddQuery, params: &GridParams) -> Result<DetResult> {
    q.validate()?;
    let p = PathProblem::projections(Flavor::Airy1, &q.times, &q.levels)?;
    fredholm_det(&p, params)
}

/// Joint CDF by the extended-kernel formula.
pub fn fdd_extended(q: &FddQuery, params: &GridParams) -> Result<DetResult> {
    q.validate()?;
    let p = ExtendedProblem::new(Flavor::Airy1, &q.times, &q.levels)?;
    fredholm_det(&p, params)
}

/// `P(A₁(t) < g(t) on [ℓ, r])` for a piecewise-linear barrier `g`.
pub fn hitting_continuum(b: &Barrier, params: &GridParams) -> Result<DetResult> {
    b.validate()?;
    let steps = b
        .segments()
        .into_iter()
        .map(|s| Step {
            dt: s.duration(),
            g_start: s.g0,
            g_end: s.g1,
            kind: StepKind::Bridge,
        })
        .collect();
    let p = PathProblem {
        flavor: Flavor::Airy1,
        g0: b.breakpoints[0].1,
        steps,
        conj_factor: 1.0,
    };
    fredholm_det(&p, params)
}

/// The barrier checked only at `n` equally spaced times.
pub fn hitting_discrete_chain(b: &Barrier, n: usize, params: &GridParams) -> Result<DetResult> {
    b.validate()?;
    if n < 2 {
        return Err(invalid("chain needs n >= 2"));
    }
    let (l, r) = (b.start(), b.end());
    let times: Vec<f64> = (0..n)
        .map(|i| if i + 1 == n { r } else { l + (r - l) * i as f64 / (n - 1) as f64 })
        .collect();
    let levels = times.iter().map(|&t| b.eval(t)).collect();
    fdd_path_integral(&FddQuery { times, levels }, params)
}

fn conditioned_problem(x: f64, times: &[f64], offsets: &[f64]) -> Result<PathProblem> {
    if times.is_empty() || times.len() != offsets.len() {
        return Err(invalid("times and offsets must be non-empty and of equal length"));
    }
    if !(times[0] > 0.0) {
        return Err(invalid("conditional times must be positive"));
    }
    let mut t = alloc::vec![0.0];
    t.extend_from_slice(times);
    let mut lv = alloc::vec![x];
    lv.extend(offsets.iter().map(|y| x + y));
    PathProblem::projections(Flavor::Airy1, &t, &lv)
}

/// `P(A₁(tᵢ) ≤ x + yᵢ, i = 1..n | A₁(0) = x)` for `0 < t₁ < … < tₙ`.
pub fn conditional_fdd(x: f64, times: &[f64], offsets: &[f64], params: &GridParams) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::Domain("conditioning level must be finite".into()));
    }
    let dens = marginal_density(x, params)?;
    if !(dens > DENSITY_FLOOR) {
        return Err(Error::DegenerateConditioning { density: dens });
    }
    let c = condition_at(&conditioned_problem(x, times, offsets)?, params)?;
    Ok(c.det * c.trace / dens)
}

/// Second and fourth increment moments over a lag `t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IncrementMoments {
    pub t: f64,
    pub second: f64,
    pub fourth: f64,
    /// Largest change of either moment under a coarser (a, d) rule; zero
    /// when error estimation is off.
    pub error_est: f64,
}

impl IncrementMoments {
    pub fn order(&self, order: u32) -> Result<f64> {
        match order {
            2 => Ok(self.second),
            4 => Ok(self.fourth),
            _ => Err(invalid("order must be 2 or 4")),
        }
    }
}

/// `E[(A₁(t) − A₁(0))^order]` for `order ∈ {2, 4}`.
pub fn increment_moment(t: f64, order: u32, params: &GridParams) -> Result<f64> {
    increment_moment_between(0.0, t, order, params)
}

/// `E[(A₁(t₁) − A₁(t₀))^order]`.
pub fn increment_moment_between(t0: f64, t1: f64, order: u32, params: &GridParams) -> Result<f64> {
    if order != 2 && order != 4 {
        return Err(invalid("order must be 2 or 4"));
    }
    moments_rule(t0, t1, MOMENT_LEVEL_NODES, MOMENT_GAP_NODES, params)
        .map(|(m2, m4)| if order == 2 { m2 } else { m4 })
}

/// Both moments from one set of determinant evaluations.
pub fn increment_moments(t: f64, params: &GridParams) -> Result<IncrementMoments> {
    let (second, fourth) = moments_rule(0.0, t, MOMENT_LEVEL_NODES, MOMENT_GAP_NODES, params)?;
    let error_est = if params.estimate_error {
        let (c2, c4) = moments_rule(0.0, t, 3 * MOMENT_LEVEL_NODES / 4, 3 * MOMENT_GAP_NODES / 4, params)?;
        (second - c2).abs().max((fourth - c4).abs())
    } else {
        0.0
    };
    Ok(IncrementMoments {
        t,
        second,
        fourth,
        error_est,
    })
}

/// Gauss–Legendre nodes in the level and in the gap variable.
const MOMENT_LEVEL_NODES: usize = 40;
const MOMENT_GAP_NODES: usize = 20;
const MOMENT_CUTOFF: f64 = 6.0;

/// With `X = A₁(t₀)`, `Y = A₁(t₁)` exchangeable,
/// `E[(Y−X)^p] = 2p(p−1) ∫∫_{a<b} (b−a)^{p−2} [G(a) − F(a,b)] da db`,
/// `G` the one-point CDF and `F` the two-point CDF; `a` is cut to `[−6, 6]`.
fn moments_rule(t0: f64, t1: f64, na: usize, nd: usize, params: &GridParams) -> Result<(f64, f64)> {
    let t = t1 - t0;
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("increment time must be positive"));
    }
    let p = params.without_error();
    let ga = gauss_legendre(na, -MOMENT_CUTOFF, MOMENT_CUTOFF)?;
    let dmax = 12.0 * libm::sqrt(t) + 1.0;
    let gd = gauss_legendre(nd, 0.0, dmax)?;
    let marg: Vec<Result<f64>> = par::map(na, |i| marginal_cdf(ga.nodes[i], &p).map(|r| r.value));
    let joint: Vec<Result<f64>> = par::map(na * nd, |k| {
        let a = ga.nodes[k / nd];
        let d = gd.nodes[k % nd];
        let q = FddQuery {
            times: alloc::vec![t0, t1],
            levels: alloc::vec![a, a + d],
        };
        fdd_path_integral(&q, &p).map(|r| r.value)
    });
    let mut m2 = 0.0;
    let mut m4 = 0.0;
    for i in 0..na {
        let g = marg[i].clone()?;
        for k in 0..nd {
            let f = joint[i * nd + k].clone()?;
            let w = ga.weights[i] * gd.weights[k] * (g - f);
            let d = gd.nodes[k];
            m2 += w;
            m4 += w * d * d;
        }
    }
    Ok((4.0 * m2, 24.0 * m4))
}

/// `h^ε`, `g^ε` and the Gaussian comparison for one time `t`.
pub fn local_scaling_diagnostics(
    x: f64,
    t: f64,
    y: f64,
    epsilon: f64,
    params: &GridParams,
) -> Result<ScalingDiagnostics> {
    if !(epsilon > 0.0 && epsilon <= 1.0) {
        return Err(invalid("epsilon must lie in (0, 1]"));
    }
    if !(t > 0.0) || !t.is_finite() || !x.is_finite() || y.is_nan() {
        return Err(invalid("need finite x, t > 0 and y not NaN"));
    }
    let p = params.without_error();
    let se = libm::sqrt(epsilon);
    let et = epsilon * t;
    let goe = marginal_cdf(x, &p)?.value;

    let joint = fdd_path_integral(
        &FddQuery {
            times: alloc::vec![0.0, et],
            levels: alloc::vec![x, x + se * y],
        },
        &p,
    )?
    .value;
    let h_val = joint / goe;

    // g^ε: E_{εt}(√ε z + x, ·) against the resolvent column, z = y
    let den = condition_at(&marginal_problem(x), &p)?;
    let dens = den.det * den.trace;
    if !(dens > DENSITY_FLOOR) {
        return Err(Error::DegenerateConditioning { density: dens });
    }
    let num = condition_at(&conditioned_problem(x, &[et], &[se * y])?, &p)?;
    let pt = se * y + x;
    let e_row = |v: f64| e_tau_value(et, pt, v);
    let mut g_num = e_row(x);
    for ((&v, &w), &yy) in num.grid.nodes.iter().zip(&num.grid.weights).zip(&num.y) {
        g_num += w * e_row(v) * yy;
    }
    let g_val = g_num / den.trace;

    let cond: Vec<Result<f64>> = par::map(SCALING_PANEL.len(), |k| {
        let c = condition_at(&conditioned_problem(x, &[et], &[se * SCALING_PANEL[k]])?, &p)?;
        Ok(c.det * c.trace / dens)
    });
    let cond: Vec<f64> = cond.into_iter().collect::<Result<_>>()?;
    let mut gap: f64 = 0.0;
    for (c, &yk) in cond.iter().zip(&SCALING_PANEL) {
        gap = gap.max((c - normal_cdf(yk / libm::sqrt(2.0 * t))).abs());
    }
    let fitted = fit_variance(&cond, t);
    Ok(ScalingDiagnostics {
        epsilon,
        g_val,
        h_val,
        gaussian_gap: gap,
        fitted_variance: fitted,
    })
}

fn normal_cdf(z: f64) -> f64 {
    0.5 * libm::erfc(-z / core::f64::consts::SQRT_2)
}

/// Golden-section least squares for `D` in `Φ(y / √(D t))`.
fn fit_variance(cond: &[f64], t: f64) -> f64 {
    let loss = |d: f64| -> f64 {
        cond.iter()
            .zip(&SCALING_PANEL)
            .map(|(c, &y)| {
                let e = c - normal_cdf(y / libm::sqrt(d * t));
                e * e
            })
            .sum()
    };
    let (mut a, mut b) = (0.05f64, 20.0f64);
    let r = 0.5 * (libm::sqrt(5.0) - 1.0);
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    for _ in 0..80 {
        if loss(c) < loss(d) {
            b = d;
        } else {
            a = c;
        }
        c = b - r * (b - a);
        d = a + r * (b - a);
    }
    0.5 * (a + b)
}
