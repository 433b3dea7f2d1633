//! Every kernel of the Airy₁/Airy₂ formulas as an evaluable two-variable
//! function.
//!
//! Closed-form kernels (`B₀`, heat, `e^{−tΔ}B₀`, the extended Airy₁ kernel,
//! the killed segment propagator, `e^{−tH}` in closed form) are pointwise
//! closures. Kernels defined by an integral over the spectral variable λ
//! (`K_Ai`, `e^{τH}K_Ai`, the extended Airy₂ kernel, `e^{−tH}` by
//! quadrature) keep that structure so that a whole matrix of values is one
//! product of two Airy tables instead of one quadrature per entry.
//!
//! Factors like `e^{τ(x+y)}` are never formed on their own: they are folded
//! into the exponent of a scaled Airy value.

use alloc::sync::Arc;
use alloc::vec::Vec;
use core::f64::consts::PI;
use core::fmt;

use crate::error::{invalid, Result};
use crate::fredholm::Matrix;
use crate::par;
use crate::quadrature::{GridParams, GridPlan};
use crate::specfun::{ai, ai_exp};

/// Tail behaviour of a kernel away from the diagonal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecayClass {
    Gaussian,
    Airy,
    Compact,
}

/// One linear piece of a barrier: height `g0` at time `t0`, `g1` at `t1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarrierSegment {
    pub t0: f64,
    pub t1: f64,
    pub g0: f64,
    pub g1: f64,
}

impl BarrierSegment {
    pub fn new(t0: f64, t1: f64, g0: f64, g1: f64) -> Result<Self> {
        let s = BarrierSegment { t0, t1, g0, g1 };
        s.validate()?;
        Ok(s)
    }

    pub fn duration(&self) -> f64 {
        self.t1 - self.t0
    }

    pub fn validate(&self) -> Result<()> {
        let finite = [self.t0, self.t1, self.g0, self.g1].iter().all(|v| v.is_finite());
        if !finite || !(self.t1 > self.t0) {
            return Err(invalid("barrier segment needs finite values and t1 > t0"));
        }
        Ok(())
    }
}

/// Similarity weight `U`: `K ↦ U K U⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConjugationWeight {
    /// `U f(x) = e^{−rate·x} f(x)`.
    Exponential { rate: f64 },
    /// `U f(x) = (1 + x²)^{−2i} f(x)`.
    Polynomial { i: u32 },
}

impl ConjugationWeight {
    pub fn exponential(rate: f64) -> Self {
        ConjugationWeight::Exponential { rate }
    }

    /// `ln U(x)`.
    pub fn log_factor(&self, x: f64) -> f64 {
        match *self {
            ConjugationWeight::Exponential { rate } => -rate * x,
            ConjugationWeight::Polynomial { i } => -2.0 * i as f64 * libm::log1p(x * x),
        }
    }
}

type PointFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// `sign·(∫ e^{−rate·λ} Ai(x+λ) Ai(y+λ) dλ − e^{−sH}(x,y))` over `λ ≥ 0`
/// or over the whole line; the subtracted closed form is optional.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LambdaKernel {
    pub rate: f64,
    pub full_line: bool,
    pub minus_airy_heat: Option<f64>,
    pub sign: f64,
}

#[derive(Clone)]
enum Repr {
    Point(Arc<PointFn>),
    Lambda(LambdaKernel),
}

/// A real kernel `K(x, y)` with decay metadata.
#[derive(Clone)]
pub struct KernelSpec {
    repr: Repr,
    pub decay_class: DecayClass,
    pub symmetric: bool,
    conj: Vec<ConjugationWeight>,
}

impl fmt::Debug for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kind = match &self.repr {
            Repr::Point(_) => "pointwise",
            Repr::Lambda(_) => "lambda-integral",
        };
        f.debug_struct("KernelSpec")
            .field("kind", &kind)
            .field("decay_class", &self.decay_class)
            .field("symmetric", &self.symmetric)
            .field("conjugation", &self.conj)
            .finish()
    }
}

impl KernelSpec {
    /// Wrap an arbitrary closure.
    pub fn from_fn<F>(f: F, decay_class: DecayClass, symmetric: bool) -> Self
    where
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        KernelSpec {
            repr: Repr::Point(Arc::new(f)),
            decay_class,
            symmetric,
            conj: Vec::new(),
        }
    }

    fn lambda(l: LambdaKernel, symmetric: bool) -> Self {
        KernelSpec {
            repr: Repr::Lambda(l),
            decay_class: DecayClass::Airy,
            symmetric,
            conj: Vec::new(),
        }
    }

    fn log_conj(&self, x: f64, y: f64) -> f64 {
        self.conj
            .iter()
            .map(|w| w.log_factor(x) - w.log_factor(y))
            .sum()
    }

    /// `K(x, y)`. λ-integral kernels use a fine dedicated quadrature.
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let base = match &self.repr {
            Repr::Point(f) => f(x, y),
            Repr::Lambda(l) => {
                let p = GridParams::with_m(160);
                lambda_matrix(l, &[x], &[y], &p).get(0, 0)
            }
        };
        if self.conj.is_empty() {
            base
        } else {
            base * libm::exp(self.log_conj(x, y))
        }
    }

    /// Raw values `K(xᵢ, yⱼ)`; `params` fixes the λ-resolution of integral
    /// kernels.
    pub fn matrix(&self, xs: &[f64], ys: &[f64], params: &GridParams) -> Matrix {
        let mut m = match &self.repr {
            Repr::Point(f) => {
                let mut m = Matrix::zeros(xs.len(), ys.len());
                par::for_each_row(m.as_mut_slice(), ys.len(), |i, row| {
                    for (j, v) in row.iter_mut().enumerate() {
                        *v = f(xs[i], ys[j]);
                    }
                });
                m
            }
            Repr::Lambda(l) => lambda_matrix(l, xs, ys, params),
        };
        if !self.conj.is_empty() {
            for i in 0..xs.len() {
                for j in 0..ys.len() {
                    let c = libm::exp(self.log_conj(xs[i], ys[j]));
                    m.set(i, j, m.get(i, j) * c);
                }
            }
        }
        m
    }
}

/// Heat kernel with diffusion coefficient 2.
#[inline]
pub fn heat_value(t: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    libm::exp(-d * d / (4.0 * t)) / libm::sqrt(4.0 * PI * t)
}

/// `e^{−τΔ}B₀(x, y) = e^{−2τ³/3 − (x+y)τ} Ai(x + y + τ²)` for any real `τ`.
#[inline]
pub fn e_tau_value(tau: f64, x: f64, y: f64) -> f64 {
    let s = x + y;
    ai_exp(s + tau * tau, -2.0 / 3.0 * tau * tau * tau - s * tau)
}

/// Closed form of `e^{−tH}(x, y)`, `H = −∂² + x`.
#[inline]
pub fn airy_heat_value(t: f64, x: f64, y: f64) -> f64 {
    let d = x - y;
    libm::exp(-d * d / (4.0 * t) - 0.5 * t * (x + y) + t * t * t / 12.0) / libm::sqrt(4.0 * PI * t)
}

/// Probability that a diffusion-2 Brownian bridge from `x` (time 0) to `y`
/// (time `s`) touches the line from `g0` to `g1`.
#[inline]
pub fn crossing_probability(x: f64, y: f64, g0: f64, g1: f64, s: f64) -> f64 {
    if x >= g0 || y >= g1 {
        1.0
    } else {
        libm::exp(-(g0 - x) * (g1 - y) / s)
    }
}

/// `B₀(x, y) = Ai(x + y)`.
pub fn b0() -> KernelSpec {
    KernelSpec::from_fn(|x, y| ai(x + y), DecayClass::Airy, true)
}

/// `(4πt)^{−1/2} e^{−(x−y)²/4t}`.
pub fn heat(t: f64) -> Result<KernelSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("heat kernel needs t > 0"));
    }
    Ok(KernelSpec::from_fn(
        move |x, y| heat_value(t, x, y),
        DecayClass::Gaussian,
        true,
    ))
}

/// `e^{−tΔ}B₀`, the closed form that makes the backward heat step on `B₀`
/// meaningful.
pub fn exp_neg_laplace_b0(t: f64) -> Result<KernelSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("exp_neg_laplace_b0 needs t > 0"));
    }
    Ok(KernelSpec::from_fn(
        move |x, y| e_tau_value(t, x, y),
        DecayClass::Airy,
        true,
    ))
}

/// `φ_{t,y}(x) = e^{−2t³/3 − (x+y)t} Ai(x + y + t²)`.
pub fn phi(t: f64, y: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
    move |x| e_tau_value(t, x, y)
}

/// Extended Airy₁ kernel between times `t` and `tp`.
pub fn k1_ext(t: f64, tp: f64) -> KernelSpec {
    let dt = tp - t;
    KernelSpec::from_fn(
        move |x, xp| {
            let h = if dt > 0.0 { heat_value(dt, x, xp) } else { 0.0 };
            e_tau_value(-dt, x, xp) - h
        },
        DecayClass::Airy,
        dt == 0.0,
    )
}

/// `K_Ai(x, y) = ∫₀^∞ Ai(x+λ) Ai(y+λ) dλ`.
pub fn k_airy() -> KernelSpec {
    exp_airy_ham_kai(0.0)
}

/// `e^{τH}K_Ai(x, y) = ∫₀^∞ e^{−τλ} Ai(x+λ) Ai(y+λ) dλ` (any real `τ`).
pub fn exp_airy_ham_kai(tau: f64) -> KernelSpec {
    KernelSpec::lambda(
        LambdaKernel {
            rate: tau,
            full_line: false,
            minus_airy_heat: None,
            sign: 1.0,
        },
        true,
    )
}

/// Extended Airy₂ kernel between times `t` and `tp`.
///
/// For `t ≥ tp` this is the half-line integral with weight `e^{−λ(t−tp)}`.
/// For `t < tp` the integral over `λ < 0` is rewritten as the half-line
/// integral with the growing weight minus the closed form of
/// `e^{−(tp−t)H}`, which avoids integrating an oscillatory integrand over
/// an unbounded range.
pub fn k2_ext(t: f64, tp: f64) -> KernelSpec {
    let d = t - tp;
    if d >= 0.0 {
        exp_airy_ham_kai(d)
    } else {
        KernelSpec::lambda(
            LambdaKernel {
                rate: d,
                full_line: false,
                minus_airy_heat: Some(-d),
                sign: 1.0,
            },
            false,
        )
    }
}

/// `e^{−tH}(x, y) = ∫ e^{λt} Ai(x+λ) Ai(y+λ) dλ` by λ-quadrature on
/// `[−(40/t + 40), Λ₊]`.
pub fn exp_neg_airy_ham(t: f64) -> Result<KernelSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("exp_neg_airy_ham needs t > 0"));
    }
    Ok(KernelSpec::lambda(
        LambdaKernel {
            rate: -t,
            full_line: true,
            minus_airy_heat: None,
            sign: 1.0,
        },
        true,
    ))
}

/// Closed form of `e^{−tH}`.
pub fn exp_neg_airy_ham_closed(t: f64) -> Result<KernelSpec> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(invalid("exp_neg_airy_ham_closed needs t > 0"));
    }
    Ok(KernelSpec::from_fn(
        move |x, y| airy_heat_value(t, x, y),
        DecayClass::Gaussian,
        true,
    ))
}

/// Heat propagator over one barrier segment, killed on or above the line
/// joining `(t0, g0)` and `(t1, g1)`.
pub fn killed_segment(seg: BarrierSegment) -> Result<KernelSpec> {
    seg.validate()?;
    let s = seg.duration();
    Ok(KernelSpec::from_fn(
        move |x, y| {
            if x >= seg.g0 || y >= seg.g1 {
                0.0
            } else {
                heat_value(s, x, y) * -libm::expm1(-(seg.g0 - x) * (seg.g1 - y) / s)
            }
        },
        DecayClass::Compact,
        seg.g0 == seg.g1,
    ))
}

/// `U K U⁻¹`.
pub fn conjugate(k: &KernelSpec, u: ConjugationWeight) -> KernelSpec {
    let mut out = k.clone();
    let trivial = matches!(u, ConjugationWeight::Exponential { rate } if rate == 0.0)
        || matches!(u, ConjugationWeight::Polynomial { i: 0 });
    if !trivial {
        out.conj.push(u);
        out.symmetric = false;
    }
    out
}

/// Upper λ cutoff: beyond it the integrand bound
/// `exp(−rate·λ − ⅔(x+λ)₊^{3/2} − ⅔(y+λ)₊^{3/2})` is below `e^{−40}` and
/// decreasing.
fn lambda_upper(rate: f64, x: f64, y: f64, start: f64) -> f64 {
    let log_bound = |l: f64| {
        let a = (x + l).max(0.0);
        let b = (y + l).max(0.0);
        -rate * l - 2.0 / 3.0 * (a * libm::sqrt(a) + b * libm::sqrt(b))
    };
    let mut l = start.max(-x.min(y));
    loop {
        let a = (x + l).max(0.0);
        let b = (y + l).max(0.0);
        let decreasing = libm::sqrt(a) + libm::sqrt(b) > -rate;
        if decreasing && log_bound(l) < -40.0 {
            return l;
        }
        l += 0.25;
    }
}

/// λ-quadrature plan: oscillation-aware panels, widths also bounded by the
/// exponential weight's scale.
fn lambda_plan(l: &LambdaKernel, lo: f64, hi: f64, min_arg: f64) -> GridPlan {
    let base = (4.0 / l.rate.abs().max(1e-12)).min(1.0);
    let mut plan = GridPlan::new(lo, hi, base).oscillation(min_arg);
    plan.osc_scale = 2.5;
    plan
}

fn lambda_matrix(l: &LambdaKernel, xs: &[f64], ys: &[f64], params: &GridParams) -> Matrix {
    let mut out = Matrix::zeros(xs.len(), ys.len());
    if xs.is_empty() || ys.is_empty() {
        return out;
    }
    let xmin = xs.iter().copied().fold(f64::INFINITY, f64::min);
    let ymin = ys.iter().copied().fold(f64::INFINITY, f64::min);
    let lo = if l.full_line {
        -(40.0 / (-l.rate).max(1e-12) + 40.0)
    } else {
        0.0
    };
    let hi = lambda_upper(l.rate, xmin, ymin, lo.max(0.0)).max(lo + 1.0);
    let q = params.panel_nodes().max(8);
    let grid = lambda_plan(l, lo, hi, xmin.min(ymin))
        .build(q)
        .expect("lambda plan is well formed");
    // half of the weight goes into each table so large e^{−rate·λ} never
    // appears on its own
    let table = |pts: &[f64]| {
        let n = grid.m();
        let mut t = Matrix::zeros(pts.len(), n);
        par::for_each_row(t.as_mut_slice(), n, |i, row| {
            for (k, v) in row.iter_mut().enumerate() {
                let lam = grid.nodes[k];
                let e = -0.5 * l.rate * lam + 0.5 * libm::log(grid.weights[k]);
                *v = ai_exp(pts[i] + lam, e);
            }
        });
        t
    };
    let a = table(xs);
    let b = table(ys);
    crate::fredholm::matmul_transpose_into(&a, &b, &mut out);
    if l.sign != 1.0 {
        for v in out.as_mut_slice() {
            *v *= l.sign;
        }
    }
    if let Some(s) = l.minus_airy_heat {
        for (i, &x) in xs.iter().enumerate() {
            for (j, &y) in ys.iter().enumerate() {
                let v = out.get(i, j) - l.sign * airy_heat_value(s, x, y);
                out.set(i, j, v);
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equal_time_reductions() {
        let k = k1_ext(0.3, 0.3);
        for &(x, y) in &[(0.0, 0.0), (1.0, -2.0), (-3.0, 0.5)] {
            assert!((k.eval(x, y) - ai(x + y)).abs() < 1e-15);
        }
    }

    #[test]
    fn killed_segment_boundary_and_domination() {
        let seg = BarrierSegment::new(0.0, 1.0, 0.5, 1.5).unwrap();
        let k = killed_segment(seg).unwrap();
        assert_eq!(k.eval(0.5, 0.0), 0.0);
        assert_eq!(k.eval(0.0, 1.5), 0.0);
        let v = k.eval(-0.3, 0.2);
        assert!(v > 0.0 && v < heat_value(1.0, -0.3, 0.2));
    }

    #[test]
    fn degenerate_segment_rejected() {
        assert!(BarrierSegment::new(1.0, 1.0, 0.0, 0.0).is_err());
        assert!(heat(0.0).is_err());
        assert!(exp_neg_laplace_b0(-1.0).is_err());
        assert!(exp_neg_airy_ham(0.0).is_err());
    }
}
