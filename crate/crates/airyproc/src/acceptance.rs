//! The ten acceptance criteria, each a self-contained check that reports
//! what it measured.
//!
//! Thresholds and panels are fixed here; only resolution, seed and Monte
//! Carlo sizes come from [`SuiteConfig`]. A criterion also fails when it
//! overruns its time budget.

use std::fmt;
use std::time::{Duration, Instant};

use airyproc_core::airy1::{self, Barrier, FddQuery};
use airyproc_core::fredholm::{det_id_minus, discretize, resolve};
use airyproc_core::kernels::{self, heat_value, BarrierSegment, ConjugationWeight, DecayClass, KernelSpec};
use airyproc_core::quadrature::{composite, gauss_legendre};
use airyproc_core::{airy2, GridParams};

use crate::oracles::{bridge_survival_mc, empirical_cdf, heat_evolve, tw_sample, McConfig};
use crate::Error;

pub const DEFAULT_SEED: u64 = 0x5eed_a1ce;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SuiteConfig {
    pub params: GridParams,
    pub seed: u64,
    pub tw_samples: usize,
    pub tw_dim: usize,
    pub bridge_samples: usize,
    pub bridge_steps: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            params: GridParams::default(),
            seed: DEFAULT_SEED,
            tw_samples: 100_000,
            tw_dim: 400,
            bridge_samples: 100_000,
            bridge_steps: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub id: u32,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "criterion {:>2} {} {}: {} [{:.1} s of {:.0} s]",
            self.id,
            if self.passed { "PASS" } else { "FAIL" },
            self.name,
            self.detail,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs_f64()
        )
    }
}

pub const ALL: [u32; 10] = [1, 2, 3, 4, 5, 6, 7, 8, 9, 10];

/// Run one criterion. Numeric errors inside a check count as failures.
pub fn run(id: u32, cfg: &SuiteConfig) -> Result<Outcome, Error> {
    let (name, budget, check): (&'static str, u64, fn(&SuiteConfig) -> Result<(bool, String), Error>) = match id {
        1 => ("Airy1 formula equivalence", 60, formula_equivalence),
        2 => ("Airy2 formula equivalence", 120, airy2_equivalence),
        3 => ("marginals vs tridiagonal ensembles", 300, marginal_oracles),
        4 => ("heat semigroup identities", 10, semigroup_identities),
        5 => ("chain to continuum convergence", 300, chain_convergence),
        6 => ("bridge crossing law", 120, bridge_crossing_law),
        7 => ("boundedness of hitting probabilities", 60, boundedness),
        8 => ("local Brownian convergence", 300, local_brownian),
        9 => ("increment scaling", 300, increment_scaling),
        10 => ("engine unit floor", 5, engine_floor),
        _ => return Err(Error::Usage(format!("no acceptance criterion {id}"))),
    };
    let start = Instant::now();
    let (ok, detail) = match check(cfg) {
        Ok(r) => r,
        Err(e) => (false, format!("error: {e}")),
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let in_time = elapsed <= budget;
    Ok(Outcome {
        id,
        name,
        passed: ok && in_time,
        detail: if in_time { detail } else { format!("{detail}; over time budget") },
        elapsed,
        budget,
    })
}

fn q(times: &[f64], levels: &[f64]) -> FddQuery {
    FddQuery::new(times.to_vec(), levels.to_vec()).expect("panel queries are valid")
}

fn formula_equivalence(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let p = cfg.params.without_error();
    let panel = [
        q(&[0.0], &[0.0]),
        q(&[0.5], &[-1.5]),
        q(&[1.3], &[1.2]),
        q(&[0.0, 1.0], &[0.0, 0.0]),
        q(&[0.0, 0.25], &[-1.0, 0.5]),
        q(&[0.3, 2.0], &[1.0, -0.5]),
        q(&[0.0, 0.5], &[-2.0, 2.0]),
        q(&[1.0, 1.6], &[0.8, 0.4]),
        q(&[0.0, 1.5], &[-1.2, -0.7]),
        q(&[0.0, 0.7, 2.0], &[0.5, -0.5, 1.0]),
        q(&[0.2, 0.6, 1.0], &[0.0, 0.0, 0.0]),
        q(&[0.0, 1.0, 1.5], &[-1.0, 1.5, -0.3]),
    ];
    let mut worst: f64 = 0.0;
    for query in &panel {
        let a = airy1::fdd_path_integral(query, &p)?.value;
        let b = airy1::fdd_extended(query, &p)?.value;
        worst = worst.max((a - b).abs());
    }
    Ok((worst < 1e-6, format!("max |path - extended| = {worst:.2e} over {} queries", panel.len())))
}

fn airy2_equivalence(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let p = cfg.params.without_error();
    let panel = [
        q(&[0.0], &[0.0]),
        q(&[0.0], &[-2.5]),
        q(&[1.0], &[1.5]),
        q(&[0.0, 1.0], &[0.0, 0.0]),
        q(&[0.0, 0.3], &[-1.0, 0.5]),
        q(&[0.0, 2.0], &[1.0, -1.0]),
        q(&[0.5, 0.8], &[-2.0, -1.5]),
    ];
    let mut worst: f64 = 0.0;
    for query in &panel {
        let a = airy2::fdd_grouped_airy2(query, &p)?.value;
        let b = airy2::fdd_extended_airy2(query, &p)?.value;
        worst = worst.max((a - b).abs());
    }
    Ok((worst < 1e-6, format!("max |grouped - extended| = {worst:.2e} over {} queries", panel.len())))
}

fn marginal_oracles(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let p = cfg.params.without_error();
    let xs = [-1.0, -0.5, 0.0, 0.5, 1.0];
    let mc = McConfig::new(cfg.tw_samples, 1, cfg.seed);
    let goe = tw_sample(1, cfg.tw_dim, &mc)?;
    let gue = tw_sample(2, cfg.tw_dim, &McConfig { seed: cfg.seed ^ 0x9e37_79b9, ..mc })?;
    let mut ok = true;
    let mut worst = (0.0f64, 0.0f64);
    let mut report = Vec::new();
    for &x in &xs {
        let e1 = empirical_cdf(&goe, 2.0 * x);
        let f1 = airy1::marginal_cdf(x, &p)?.value;
        let e2 = empirical_cdf(&gue, x);
        let f2 = airy2::marginal_cdf_gue(x, &p)?.value;
        let z1 = (e1.estimate - f1).abs() / e1.stderr;
        let z2 = (e2.estimate - f2).abs() / e2.stderr;
        ok &= z1 <= 3.0 && z2 <= 3.0;
        worst = (worst.0.max(z1), worst.1.max(z2));
        report.push(format!("x={x}: b1 {z1:.1}s b2 {z2:.1}s"));
    }
    Ok((
        ok,
        format!(
            "max deviation beta=1 {:.2} sigma, beta=2 {:.2} sigma ({})",
            worst.0,
            worst.1,
            report.join(", ")
        ),
    ))
}

fn semigroup_identities(_cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let edges: Vec<f64> = (0..=80).map(|k| -25.0 + 0.5 * k as f64).collect();
    let grid = composite(&edges, 16)?;
    let inside: Vec<usize> = (0..grid.m()).filter(|&i| grid.nodes[i].abs() <= 5.0).collect();
    let sup = |f: &dyn Fn(f64) -> f64, s: f64, g: &dyn Fn(f64) -> f64| -> Result<f64, Error> {
        let v: Vec<f64> = grid.nodes.iter().map(|&x| f(x)).collect();
        let out = heat_evolve(&v, s, &grid)?;
        Ok(inside.iter().map(|&i| (out[i] - g(grid.nodes[i])).abs()).fold(0.0, f64::max))
    };
    let mut worst: f64 = 0.0;
    for (t, s) in [(1.0, 0.5), (0.5, 0.25)] {
        for y in [0.0, 0.7] {
            let e = sup(&kernels::phi(t, y), s, &kernels::phi(t - s, y))?;
            worst = worst.max(e);
        }
    }
    // e^{sΔ} e^{tΔ} B₀ = e^{(s+t)Δ} B₀, where e^{tΔ}B₀ = φ_{−t}
    let (t, s) = (0.5, 0.5);
    let mut comp: f64 = 0.0;
    for y in [0.0, 0.7] {
        comp = comp.max(sup(&kernels::phi(-t, y), s, &kernels::phi(-(t + s), y))?);
    }
    Ok((
        worst < 1e-6 && comp < 1e-6,
        format!("sup error {worst:.2e} (phi), {comp:.2e} (composition) on [-5, 5]"),
    ))
}

fn chain_convergence(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let b = Barrier::constant(0.0, 1.0, 1.0)?;
    let cont = airy1::hitting_continuum(&b, &cfg.params)?.value;
    let p = cfg.params.without_error();
    let mut gaps = Vec::new();
    for k in 2..=8 {
        let v = airy1::hitting_discrete_chain(&b, 1 << k, &p)?.value;
        gaps.push((v - cont).abs());
    }
    let decreasing = gaps.windows(2).all(|w| w[1] < w[0]);
    let last = gaps[gaps.len() - 1];
    let list: Vec<String> = gaps.iter().map(|g| format!("{g:.2e}")).collect();
    Ok((
        decreasing && last < 1e-4,
        format!(
            "gaps n=4..256: [{}]; strictly decreasing: {decreasing}; gap at 256 = {last:.2e} (needs < 1e-4)",
            list.join(", ")
        ),
    ))
}

fn bridge_crossing_law(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    // (x, y, g0, g1, duration)
    let configs = [
        (-1.0, -1.0, 0.0, 0.0, 1.0),
        (-0.2, -0.5, 0.0, 0.0, 1.0),
        (-2.0, -0.1, 0.0, 0.0, 0.5),
        (-1.0, 0.0, 0.0, 1.0, 1.0),
        (-0.5, 0.3, 0.0, 1.0, 2.0),
        (0.0, 0.0, 1.5, 1.5, 1.0),
        (1.0, -1.0, 1.5, 1.5, 0.3),
        (0.0, -1.0, 1.0, -0.5, 1.0),
        (0.5, -2.0, 1.0, -0.5, 2.0),
    ];
    let mut worst: f64 = 0.0;
    for (k, &(x, y, g0, g1, s)) in configs.iter().enumerate() {
        let seg = BarrierSegment::new(0.0, s, g0, g1)?;
        let exact = kernels::killed_segment(seg)?.eval(x, y) / heat_value(s, x, y);
        let mc = bridge_survival_mc(
            seg,
            x,
            y,
            &McConfig::new(cfg.bridge_samples, cfg.bridge_steps, cfg.seed.wrapping_add(k as u64)),
        )?;
        worst = worst.max((mc.estimate - exact).abs() / mc.stderr.max(1e-300));
    }
    Ok((
        worst <= 3.0,
        format!("max deviation {worst:.2} sigma over {} segments", configs.len()),
    ))
}

fn boundedness(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let mut vals = Vec::new();
    for m in [1.0, 2.0, 3.0, 4.0] {
        let b = Barrier::constant(-0.5, 0.5, m)?;
        vals.push(airy1::hitting_continuum(&b, &cfg.params)?.value);
    }
    let increasing = vals.windows(2).all(|w| w[1] > w[0]);
    let top = vals[3];
    Ok((
        increasing && top > 0.999,
        format!(
            "M=1..4: [{:.6}, {:.6}, {:.6}, {:.8}]; increasing: {increasing}",
            vals[0], vals[1], vals[2], vals[3]
        ),
    ))
}

fn local_brownian(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let p = cfg.params.without_error();
    let (x, t, y) = (0.0, 1.0, 0.5);
    let mut gs = Vec::new();
    let mut hs = Vec::new();
    for eps in [0.2, 0.1, 0.05, 0.02] {
        let d = airy1::local_scaling_diagnostics(x, t, y, eps, &p)?;
        gs.push((d.g_val - 1.0).abs());
        hs.push((d.h_val - 1.0).abs());
    }
    let dec = |v: &[f64]| v.windows(2).all(|w| w[1] < w[0]);
    let fine = airy1::local_scaling_diagnostics(x, t, y, 0.01, &p)?;
    let ok = dec(&gs) && dec(&hs) && fine.gaussian_gap < 0.05;
    Ok((
        ok,
        format!(
            "|g-1| [{:.3}, {:.3}, {:.3}, {:.3}], |h-1| [{:.3}, {:.3}, {:.3}, {:.3}]; gap at eps=0.01: {:.4}; fitted variance constant {:.3}",
            gs[0], gs[1], gs[2], gs[3], hs[0], hs[1], hs[2], hs[3], fine.gaussian_gap, fine.fitted_variance
        ),
    ))
}

/// Lags of the slope fit: geometric from 0.02 to 0.32.
pub const SCALING_LAGS: [f64; 5] = [0.02, 0.04, 0.08, 0.16, 0.32];

/// Least-squares slope of `ln y` against `ln x`.
pub fn loglog_slope(x: &[f64], y: &[f64]) -> f64 {
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx) * (a - mx)).sum();
    sxy / sxx
}

fn increment_scaling(cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let p = cfg.params.without_error();
    let mut m2 = Vec::new();
    let mut ratio = 0.0;
    for (k, &t) in SCALING_LAGS.iter().enumerate() {
        let m = airy1::increment_moments(t, &p)?;
        if k == 0 {
            ratio = m.fourth / (m.second * m.second);
        }
        m2.push(m.second);
    }
    let slope = loglog_slope(&SCALING_LAGS, &m2);
    Ok((
        (0.9..=1.1).contains(&slope),
        format!(
            "slope {slope:.4} over t = 0.02..0.32 (doubling); m2/t from {:.4} to {:.4}; m4/m2^2 at t=0.02: {ratio:.4}",
            m2[0] / SCALING_LAGS[0],
            m2[4] / SCALING_LAGS[4]
        ),
    ))
}

fn engine_floor(_cfg: &SuiteConfig) -> Result<(bool, String), Error> {
    let grid = gauss_legendre(120, -10.0, 10.0)?;

    // rank one: det(I − f⊗g) = 1 − ∫ f g
    let rank_one = KernelSpec::from_fn(|x, y| (-x * x).exp() * (-(y - 0.5) * (y - 0.5)).exp(), DecayClass::Gaussian, false);
    let d1 = det_id_minus(&discretize(&rank_one, &grid)?)?.value;
    let exact = 1.0 - (std::f64::consts::PI / 2.0).sqrt() * (-0.125f64).exp();
    let e1 = (d1 - exact).abs();

    let zero = KernelSpec::from_fn(|_, _| 0.0, DecayClass::Compact, true);
    let e0 = (det_id_minus(&discretize(&zero, &grid)?)?.value - 1.0).abs();

    // resolvent residual for B₀ on (0, 10)
    let half = gauss_legendre(80, 0.0, 10.0)?;
    let op = discretize(&kernels::b0(), &half)?;
    let rhs: Vec<f64> = half.nodes.iter().map(|x| (-x).exp()).collect();
    let v = resolve(&op, &rhs)?;
    let mv = op.matrix.mul_vec(&v);
    let res = v
        .iter()
        .zip(&mv)
        .zip(&rhs)
        .map(|((a, b), c)| (a - b - c).abs())
        .fold(0.0, f64::max);

    // similarity invariance under an exponential conjugation
    let k = kernels::exp_neg_laplace_b0(0.5)?;
    let g2 = gauss_legendre(120, -2.0, 10.0)?;
    let plain = det_id_minus(&discretize(&k, &g2)?)?.value;
    let conj = det_id_minus(&discretize(&kernels::conjugate(&k, ConjugationWeight::exponential(1.0)), &g2)?)?.value;
    let ec = (plain - conj).abs();

    Ok((
        e1 < 1e-12 && e0 == 0.0 && res < 1e-9 && ec < 1e-10,
        format!("rank-one {e1:.1e}, zero kernel {e0:.1e}, resolvent residual {res:.1e}, conjugation {ec:.1e}"),
    ))
}
