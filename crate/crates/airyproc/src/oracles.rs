//! Brute-force and Monte Carlo references that share no code path with the
//! determinant engine.
//!
//! Sampling is split into fixed-size chunks; chunk `c` draws from a ChaCha8
//! stream `c` keyed by the configured seed, so estimates are bit-identical
//! for any thread count.

use airyproc_core::kernels::{heat_value, BarrierSegment};
use airyproc_core::QuadGrid;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use rayon::prelude::*;

use crate::Error;

const CHUNK: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub samples: usize,
    /// Time steps of a simulated bridge.
    pub steps: usize,
    pub seed: u64,
}

impl McConfig {
    pub fn new(samples: usize, steps: usize, seed: u64) -> Self {
        McConfig { samples, steps, seed }
    }

    fn check(&self) -> Result<(), Error> {
        if self.samples < 2 || self.steps == 0 {
            return Err(Error::Usage("Monte Carlo needs samples >= 2 and steps >= 1".into()));
        }
        Ok(())
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    pub estimate: f64,
    pub stderr: f64,
}

impl McEstimate {
    /// `|estimate − value| ≤ k·stderr`.
    pub fn within(&self, value: f64, k: f64) -> bool {
        (self.estimate - value).abs() <= k * self.stderr
    }
}

fn chunk_rng(seed: u64, chunk: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(chunk as u64);
    rng
}

/// Mean and standard error of `f(rng)` over `cfg.samples` draws.
fn mc_mean<F>(cfg: &McConfig, f: F) -> McEstimate
where
    F: Fn(&mut ChaCha8Rng) -> f64 + Sync,
{
    let chunks = cfg.samples.div_ceil(CHUNK);
    let sums: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let (mut s, mut s2) = (0.0, 0.0);
            for _ in 0..n {
                let v = f(&mut rng);
                s += v;
                s2 += v * v;
            }
            (s, s2)
        })
        .collect();
    let n = cfg.samples as f64;
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    McEstimate {
        estimate: mean,
        stderr: (var / n).sqrt(),
    }
}

/// Probability that a diffusion-2 Brownian bridge from `x` to `y` over the
/// segment stays strictly below its line.
///
/// The bridge is sampled on `cfg.steps` equal sub-steps; each sample scores
/// the product of the exact survival probabilities of the sub-bridges
/// between consecutive points, so the only error is statistical.
pub fn bridge_survival_mc(seg: BarrierSegment, x: f64, y: f64, cfg: &McConfig) -> Result<McEstimate, Error> {
    cfg.check()?;
    seg.validate().map_err(Error::Core)?;
    if !x.is_finite() || !y.is_finite() {
        return Err(Error::Usage("bridge endpoints must be finite".into()));
    }
    if x >= seg.g0 || y >= seg.g1 {
        return Ok(McEstimate {
            estimate: 0.0,
            stderr: 0.0,
        });
    }
    let s = seg.duration();
    let n = cfg.steps;
    let h = s / n as f64;
    let line = move |k: usize| seg.g0 + (seg.g1 - seg.g0) * k as f64 / n as f64;
    Ok(mc_mean(cfg, |rng| {
        let mut b = x;
        let mut w = 1.0;
        for k in 0..n {
            let rest = s - k as f64 * h;
            let next = if k + 1 == n {
                y
            } else {
                let mean = b + (y - b) * h / rest;
                let var = 2.0 * h * (rest - h) / rest;
                let z: f64 = rng.sample(StandardNormal);
                mean + var.sqrt() * z
            };
            let (a0, a1) = (line(k) - b, line(k + 1) - next);
            if a0 <= 0.0 || a1 <= 0.0 {
                return 0.0;
            }
            w *= -(-a0 * a1 / h).exp_m1();
            b = next;
        }
        w
    }))
}

/// Probability that the Gaussian bridge from `x` to `y` over time `s`,
/// observed at its `n` jump times `k·s/n`, is at or above 0 at one of them.
/// Jumps have variance `2s/n` (diffusion coefficient 2).
pub fn rw_bridge_crossing_mc(n: usize, x: f64, y: f64, s: f64, cfg: &McConfig) -> Result<McEstimate, Error> {
    if n < 2 {
        return Err(Error::Usage("random-walk bridge needs n >= 2".into()));
    }
    if !(s > 0.0) || !x.is_finite() || !y.is_finite() {
        return Err(Error::Usage("need s > 0 and finite endpoints".into()));
    }
    let cfg = McConfig { steps: n, ..*cfg };
    cfg.check()?;
    if x >= 0.0 || y >= 0.0 {
        return Ok(McEstimate {
            estimate: 1.0,
            stderr: 0.0,
        });
    }
    let h = s / n as f64;
    Ok(mc_mean(&cfg, |rng| {
        let mut b = x;
        for k in 0..n - 1 {
            let rest = s - k as f64 * h;
            let z: f64 = rng.sample(StandardNormal);
            b = b + (y - b) * h / rest + (2.0 * h * (rest - h) / rest).sqrt() * z;
            if b >= 0.0 {
                return 1.0;
            }
        }
        0.0
    }))
}

/// `(e^{sΔ} f)(xᵢ) = Σⱼ wⱼ h_s(xᵢ, xⱼ) f(xⱼ)` on the grid.
pub fn heat_evolve(f: &[f64], s: f64, grid: &QuadGrid) -> Result<Vec<f64>, Error> {
    if !(s > 0.0) || !s.is_finite() {
        return Err(Error::Usage("heat_evolve needs s > 0".into()));
    }
    if f.len() != grid.m() {
        return Err(Error::Usage("sample vector and grid differ in length".into()));
    }
    Ok(grid
        .nodes
        .par_iter()
        .map(|&x| {
            grid.nodes
                .iter()
                .zip(&grid.weights)
                .zip(f)
                .map(|((&y, &w), &v)| w * heat_value(s, x, y) * v)
                .sum()
        })
        .collect())
}

/// Scaled largest eigenvalues `(λ_max − 2√n)·n^{1/6}` of the tridiagonal
/// β-Hermite ensemble `(1/√β)·tridiag(χ_{β(n−k)}; N(0, 2); χ_{β(n−k)})`.
pub fn tw_sample(beta: u32, n_dim: usize, cfg: &McConfig) -> Result<Vec<f64>, Error> {
    if beta != 1 && beta != 2 {
        return Err(Error::Usage("beta must be 1 or 2".into()));
    }
    if n_dim < 100 {
        return Err(Error::Usage("n_dim must be at least 100".into()));
    }
    cfg.check()?;
    let b = beta as f64;
    let chis: Vec<ChiSquared<f64>> = (1..n_dim)
        .map(|k| ChiSquared::new(b * (n_dim - k) as f64).expect("positive degrees of freedom"))
        .collect();
    let chunks = cfg.samples.div_ceil(CHUNK);
    let parts: Vec<Vec<f64>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = chunk_rng(cfg.seed, c);
            let n = CHUNK.min(cfg.samples - c * CHUNK);
            let mut diag = vec![0.0; n_dim];
            let mut off2 = vec![0.0; n_dim - 1];
            let mut out = Vec::with_capacity(n);
            let scale = (n_dim as f64).powf(1.0 / 6.0);
            let edge = 2.0 * (n_dim as f64).sqrt();
            for _ in 0..n {
                for d in diag.iter_mut() {
                    let z: f64 = rng.sample(StandardNormal);
                    *d = z * (2.0 / b).sqrt();
                }
                for (o, chi) in off2.iter_mut().zip(&chis) {
                    *o = chi.sample(&mut rng) / b;
                }
                out.push((largest_eigenvalue(&diag, &off2) - edge) * scale);
            }
            out
        })
        .collect();
    Ok(parts.concat())
}

/// Number of eigenvalues below `x` of the symmetric tridiagonal matrix with
/// diagonal `d` and squared off-diagonal `e2` (Sturm sequence).
fn count_below(d: &[f64], e2: &[f64], x: f64) -> usize {
    let mut q = d[0] - x;
    let mut count = usize::from(q < 0.0);
    for i in 1..d.len() {
        let prev = if q == 0.0 { f64::EPSILON * (1.0 + x.abs()) } else { q };
        q = d[i] - x - e2[i - 1] / prev;
        count += usize::from(q < 0.0);
    }
    count
}

fn largest_eigenvalue(d: &[f64], e2: &[f64]) -> f64 {
    let n = d.len();
    let e: Vec<f64> = e2.iter().map(|v| v.sqrt()).collect();
    let mut hi = f64::NEG_INFINITY;
    let mut lo = f64::INFINITY;
    for i in 0..n {
        let r = if i > 0 { e[i - 1] } else { 0.0 } + if i + 1 < n { e[i] } else { 0.0 };
        hi = hi.max(d[i] + r);
        lo = lo.min(d[i] - r);
    }
    while hi - lo > 1e-12 * (1.0 + hi.abs()) {
        let mid = 0.5 * (lo + hi);
        if count_below(d, e2, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Empirical CDF at `x` with its binomial standard error.
pub fn empirical_cdf(samples: &[f64], x: f64) -> McEstimate {
    let n = samples.len() as f64;
    let p = samples.iter().filter(|&&v| v <= x).count() as f64 / n;
    McEstimate {
        estimate: p,
        stderr: (p * (1.0 - p) / n).sqrt(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sturm_count_on_a_known_matrix() {
        // tridiag(1; 2; 1) of size 3 has eigenvalues 2 − √2, 2, 2 + √2
        let d = [2.0, 2.0, 2.0];
        let e2 = [1.0, 1.0];
        assert_eq!(count_below(&d, &e2, 2.0 - 1e-9), 1);
        assert!((largest_eigenvalue(&d, &e2) - (2.0 + 2f64.sqrt())).abs() < 1e-10);
    }

    #[test]
    fn chunking_does_not_depend_on_thread_count() {
        let cfg = McConfig::new(10_000, 1, 7);
        let a = mc_mean(&cfg, |r| r.random::<f64>());
        let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
        let b = pool.install(|| mc_mean(&cfg, |r| r.random::<f64>()));
        assert_eq!(a, b);
    }
}
