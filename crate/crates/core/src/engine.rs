//! Kernels of the path-integral determinants, assembled without the
//! cancellation in `B₀ − Λ·e^{−τΔ}B₀`.
//!
//! A path is a start level `g₀` and a list of steps. Step `j` has duration
//! `dtⱼ`, a start and end level, and either projects at its end time
//! (`X = p·1{w < g_end}`) or kills continuously below a straight barrier
//! (`X = p·(1 − c)` with `c` the bridge crossing probability). Writing
//! `Y = p − X` and telescoping the product of the `X`'s against the product
//! of the free propagators `p` gives
//!
//! ```text
//! K(u, v) = D(u, v)                                  for u ≥ g₀
//! K(u, v) = Σⱼ ∫∫ Aⱼ(u, z) Yⱼ(z, w) T_{τⱼ}(w, v)      for u < g₀
//! ```
//!
//! where `A₁ = δ`, `Aⱼ₊₁ = Aⱼ Xⱼ`, `τⱼ` is the elapsed time after step `j`
//! and `T_τ` is the tail operator: `e^{−τΔ}B₀` with `p` the heat kernel and
//! `D = B₀` for Airy₁, `e^{τH}K_Ai` with `p = e^{−dt·H}` and `D = K_Ai` for
//! Airy₂. Every term is a product of bounded, positive-time objects.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::fredholm::{matmul_transpose_into, DiscreteOperator, Matrix, OperatorFamily};
use crate::kernels::{airy_heat_value, crossing_probability, e_tau_value, heat_value};
use crate::par;
use crate::quadrature::{GridParams, GridPlan, QuadGrid};
use crate::specfun::{ai, ai_exp};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Flavor {
    Airy1,
    Airy2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum StepKind {
    Project,
    Bridge,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Step {
    pub dt: f64,
    pub g_start: f64,
    pub g_end: f64,
    pub kind: StepKind,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) struct PathProblem {
    pub flavor: Flavor,
    pub g0: f64,
    pub steps: Vec<Step>,
    /// Similarity rate as a multiple of the total time (Airy₁ only).
    pub conj_factor: f64,
}

/// Raw kernel values on `(V ∪ extra rows) × (V ∪ extra cols)`.
pub(crate) struct PathKernel {
    pub grid: QuadGrid,
    pub k: Matrix,
    pub rate: f64,
}

/// Exponent below which contributions are dropped.
const LOG_TINY: f64 = -38.0;

/// Panel width of intermediate grids in units of the step's spread.
const STEP_WIDTH: f64 = 2.0;

/// Widest spatial range the path kernel will discretize.
const MAX_RANGE: f64 = 100.0;

impl PathProblem {
    pub fn projections(flavor: Flavor, times: &[f64], levels: &[f64]) -> Result<Self> {
        if times.is_empty() || times.len() != levels.len() {
            return Err(invalid("times and levels must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::UnorderedTimes);
        }
        if levels.iter().chain(times).any(|v| v.is_nan()) {
            return Err(invalid("NaN in query"));
        }
        let steps = (1..times.len())
            .map(|i| Step {
                dt: times[i] - times[i - 1],
                g_start: levels[i - 1],
                g_end: levels[i],
                kind: StepKind::Project,
            })
            .collect();
        Ok(PathProblem {
            flavor,
            g0: levels[0],
            steps,
            conj_factor: 1.0,
        })
    }

    pub fn total_time(&self) -> f64 {
        self.steps.iter().map(|s| s.dt).sum()
    }

    fn finite_levels(&self) -> impl Iterator<Item = f64> + '_ {
        core::iter::once(self.g0)
            .chain(self.steps.iter().map(|s| s.g_end))
            .filter(|g| g.is_finite())
    }

    fn level_min(&self) -> f64 {
        self.finite_levels().fold(f64::INFINITY, f64::min)
    }

    fn level_max(&self) -> f64 {
        self.finite_levels().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn rate(&self) -> f64 {
        match self.flavor {
            Flavor::Airy1 => self.conj_factor * self.total_time(),
            Flavor::Airy2 => 0.0,
        }
    }

    /// Lowest row that can still matter: the diagonal of the kernel at
    /// distance `d` below the lowest level is bounded by
    /// `exp(−d²/4τ + dτ − C)` (Airy₁) or `exp(−d²/4τ + dτ/2 − C)` (Airy₂).
    pub fn lower_cutoff(&self) -> f64 {
        let tau = self.total_time();
        let xmin = self.level_min();
        if !xmin.is_finite() {
            return 0.0;
        }
        if tau == 0.0 {
            return xmin;
        }
        let d = match self.flavor {
            Flavor::Airy1 => {
                let c = (-LOG_TINY - 2.0 * xmin * tau - 2.0 / 3.0 * tau * tau * tau).max(-LOG_TINY);
                2.0 * tau * tau + libm::sqrt(4.0 * tau * tau * tau * tau + 4.0 * tau * c)
            }
            Flavor::Airy2 => {
                let c = (-LOG_TINY - tau * xmin + tau * tau * tau / 12.0).max(-LOG_TINY);
                tau * tau + libm::sqrt(tau * tau * tau * tau + 4.0 * tau * c)
            }
        };
        xmin - d.max(1.0)
    }

    pub fn upper_cutoff(&self, params: &GridParams) -> f64 {
        let top = self.level_max();
        let top = if top.is_finite() { top } else { 0.0 };
        (top + params.pad).max(params.pad)
    }

    /// Outer (Nyström) grid.
    pub fn outer_grid(&self, params: &GridParams) -> Result<QuadGrid> {
        let lo = self.lower_cutoff().min(self.g0.min(self.upper_cutoff(params)) - 1.0);
        let hi = self.upper_cutoff(params);
        if hi - lo > MAX_RANGE {
            return Err(Error::CostGuard(alloc::format!(
                "path kernel needs the range [{lo:.1}, {hi:.1}]; total time {:.3} is too long",
                self.total_time()
            )));
        }
        let mut plan = GridPlan::new(lo, hi, 1.0).oscillation(self.level_min().min(self.g0).max(lo));
        if self.g0.is_finite() && self.g0 > lo && self.g0 < hi {
            plan = plan.anchor(self.g0);
            if let Some(s) = self.steps.first() {
                plan = plan.refine(self.g0, 0.6 * libm::sqrt(2.0 * s.dt));
            }
        }
        plan.build(params.panel_nodes())
    }

    /// Intermediate grid for the variable at the end of `step`.
    fn step_grid(&self, step: &Step, lo: f64, params: &GridParams) -> Result<QuadGrid> {
        let sigma = libm::sqrt(2.0 * step.dt);
        let reach = self.band(step.dt, lo);
        let top = finite_or(step.g_start, step.g_end).max(finite_or(step.g_end, step.g_start));
        let lo_w = lo - 2.0 * sigma;
        let hi_w = top + reach;
        let mut plan = GridPlan::new(lo_w, hi_w, (STEP_WIDTH * sigma).min(1.0));
        if step.g_end.is_finite() && step.g_end > lo_w && step.g_end < hi_w {
            plan = plan.anchor(step.g_end).refine(step.g_end, 0.5 * sigma);
        }
        if self.flavor == Flavor::Airy1 {
            plan = plan.oscillation(lo);
        }
        plan.build(params.panel_nodes())
    }

    /// Half-width beyond which the one-step propagator is negligible.
    fn band(&self, dt: f64, lo: f64) -> f64 {
        let extra = match self.flavor {
            Flavor::Airy1 => 0.0,
            Flavor::Airy2 => dt * (-lo).max(0.0),
        };
        libm::sqrt(4.0 * dt * (-LOG_TINY + 4.0 + extra))
    }

    fn propagator(&self, dt: f64, z: f64, w: f64) -> f64 {
        match self.flavor {
            Flavor::Airy1 => heat_value(dt, z, w),
            Flavor::Airy2 => airy_heat_value(dt, z, w),
        }
    }

    fn split(&self, step: &Step, z: f64, w: f64) -> (f64, f64) {
        let p = self.propagator(step.dt, z, w);
        let c = match step.kind {
            StepKind::Project => {
                if w >= step.g_end {
                    1.0
                } else {
                    0.0
                }
            }
            StepKind::Bridge => crossing_probability(z, w, step.g_start, step.g_end, step.dt),
        };
        (p * (1.0 - c), p * c)
    }

    /// Kernel values; `extra_rows` are always treated as rows below `g₀`.
    pub fn kernel(&self, params: &GridParams, extra_rows: &[f64], extra_cols: &[f64]) -> Result<PathKernel> {
        let grid = self.outer_grid(params)?;
        let rate = self.rate();
        let nv = grid.m();
        let mut cols = grid.nodes.clone();
        cols.extend_from_slice(extra_cols);
        let nc = cols.len();

        let cross_idx: Vec<usize> = (0..nv).filter(|&i| grid.nodes[i] < self.g0).collect();
        let direct_idx: Vec<usize> = (0..nv).filter(|&i| grid.nodes[i] >= self.g0).collect();
        let mut cross_rows: Vec<f64> = cross_idx.iter().map(|&i| grid.nodes[i]).collect();
        cross_rows.extend_from_slice(extra_rows);
        let nr = nv + extra_rows.len();
        let mut k = Matrix::zeros(nr, nc);

        let lam = match self.flavor {
            Flavor::Airy2 => Some(LambdaTables::new(&cols, params)),
            Flavor::Airy1 => None,
        };

        // direct rows
        let direct_rows: Vec<f64> = direct_idx.iter().map(|&i| grid.nodes[i]).collect();
        let direct = match &lam {
            None => {
                let mut d = Matrix::zeros(direct_rows.len(), nc);
                par::for_each_row(d.as_mut_slice(), nc, |i, row| {
                    for (v, &c) in row.iter_mut().zip(&cols) {
                        *v = ai(direct_rows[i] + c);
                    }
                });
                d
            }
            Some(t) => t.tail(&direct_rows, 0.0),
        };
        for (r, &i) in direct_idx.iter().enumerate() {
            k.row_mut(i).copy_from_slice(direct.row(r));
        }

        if !self.steps.is_empty() && !cross_rows.is_empty() {
            let cross = self.cross_part(&cross_rows, &cols, params, lam.as_ref())?;
            for (r, &i) in cross_idx.iter().enumerate() {
                k.row_mut(i).copy_from_slice(cross.row(r));
            }
            for r in 0..extra_rows.len() {
                k.row_mut(nv + r).copy_from_slice(cross.row(cross_idx.len() + r));
            }
        }
        if let Some((i, j, v)) = k.find_non_finite() {
            let x = if i < nv { grid.nodes[i] } else { extra_rows[i - nv] };
            return Err(Error::NonFinite { i, j, x, y: cols[j], value: v });
        }
        Ok(PathKernel { grid, k, rate })
    }

    fn cross_part(
        &self,
        rows: &[f64],
        cols: &[f64],
        params: &GridParams,
        lam: Option<&LambdaTables>,
    ) -> Result<Matrix> {
        let nr = rows.len();
        let nc = cols.len();
        let lo = self.lower_cutoff().min(rows.iter().copied().fold(f64::INFINITY, f64::min));
        let mut out = Matrix::zeros(nr, nc);
        let mut a: Option<(Matrix, QuadGrid)> = None;
        let mut elapsed = 0.0;
        let mut cache: Option<(Step, QuadGrid, Banded, Banded)> = None;
        let nsteps = self.steps.len();
        for (j, step) in self.steps.iter().enumerate() {
            elapsed += step.dt;
            let wgrid = match &cache {
                Some((st, g, _, _)) if same_step(st, step) => g.clone(),
                _ => self.step_grid(step, lo, params)?,
            };
            let s = wgrid.nodes.partition_point(|&w| w < step.g_end);
            let ystart = match step.kind {
                StepKind::Project => s,
                StepKind::Bridge => 0,
            };
            let ynodes = &wgrid.nodes[ystart..];
            let last = j + 1 == nsteps;

            let (t, next) = match &a {
                None => {
                    let mut t = Matrix::zeros(nr, ynodes.len());
                    par::for_each_row(t.as_mut_slice(), ynodes.len(), |i, row| {
                        for (v, &w) in row.iter_mut().zip(ynodes) {
                            *v = self.split(step, rows[i], w).1;
                        }
                    });
                    let next = if last {
                        None
                    } else {
                        let xn = &wgrid.nodes[..s];
                        let mut x = Matrix::zeros(nr, s);
                        par::for_each_row(x.as_mut_slice(), s, |i, row| {
                            for (v, &w) in row.iter_mut().zip(xn) {
                                let e = self.split(step, rows[i], w).0;
                                *v = if e.abs() < 1e-300 { 0.0 } else { e };
                            }
                        });
                        Some(x)
                    };
                    (t, next)
                }
                Some((am, zgrid)) => {
                    let reuse = matches!(&cache, Some((st, g, _, _)) if same_step(st, step) && g == &wgrid);
                    if !reuse {
                        let band = self.band(step.dt, lo);
                        let ymat = Banded::build(zgrid, &wgrid.nodes[ystart..], band, |z, w| self.split(step, z, w).1);
                        let xmat = Banded::build(zgrid, &wgrid.nodes[..s], band, |z, w| self.split(step, z, w).0);
                        cache = Some((*step, wgrid.clone(), ymat, xmat));
                    }
                    let (_, _, ymat, xmat) = cache.as_ref().unwrap();
                    let t = ymat.left_apply(am);
                    let next = if last { None } else { Some(xmat.left_apply(am)) };
                    (t, next)
                }
            };

            // tail contribution
            let yw = &wgrid.weights[ystart..];
            let tail = match (self.flavor, lam) {
                (Flavor::Airy1, _) => {
                    let mut e = Matrix::zeros(ynodes.len(), nc);
                    par::for_each_row(e.as_mut_slice(), nc, |i, row| {
                        for (v, &c) in row.iter_mut().zip(cols) {
                            *v = yw[i] * e_tau_value(elapsed, ynodes[i], c);
                        }
                    });
                    e
                }
                (Flavor::Airy2, Some(tab)) => {
                    let mut f = tab.tail(ynodes, elapsed);
                    for i in 0..ynodes.len() {
                        for v in f.row_mut(i) {
                            *v *= yw[i];
                        }
                    }
                    f
                }
                (Flavor::Airy2, None) => unreachable!("airy2 needs lambda tables"),
            };
            let contrib = t.matmul(&tail);
            for (o, c) in out.as_mut_slice().iter_mut().zip(contrib.as_slice()) {
                *o += c;
            }

            if let Some(mut x) = next {
                // fold the quadrature weights of the new variable into A
                let xw = &wgrid.weights[..s];
                for i in 0..nr {
                    for (v, &w) in x.row_mut(i).iter_mut().zip(xw) {
                        *v *= w;
                    }
                }
                a = Some((x, wgrid.restrict(f64::NEG_INFINITY, step.g_end)));
            }
        }
        Ok(out)
    }
}

impl OperatorFamily for PathProblem {
    fn assemble(&self, params: &GridParams) -> Result<DiscreteOperator> {
        let pk = self.kernel(params, &[], &[])?;
        Ok(pk.into_operator())
    }
}

impl PathKernel {
    /// Row factor `√wᵢ e^{−c·uᵢ}` of the symmetrized, conjugated matrix.
    pub fn row_factors(&self) -> Vec<f64> {
        self.grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .map(|(&u, &w)| libm::sqrt(w) * libm::exp(-self.rate * u))
            .collect()
    }

    pub fn col_factors(&self) -> Vec<f64> {
        self.grid
            .nodes
            .iter()
            .zip(&self.grid.weights)
            .map(|(&u, &w)| libm::sqrt(w) * libm::exp(self.rate * u))
            .collect()
    }

    /// Conjugated Nyström matrix on the outer grid.
    pub fn matrix(&self) -> Matrix {
        let n = self.grid.m();
        let r = self.row_factors();
        let c = self.col_factors();
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            let src = &self.k.row(i)[..n];
            for (j, v) in m.row_mut(i).iter_mut().enumerate() {
                *v = r[i] * src[j] * c[j];
            }
        }
        m
    }

    pub fn into_operator(self) -> DiscreteOperator {
        let m = self.matrix();
        DiscreteOperator {
            matrix: m,
            grids: vec![self.grid],
            blocks: None,
        }
    }
}

fn same_step(a: &Step, b: &Step) -> bool {
    a.kind == b.kind
        && (a.dt - b.dt).abs() <= 1e-13 * a.dt
        && a.g_start.to_bits() == b.g_start.to_bits()
        && a.g_end.to_bits() == b.g_end.to_bits()
}

fn finite_or(a: f64, b: f64) -> f64 {
    if a.is_finite() {
        a
    } else {
        b
    }
}

/// Rows of a band-limited kernel `X(zᵢ, w)`, stored from the first
/// non-negligible column.
struct Banded {
    starts: Vec<usize>,
    vals: Vec<Vec<f64>>,
    ncols: usize,
}

impl Banded {
    fn build<F: Fn(f64, f64) -> f64 + Sync>(zgrid: &QuadGrid, wnodes: &[f64], band: f64, f: F) -> Banded {
        let nz = zgrid.m();
        let items: Vec<(usize, Vec<f64>)> = par::map(nz, |i| {
            let z = zgrid.nodes[i];
            let a = wnodes.partition_point(|&w| w < z - band);
            let b = wnodes.partition_point(|&w| w <= z + band);
            (a, wnodes[a..b].iter().map(|&w| f(z, w)).collect())
        });
        let (starts, vals) = items.into_iter().unzip();
        Banded {
            starts,
            vals,
            ncols: wnodes.len(),
        }
    }

    /// `A · X` where `A` already carries the quadrature weights of `z`.
    fn left_apply(&self, a: &Matrix) -> Matrix {
        let mut out = Matrix::zeros(a.rows(), self.ncols);
        par::for_each_row(out.as_mut_slice(), self.ncols, |i, row| {
            for (z, &av) in a.row(i).iter().enumerate() {
                if av != 0.0 {
                    let s = self.starts[z];
                    for (o, &x) in row[s..s + self.vals[z].len()].iter_mut().zip(&self.vals[z]) {
                        *o += av * x;
                    }
                }
            }
            for v in row.iter_mut() {
                if v.abs() < 1e-300 {
                    *v = 0.0;
                }
            }
        });
        out
    }
}

/// Airy tables on a shared λ grid for `e^{τH}K_Ai(w, v)`, `τ ≥ 0`.
pub(crate) struct LambdaTables {
    grid: QuadGrid,
    cols: Matrix,
}

impl LambdaTables {
    pub fn new(cols: &[f64], params: &GridParams) -> Self {
        let cmin = cols.iter().copied().fold(f64::INFINITY, f64::min);
        // the w side of every tail lies above the lowest column, so the
        // cutoff computed for (cmin, cmin) is safe
        let mut hi = (-cmin).max(0.0);
        loop {
            let a = (cmin + hi).max(0.0);
            if -4.0 / 3.0 * a * libm::sqrt(a) < LOG_TINY - 2.0 {
                break;
            }
            hi += 0.25;
        }
        let mut plan = GridPlan::new(0.0, hi.max(1.0), 1.0).oscillation(cmin);
        plan.osc_scale = 2.5;
        let grid = plan.build(params.panel_nodes().max(8)).expect("lambda grid");
        let n = grid.m();
        let mut t = Matrix::zeros(cols.len(), n);
        par::for_each_row(t.as_mut_slice(), n, |i, row| {
            for (k, v) in row.iter_mut().enumerate() {
                *v = ai(cols[i] + grid.nodes[k]);
            }
        });
        LambdaTables { grid, cols: t }
    }

    /// `∫₀^∞ e^{−τλ} Ai(w+λ) Ai(v+λ) dλ` for `w ∈ rows`, `v` the columns.
    pub fn tail(&self, rows: &[f64], tau: f64) -> Matrix {
        let n = self.grid.m();
        let mut t = Matrix::zeros(rows.len(), n);
        par::for_each_row(t.as_mut_slice(), n, |i, row| {
            for (k, v) in row.iter_mut().enumerate() {
                let lam = self.grid.nodes[k];
                *v = self.grid.weights[k] * ai_exp(rows[i] + lam, -tau * lam);
            }
        });
        let mut out = Matrix::zeros(rows.len(), self.cols.rows());
        matmul_transpose_into(&t, &self.cols, &mut out);
        out
    }
}

/// Block kernel of an extended-kernel determinant.
pub(crate) struct ExtendedProblem {
    pub flavor: Flavor,
    pub times: Vec<f64>,
    pub levels: Vec<f64>,
}

impl ExtendedProblem {
    pub fn new(flavor: Flavor, times: &[f64], levels: &[f64]) -> Result<Self> {
        if times.is_empty() || times.len() != levels.len() {
            return Err(invalid("times and levels must be non-empty and of equal length"));
        }
        if times.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::UnorderedTimes);
        }
        if levels.iter().chain(times).any(|v| v.is_nan()) {
            return Err(invalid("NaN in query"));
        }
        Ok(ExtendedProblem {
            flavor,
            times: times.to_vec(),
            levels: levels.to_vec(),
        })
    }

    /// One grid per time slice on `(xⱼ, hi)`, empty when `xⱼ ≥ hi`.
    fn grids(&self, params: &GridParams) -> Result<Vec<QuadGrid>> {
        let finite = self.levels.iter().copied().filter(|v| v.is_finite());
        let top = finite.clone().fold(f64::NEG_INFINITY, f64::max);
        let bottom = finite.fold(f64::INFINITY, f64::min);
        let hi = if top.is_finite() { (top + params.pad).max(params.pad) } else { params.pad };
        let gap = self
            .times
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(f64::INFINITY, f64::min);
        let base = if gap.is_finite() { (1.2 * libm::sqrt(2.0 * gap)).min(1.0) } else { 1.0 };
        self.levels
            .iter()
            .map(|&x| {
                if x >= hi {
                    return Ok(QuadGrid {
                        nodes: Vec::new(),
                        weights: Vec::new(),
                        lo: hi,
                        hi,
                    });
                }
                let lo = if x.is_finite() { x } else { bottom.min(0.0) - params.pad };
                let mut plan = GridPlan::new(lo, hi, base);
                if bottom.is_finite() {
                    plan = plan.oscillation(bottom);
                }
                plan.build(params.panel_nodes())
            })
            .collect()
    }
}

impl OperatorFamily for ExtendedProblem {
    fn assemble(&self, params: &GridParams) -> Result<DiscreteOperator> {
        let grids = self.grids(params)?;
        let t = &self.times;
        match self.flavor {
            Flavor::Airy1 => crate::fredholm::block_discretize(
                |i, j| crate::kernels::k1_ext(t[i], t[j]),
                t,
                &grids,
                params,
            ),
            Flavor::Airy2 => crate::fredholm::block_discretize(
                |i, j| crate::kernels::k2_ext(t[i], t[j]),
                t,
                &grids,
                params,
            ),
        }
    }
}

/// Pieces of the derivative of a path determinant in its first level.
pub(crate) struct Conditioned {
    /// `det(I − K)`.
    pub det: f64,
    /// `∫ C(x, v) (I − K)⁻¹(v, x) dv`, `C` the chain kernel from `x`.
    pub trace: f64,
    pub grid: QuadGrid,
    /// Resolvent column: `(I − K) y = K(·, x)`.
    pub y: Vec<f64>,
}

/// `∂ₓ det(I − K) = det · trace` for the path problem whose first level is
/// `x = problem.g0`.
pub(crate) fn condition_at(problem: &PathProblem, params: &GridParams) -> Result<Conditioned> {
    let x = problem.g0;
    let pk = problem.kernel(params, &[x], &[x])?;
    let n = pk.grid.m();
    let m = pk.matrix();
    let r = pk.row_factors();
    let c = pk.col_factors();

    let mut a = m;
    for v in a.as_mut_slice() {
        *v = -*v;
    }
    for i in 0..n {
        a.set(i, i, a.get(i, i) + 1.0);
    }
    let lu = crate::fredholm::Lu::new(a)?;
    let det = lu.det();
    let cond = lu.condition_estimate();
    if !(cond < crate::fredholm::CONDITION_LIMIT) {
        return Err(Error::Singular { condition: cond });
    }
    let rhs: Vec<f64> = (0..n).map(|i| r[i] * pk.k.get(i, n)).collect();
    let yt = lu.solve(&rhs);
    let y: Vec<f64> = yt.iter().zip(&r).map(|(v, f)| v / f).collect();

    // chain row from x: C(x, v) = B₀(x, v) − cross(x, v), or K_Ai for Airy₂
    let direct = |v: f64| -> f64 {
        match problem.flavor {
            Flavor::Airy1 => ai(x + v),
            Flavor::Airy2 => 0.0,
        }
    };
    let (dx, dcols) = match problem.flavor {
        Flavor::Airy1 => (direct(x), pk.grid.nodes.iter().map(|&v| direct(v)).collect::<Vec<_>>()),
        Flavor::Airy2 => {
            let mut cols = pk.grid.nodes.clone();
            cols.push(x);
            let t = LambdaTables::new(&cols, params).tail(&[x], 0.0);
            (t.get(0, n), t.row(0)[..n].to_vec())
        }
    };
    let chain_xx = dx - pk.k.get(n, n);
    // Σ wⱼ C(x,vⱼ) yⱼ = Σ C(x,vⱼ) √wⱼ e^{c vⱼ} ỹⱼ
    let mut s = 0.0;
    for j in 0..n {
        s += (dcols[j] - pk.k.get(n, j)) * c[j] * yt[j];
    }
    Ok(Conditioned {
        det,
        trace: chain_xx + s,
        grid: pk.grid,
        y,
    })
}
