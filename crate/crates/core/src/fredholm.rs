//! Nyström discretization, determinants, resolvent solves and traces.
//!
//! An operator `K` on a grid with weights `wᵢ` becomes the matrix
//! `√wᵢ K(xᵢ, xⱼ) √wⱼ`, so `det(I − K)` is approximated by a finite
//! determinant computed from an LU factorization with partial pivoting.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error, Result};
use crate::kernels::KernelSpec;
use crate::par;
use crate::quadrature::{GridParams, QuadGrid};

/// Dense row-major matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    pub fn from_fn<F: Fn(usize, usize) -> f64>(rows: usize, cols: usize, f: F) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m.data[i * cols + j] = f(i, j);
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.data
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self.get(j, i))
    }

    /// `self · other`.
    pub fn matmul(&self, other: &Matrix) -> Matrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = Matrix::zeros(self.rows, other.cols);
        let w = other.cols;
        par::for_each_row(&mut out.data, w, |i, row| {
            for (l, &a) in self.row(i).iter().enumerate() {
                if a != 0.0 {
                    for (o, &b) in row.iter_mut().zip(other.row(l)) {
                        *o += a * b;
                    }
                }
            }
        });
        out
    }

    /// Multiply row `i` by `r[i]` and column `j` by `c[j]`.
    pub fn scale(&mut self, r: &[f64], c: &[f64]) {
        for i in 0..self.rows {
            let ri = r[i];
            for (v, &cj) in self.row_mut(i).iter_mut().zip(c) {
                *v *= ri * cj;
            }
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// First non-finite entry, if any.
    pub fn find_non_finite(&self) -> Option<(usize, usize, f64)> {
        self.data
            .iter()
            .position(|v| !v.is_finite())
            .map(|p| (p / self.cols, p % self.cols, self.data[p]))
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        (0..self.rows)
            .map(|i| self.row(i).iter().zip(v).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `out = a · bᵀ`.
pub fn matmul_transpose_into(a: &Matrix, b: &Matrix, out: &mut Matrix) {
    assert_eq!(a.cols, b.cols, "inner dimensions differ");
    assert_eq!((out.rows, out.cols), (a.rows, b.rows));
    let w = out.cols;
    par::for_each_row(&mut out.data, w, |i, row| {
        let ai = a.row(i);
        for (j, o) in row.iter_mut().enumerate() {
            *o = dot(ai, b.row(j));
        }
    });
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    let mut s = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let k = 4 * c;
        s[0] += a[k] * b[k];
        s[1] += a[k + 1] * b[k + 1];
        s[2] += a[k + 2] * b[k + 2];
        s[3] += a[k + 3] * b[k + 3];
    }
    let mut t = (s[0] + s[1]) + (s[2] + s[3]);
    for k in 4 * chunks..a.len() {
        t += a[k] * b[k];
    }
    t
}

/// LU factorization `P A = L U` with partial pivoting.
#[derive(Debug, Clone)]
pub struct Lu {
    lu: Matrix,
    piv: Vec<usize>,
    sign: f64,
    singular: bool,
    norm1: f64,
}

impl Lu {
    pub fn new(mut a: Matrix) -> Result<Lu> {
        if a.rows != a.cols {
            return Err(invalid("LU needs a square matrix"));
        }
        if let Some((i, j, v)) = a.find_non_finite() {
            return Err(Error::Factorization(format!("non-finite entry {v} at ({i}, {j})")));
        }
        let n = a.rows;
        let norm1 = (0..n)
            .map(|j| (0..n).map(|i| a.get(i, j).abs()).sum::<f64>())
            .fold(0.0, f64::max);
        let mut piv: Vec<usize> = (0..n).collect();
        let mut sign = 1.0;
        let mut singular = false;
        for k in 0..n {
            let mut p = k;
            let mut best = a.get(k, k).abs();
            for i in k + 1..n {
                let v = a.get(i, k).abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best == 0.0 {
                singular = true;
                continue;
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                }
                piv.swap(k, p);
                sign = -sign;
            }
            let pivot = a.get(k, k);
            let (top, bottom) = a.data.split_at_mut((k + 1) * n);
            let prow = &top[k * n + k + 1..k * n + n];
            for row in bottom.chunks_mut(n) {
                let l = row[k] / pivot;
                row[k] = l;
                if l != 0.0 {
                    for (x, &u) in row[k + 1..].iter_mut().zip(prow) {
                        *x -= l * u;
                    }
                }
            }
        }
        Ok(Lu {
            lu: a,
            piv,
            sign,
            singular,
            norm1,
        })
    }

    pub fn det(&self) -> f64 {
        if self.singular {
            return 0.0;
        }
        let n = self.lu.rows;
        (0..n).fold(self.sign, |d, i| d * self.lu.get(i, i))
    }

    pub fn is_singular(&self) -> bool {
        self.singular
    }

    /// Solve `A x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut x: Vec<f64> = self.piv.iter().map(|&p| b[p]).collect();
        for i in 0..n {
            let s = dot(&self.lu.row(i)[..i], &x[..i]);
            x[i] -= s;
        }
        for i in (0..n).rev() {
            let s = dot(&self.lu.row(i)[i + 1..], &x[i + 1..]);
            x[i] = (x[i] - s) / self.lu.get(i, i);
        }
        x
    }

    /// Solve `Aᵀ x = b`.
    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        let n = self.lu.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let mut s = y[i];
            for k in 0..i {
                s -= self.lu.get(k, i) * y[k];
            }
            y[i] = s / self.lu.get(i, i);
        }
        for i in (0..n).rev() {
            let mut s = y[i];
            for k in i + 1..n {
                s -= self.lu.get(k, i) * y[k];
            }
            y[i] = s;
        }
        let mut x = vec![0.0; n];
        for (k, &p) in self.piv.iter().enumerate() {
            x[p] = y[k];
        }
        x
    }

    /// Hager–Higham estimate of the 1-norm condition number.
    pub fn condition_estimate(&self) -> f64 {
        if self.singular {
            return f64::INFINITY;
        }
        let n = self.lu.rows;
        if n == 0 {
            return 1.0;
        }
        let mut x = vec![1.0 / n as f64; n];
        let mut est = 0.0;
        for _ in 0..5 {
            let y = self.solve(&x);
            let norm: f64 = y.iter().map(|v| v.abs()).sum();
            if norm <= est {
                break;
            }
            est = norm;
            let s: Vec<f64> = y.iter().map(|v| if *v >= 0.0 { 1.0 } else { -1.0 }).collect();
            let z = self.solve_transpose(&s);
            let (j, zmax) = z
                .iter()
                .enumerate()
                .fold((0, 0.0), |(bj, bv), (j, v)| if v.abs() > bv { (j, v.abs()) } else { (bj, bv) });
            let zx: f64 = z.iter().zip(&x).map(|(a, b)| a * b).sum();
            if zmax <= zx {
                break;
            }
            x = vec![0.0; n];
            x[j] = 1.0;
        }
        est * self.norm1
    }
}

/// Discretized operator: `√wᵢ K(xᵢ, xⱼ) √wⱼ`, possibly in blocks.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: Matrix,
    /// One grid per block (a single grid when unblocked).
    pub grids: Vec<QuadGrid>,
    /// Time label of each block.
    pub blocks: Option<Vec<f64>>,
}

impl DiscreteOperator {
    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn grid(&self) -> &QuadGrid {
        &self.grids[0]
    }
}

/// A determinant with its refinement error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetResult {
    pub value: f64,
    /// `|value(m) − value(2m)|`; zero when no refinement was run.
    pub error_est: f64,
    /// Nominal node parameter of the reported value.
    pub m_used: usize,
}

impl DetResult {
    pub fn single(value: f64, m: usize) -> Self {
        DetResult {
            value,
            error_est: 0.0,
            m_used: m,
        }
    }
}

/// Nyström matrix of `k` on `grid`.
pub fn discretize(k: &KernelSpec, grid: &QuadGrid) -> Result<DiscreteOperator> {
    discretize_with(k, grid, &GridParams::with_m(grid.m().max(120)))
}

/// Nyström matrix with explicit λ-resolution for integral kernels.
pub fn discretize_with(k: &KernelSpec, grid: &QuadGrid, params: &GridParams) -> Result<DiscreteOperator> {
    let mut m = k.matrix(&grid.nodes, &grid.nodes, params);
    if let Some((i, j, v)) = m.find_non_finite() {
        return Err(Error::NonFinite {
            i,
            j,
            x: grid.nodes[i],
            y: grid.nodes[j],
            value: v,
        });
    }
    let s = grid.sqrt_weights();
    m.scale(&s, &s);
    Ok(DiscreteOperator {
        matrix: m,
        grids: vec![grid.clone()],
        blocks: None,
    })
}

/// `det(I − M)` for an already-assembled operator matrix.
pub fn det_i_minus_matrix(m: &Matrix) -> Result<f64> {
    let n = m.rows();
    let mut a = m.clone();
    for v in a.as_mut_slice() {
        *v = -*v;
    }
    for i in 0..n {
        let d = a.get(i, i) + 1.0;
        a.set(i, i, d);
    }
    Ok(Lu::new(a)?.det())
}

/// `det(I − op)` on the operator's own grid; `error_est` is zero because a
/// bare matrix cannot be re-discretized (see [`fredholm_det`]).
pub fn det_id_minus(op: &DiscreteOperator) -> Result<DetResult> {
    Ok(DetResult::single(det_i_minus_matrix(&op.matrix)?, op.dim()))
}

/// Anything that can be discretized at a given resolution.
pub trait OperatorFamily {
    fn assemble(&self, params: &GridParams) -> Result<DiscreteOperator>;
}

/// `det(I − K)` at `params.m`, with `error_est` from the doubled grid when
/// `params.estimate_error` is set.
pub fn fredholm_det<F: OperatorFamily + ?Sized>(family: &F, params: &GridParams) -> Result<DetResult> {
    params.validate()?;
    let v = det_i_minus_matrix(&family.assemble(params)?.matrix)?;
    let err = if params.estimate_error {
        let v2 = det_i_minus_matrix(&family.assemble(&params.doubled())?.matrix)?;
        (v - v2).abs()
    } else {
        0.0
    };
    Ok(DetResult {
        value: v,
        error_est: err,
        m_used: params.m,
    })
}

/// Condition numbers above this make [`resolve`] fail.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Solve `(I − M) v = rhs`.
pub fn resolve(op: &DiscreteOperator, rhs: &[f64]) -> Result<Vec<f64>> {
    resolve_matrix(&op.matrix, rhs)
}

pub(crate) fn resolve_matrix(m: &Matrix, rhs: &[f64]) -> Result<Vec<f64>> {
    let n = m.rows();
    if rhs.len() != n {
        return Err(invalid("right-hand side length differs from operator size"));
    }
    let mut a = m.clone();
    for v in a.as_mut_slice() {
        *v = -*v;
    }
    for i in 0..n {
        let d = a.get(i, i) + 1.0;
        a.set(i, i, d);
    }
    let lu = Lu::new(a)?;
    let cond = lu.condition_estimate();
    if !(cond < CONDITION_LIMIT) {
        return Err(Error::Singular { condition: cond });
    }
    Ok(lu.solve(rhs))
}

/// `Σᵢ wᵢ chain(xᵢ) col(xᵢ)`: the quadrature form of a rank-one trace.
pub fn trace_product(resolvent_col: &[f64], chain_row: &[f64], grid: &QuadGrid) -> f64 {
    resolvent_col
        .iter()
        .zip(chain_row)
        .zip(&grid.weights)
        .map(|((a, b), w)| a * b * w)
        .sum()
}

/// Block Nyström matrix on `{t₁..tₙ} × ℝ` with block `(i, j)` equal to
/// `kext(i, j)` between slice grids `grids[i]` and `grids[j]`. Each slice
/// grid covers only `(xᵢ, hi)`, which realizes the indicator weights exactly.
pub fn block_discretize<F>(
    kext: F,
    times: &[f64],
    grids: &[QuadGrid],
    params: &GridParams,
) -> Result<DiscreteOperator>
where
    F: Fn(usize, usize) -> KernelSpec,
{
    if times.is_empty() || times.len() != grids.len() {
        return Err(invalid("one grid per time slice is required"));
    }
    if times.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::UnorderedTimes);
    }
    let offsets: Vec<usize> = grids
        .iter()
        .scan(0, |acc, g| {
            let o = *acc;
            *acc += g.m();
            Some(o)
        })
        .collect();
    let n: usize = grids.iter().map(|g| g.m()).sum();
    let mut out = Matrix::zeros(n, n);
    for (i, gi) in grids.iter().enumerate() {
        if gi.is_empty() {
            continue;
        }
        let si = gi.sqrt_weights();
        for (j, gj) in grids.iter().enumerate() {
            if gj.is_empty() {
                continue;
            }
            let sj = gj.sqrt_weights();
            let mut b = kext(i, j).matrix(&gi.nodes, &gj.nodes, params);
            if let Some((a, c, v)) = b.find_non_finite() {
                return Err(Error::NonFinite {
                    i: offsets[i] + a,
                    j: offsets[j] + c,
                    x: gi.nodes[a],
                    y: gj.nodes[c],
                    value: v,
                });
            }
            b.scale(&si, &sj);
            for r in 0..gi.m() {
                out.row_mut(offsets[i] + r)[offsets[j]..offsets[j] + gj.m()].copy_from_slice(b.row(r));
            }
        }
    }
    Ok(DiscreteOperator {
        matrix: out,
        grids: grids.to_vec(),
        blocks: Some(times.to_vec()),
    })
}
