//! Design matrix, primal/dual state, working sets and the restricted
//! linear-algebra kernels the solvers are built on.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exec::{self, Execution};

/// Column norms at or below this are treated as zero.
const ZERO_NORM: f64 = 1e-300;

/// Dense, column-major `n x p` design whose columns all have Euclidean
/// norm `sqrt(n)`.
///
/// Immutable after construction and safe to share across threads.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    values: DMatrix<f64>,
    column_scales: Vec<f64>,
}

/// Rescales every column of `raw` to Euclidean norm `sqrt(n)`.
///
/// `column_scales[j]` is the original norm divided by `sqrt(n)`, so a
/// coefficient fitted on the normalized design maps back to the raw design
/// as `beta_raw[j] = beta_norm[j] / column_scales[j]`.
pub fn normalize_columns(raw: DMatrix<f64>) -> Result<DesignMatrix> {
    let (n, p) = raw.shape();
    if n == 0 || p == 0 {
        return Err(Error::EmptyMatrix { rows: n, cols: p });
    }
    if let Some(pos) = raw.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            row: pos % n,
            col: pos / n,
        });
    }
    let mut values = raw;
    let root_n = (n as f64).sqrt();
    let mut column_scales = Vec::with_capacity(p);
    for j in 0..p {
        let mut col = values.column_mut(j);
        let norm = col.norm();
        if norm <= ZERO_NORM {
            return Err(Error::ZeroColumn(j));
        }
        let scale = norm / root_n;
        col /= scale;
        column_scales.push(scale);
    }
    Ok(DesignMatrix {
        values,
        column_scales,
    })
}

impl DesignMatrix {
    /// Builds a normalized design from row-major data.
    pub fn from_row_major(n: usize, p: usize, data: &[f64]) -> Result<Self> {
        check_len("row-major data", n * p, data.len())?;
        normalize_columns(DMatrix::from_row_slice(n, p, data))
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn p(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column_scales(&self) -> &[f64] {
        &self.column_scales
    }

    /// Column `j` as a contiguous slice.
    #[inline]
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    /// Maps coefficients on the normalized scale back to the raw design.
    pub fn unscale(&self, beta: &[f64]) -> Vec<f64> {
        beta.iter().zip(&self.column_scales).map(|(b, s)| b / s).collect()
    }

    /// `X beta` for a dense coefficient vector, skipping exact zeros.
    pub fn apply(&self, beta: &[f64]) -> Result<Vec<f64>> {
        check_len("beta", self.p(), beta.len())?;
        let mut out = vec![0.0; self.n()];
        for (j, &b) in beta.iter().enumerate() {
            if b != 0.0 {
                axpy(b, self.column(j), &mut out);
            }
        }
        Ok(out)
    }

    /// `X_A u` for coefficients `u` on working set `A`.
    pub fn apply_restricted(&self, set: &WorkingSet, u: &[f64]) -> Result<Vec<f64>> {
        check_len("restricted coefficients", set.len(), u.len())?;
        let mut out = vec![0.0; self.n()];
        for (&j, &b) in set.indices().iter().zip(u) {
            axpy(b, self.column(j), &mut out);
        }
        Ok(out)
    }

    /// Explicit restricted Gram matrix `X_A^T X_A / n`.
    pub fn gram_submatrix(&self, set: &WorkingSet) -> DMatrix<f64> {
        let k = set.len();
        let inv_n = 1.0 / self.n() as f64;
        let idx = set.indices();
        let mut g = DMatrix::zeros(k, k);
        for a in 0..k {
            let ca = self.column(idx[a]);
            for b in a..k {
                let v = dot(ca, self.column(idx[b])) * inv_n;
                g[(a, b)] = v;
                g[(b, a)] = v;
            }
        }
        g
    }
}

/// `X^T v / n`.
pub fn xty_over_n(x: &DesignMatrix, v: &[f64]) -> Result<Vec<f64>> {
    let exec = exec::for_work(x.n() * x.p());
    xty_over_n_with(x, v, exec)
}

/// `X^T v / n` with an explicit execution mode. Results do not depend on
/// the mode.
pub fn xty_over_n_with(x: &DesignMatrix, v: &[f64], exec: Execution) -> Result<Vec<f64>> {
    check_len("v", x.n(), v.len())?;
    let inv_n = 1.0 / x.n() as f64;
    let mut out = vec![0.0; x.p()];
    exec.fill_indexed(&mut out, |j| dot(x.column(j), v) * inv_n);
    Ok(out)
}

/// `(X_A^T X_A / n) u`, computed as two matrix-vector products.
pub fn restricted_gram_apply(x: &DesignMatrix, set: &WorkingSet, u: &[f64]) -> Result<Vec<f64>> {
    let t = x.apply_restricted(set, u)?;
    let inv_n = 1.0 / x.n() as f64;
    Ok(set
        .indices()
        .iter()
        .map(|&j| dot(x.column(j), &t) * inv_n)
        .collect())
}

/// Sorted set of active column indices in `0..p`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct WorkingSet {
    indices: Vec<usize>,
    p: usize,
}

impl WorkingSet {
    /// Validates that `indices` is strictly increasing and below `p`.
    pub fn new(indices: Vec<usize>, p: usize) -> Result<Self> {
        if indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidConfig(
                "working-set indices must be strictly increasing".into(),
            ));
        }
        if let Some(&last) = indices.last() {
            if last >= p {
                return Err(Error::InvalidConfig(format!(
                    "working-set index {last} out of range for p = {p}"
                )));
            }
        }
        Ok(WorkingSet { indices, p })
    }

    pub fn empty(p: usize) -> Self {
        WorkingSet {
            indices: Vec::new(),
            p,
        }
    }

    pub fn full(p: usize) -> Self {
        WorkingSet {
            indices: (0..p).collect(),
            p,
        }
    }

    /// Indices `i` with `pred(i)` true, in increasing order.
    pub fn from_predicate(p: usize, mut pred: impl FnMut(usize) -> bool) -> Self {
        WorkingSet {
            indices: (0..p).filter(|&i| pred(i)).collect(),
            p,
        }
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, i: usize) -> bool {
        self.indices.binary_search(&i).is_ok()
    }

    /// Indices in `0..p` not in the set, increasing.
    pub fn complement(&self) -> impl Iterator<Item = usize> + '_ {
        let mut next = self.indices.iter().peekable();
        (0..self.p).filter(move |&i| {
            if next.peek() == Some(&&i) {
                next.next();
                false
            } else {
                true
            }
        })
    }

    /// Gathers `v[A]`.
    pub fn gather(&self, v: &[f64]) -> Vec<f64> {
        self.indices.iter().map(|&i| v[i]).collect()
    }
}

/// Coefficients and dual variable paired with their regularization levels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PrimalDualState {
    pub beta: Vec<f64>,
    pub d: Vec<f64>,
    pub lambda: f64,
    pub lambda_bar: f64,
}

impl PrimalDualState {
    pub fn new(beta: Vec<f64>, d: Vec<f64>, lambda: f64, lambda_bar: f64) -> Result<Self> {
        check_len("d", beta.len(), d.len())?;
        crate::error::check_lambda(lambda)?;
        if !(0.0..lambda).contains(&lambda_bar) {
            return Err(Error::InvalidConfig(format!(
                "lambda_bar must lie in [0, lambda), got {lambda_bar} with lambda {lambda}"
            )));
        }
        Ok(PrimalDualState {
            beta,
            d,
            lambda,
            lambda_bar,
        })
    }

    /// The state `(0, X^T y / n)`, which is the exact solution for every
    /// `lambda >= ||X^T y / n||_inf`.
    pub fn cold_start(x: &DesignMatrix, y: &[f64], lambda: f64, lambda_bar: f64) -> Result<Self> {
        let d = xty_over_n(x, y)?;
        Self::new(vec![0.0; x.p()], d, lambda, lambda_bar)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let mut acc = [0.0f64; 4];
    let chunks = a.len() / 4;
    for c in 0..chunks {
        let i = 4 * c;
        acc[0] += a[i] * b[i];
        acc[1] += a[i + 1] * b[i + 1];
        acc[2] += a[i + 2] * b[i + 2];
        acc[3] += a[i + 3] * b[i + 3];
    }
    let mut tail = 0.0;
    for i in 4 * chunks..a.len() {
        tail += a[i] * b[i];
    }
    (acc[0] + acc[1]) + (acc[2] + acc[3]) + tail
}

#[inline]
pub(crate) fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    debug_assert_eq!(x.len(), y.len());
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

pub(crate) fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}
