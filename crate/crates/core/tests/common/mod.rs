//! Shared fixtures and independent reference computations for the
//! integration suites.

#![allow(dead_code)]

use nalgebra::{DMatrix, DVector};
use nscreen::oracle::fista_solve;
use nscreen::{normalize_columns, DesignMatrix};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub fn gaussian_design(n: usize, p: usize, rng: &mut ChaCha8Rng) -> DesignMatrix {
    normalize_columns(DMatrix::from_fn(n, p, |_, _| rng.sample(StandardNormal))).unwrap()
}

pub fn gaussian_vec(len: usize, scale: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..len)
        .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// Sparse planted model `y = X beta + noise * z` with `k` entries of
/// magnitude in `[1, 2]`.
pub fn planted_response(x: &DesignMatrix, k: usize, noise: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let p = x.p();
    let mut beta = vec![0.0; p];
    for idx in rand::seq::index::sample(rng, p, k.min(p)).into_vec() {
        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        beta[idx] = sign * rng.random_range(1.0..2.0);
    }
    let m = x.values();
    let fit = m * DVector::from_column_slice(&beta);
    (0..x.n())
        .map(|i| fit[i] + noise * rng.sample::<f64, _>(StandardNormal))
        .collect()
}

/// `X^T v / n` by dense matrix algebra.
pub fn dense_xtv(x: &DesignMatrix, v: &[f64]) -> Vec<f64> {
    let out = x.values().transpose() * DVector::from_column_slice(v) / x.n() as f64;
    out.iter().copied().collect()
}

pub fn dense_dual(x: &DesignMatrix, y: &[f64], beta: &[f64]) -> Vec<f64> {
    let fit = x.values() * DVector::from_column_slice(beta);
    let r: Vec<f64> = y.iter().zip(fit.iter()).map(|(a, b)| a - b).collect();
    dense_xtv(x, &r)
}

pub fn dense_objective(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let fit = x.values() * DVector::from_column_slice(beta);
    let rss: f64 = y.iter().zip(fit.iter()).map(|(a, b)| (a - b).powi(2)).sum();
    rss / (2.0 * x.n() as f64) + lambda * beta.iter().map(|b| b.abs()).sum::<f64>()
}

pub fn soft(v: f64, lambda: f64) -> f64 {
    v.signum() * (v.abs() - lambda).max(0.0)
}

/// `||beta - soft(beta + d)||_inf` with `d` recomputed densely.
pub fn dense_kkt(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> f64 {
    let d = dense_dual(x, y, beta);
    beta.iter()
        .zip(&d)
        .map(|(b, di)| (b - soft(b + di, lambda)).abs())
        .fold(0.0, f64::max)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(u, v)| (u - v).abs()).fold(0.0, f64::max)
}

/// Exact Lasso solution: FISTA to locate the support and signs, then the
/// closed-form stationarity equations `G_SS beta_S = X_S^T y / n - lambda s_S`
/// on that support. Returns `None` when the polished point fails the
/// optimality checks (sign flip, dual infeasibility, KKT above `1e-12`).
pub fn exact_lasso(x: &DesignMatrix, y: &[f64], lambda: f64) -> Option<Vec<f64>> {
    let fista = fista_solve(x, y, lambda, 1e-11, 500_000).ok()?;
    let scale = fista.beta.iter().fold(0.0f64, |m, b| m.max(b.abs())).max(1.0);
    let support: Vec<usize> = (0..x.p())
        .filter(|&i| fista.beta[i].abs() > 1e-7 * scale)
        .collect();
    let mut beta = vec![0.0; x.p()];
    if !support.is_empty() {
        let n = x.n() as f64;
        let xs = DMatrix::from_fn(x.n(), support.len(), |r, c| x.values()[(r, support[c])]);
        let gram = xs.transpose() * &xs / n;
        let xty = xs.transpose() * DVector::from_column_slice(y) / n;
        let rhs = DVector::from_fn(support.len(), |k, _| {
            xty[k] - lambda * fista.beta[support[k]].signum()
        });
        let sol = gram.lu().solve(&rhs)?;
        for (k, &i) in support.iter().enumerate() {
            if sol[k].signum() != fista.beta[i].signum() {
                return None;
            }
            beta[i] = sol[k];
        }
    }
    let d = dense_dual(x, y, &beta);
    let feasible = (0..x.p()).all(|i| beta[i] != 0.0 || d[i].abs() <= lambda);
    (feasible && dense_kkt(x, y, &beta, lambda) <= 1e-12).then_some(beta)
}
