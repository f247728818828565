//! Soft-thresholding, the Lasso objective, and the fixed-point KKT check.
//!
//! A coefficient vector `beta` minimizes
//! `(1/2n) ||y - X beta||^2 + lambda ||beta||_1` exactly when, with
//! `d = X^T (y - X beta) / n`, it satisfies `beta = soft_threshold(beta + d, lambda)`.
//! [`kkt_residual`] measures the sup-norm defect of that fixed point.

use serde::{Deserialize, Serialize};

use crate::error::{check_lambda, check_len, Result};
use crate::types::{norm_inf, xty_over_n, DesignMatrix};

/// Scalar soft-threshold. `|v| <= lambda` maps to exactly zero.
#[inline]
pub fn shrink(v: f64, lambda: f64) -> f64 {
    if v > lambda {
        v - lambda
    } else if v < -lambda {
        v + lambda
    } else {
        0.0
    }
}

pub fn soft_threshold(v: &[f64], lambda: f64) -> Result<Vec<f64>> {
    check_lambda(lambda)?;
    Ok(v.iter().map(|&x| shrink(x, lambda)).collect())
}

/// `(1/2n) ||y - X beta||^2 + lambda ||beta||_1`
pub fn lasso_objective(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> Result<f64> {
    check_len("y", x.n(), y.len())?;
    let fitted = x.apply(beta)?;
    let rss: f64 = y.iter().zip(&fitted).map(|(yi, fi)| (yi - fi) * (yi - fi)).sum();
    let l1: f64 = beta.iter().map(|b| b.abs()).sum();
    Ok(rss / (2.0 * x.n() as f64) + lambda * l1)
}

/// `y - X beta`
pub fn residual(x: &DesignMatrix, y: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    check_len("y", x.n(), y.len())?;
    let fitted = x.apply(beta)?;
    Ok(y.iter().zip(&fitted).map(|(yi, fi)| yi - fi).collect())
}

/// `X^T (y - X beta) / n`
pub fn dual_variable(x: &DesignMatrix, y: &[f64], beta: &[f64]) -> Result<Vec<f64>> {
    let r = residual(x, y, beta)?;
    xty_over_n(x, &r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// `||beta - soft_threshold(beta + d, lambda)||_inf`
    pub residual_inf: f64,
    /// Largest `|d_i| - lambda` over coordinates with `beta_i == 0`, clipped at zero.
    pub dual_feasibility: f64,
    pub objective: f64,
}

pub fn kkt_residual(x: &DesignMatrix, y: &[f64], beta: &[f64], lambda: f64) -> Result<KktReport> {
    check_lambda(lambda)?;
    let d = dual_variable(x, y, beta)?;
    kkt_from_dual(x, y, beta, &d, lambda)
}

/// KKT report when the dual `X^T (y - X beta) / n` is already known.
pub(crate) fn kkt_from_dual(
    x: &DesignMatrix,
    y: &[f64],
    beta: &[f64],
    d: &[f64],
    lambda: f64,
) -> Result<KktReport> {
    let defect: Vec<f64> = beta
        .iter()
        .zip(d)
        .map(|(&b, &di)| b - shrink(b + di, lambda))
        .collect();
    let dual_feasibility = beta
        .iter()
        .zip(d)
        .filter(|(b, _)| **b == 0.0)
        .map(|(_, di)| di.abs() - lambda)
        .fold(0.0, f64::max);
    Ok(KktReport {
        residual_inf: norm_inf(&defect),
        dual_feasibility,
        objective: lasso_objective(x, y, beta, lambda)?,
    })
}
