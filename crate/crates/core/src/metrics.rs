//! Per-trial accuracy metrics and design diagnostics.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{check_len, Error, Result};
use crate::exec;
use crate::simgen::GroundTruth;
use crate::types::{dot, norm2, DesignMatrix};

/// Magnitudes at or below this count as zero when reading off a support.
pub const SUPPORT_THRESHOLD: f64 = 1e-10;

/// Sup-norm error radius, in units of `gamma_n`, for sign-consistent path points.
pub const LINF_BOUND_FACTOR: f64 = 14.0 / 3.0;

/// Minimum signal strength, in units of `gamma_n`.
pub const BETA_MIN_FACTOR: f64 = 78.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialMetrics {
    /// `||beta_hat - beta_star||_inf`
    pub ae: f64,
    /// `||beta_hat - beta_star||_2 / ||beta_star||_2`
    pub re: f64,
    pub exact_support: bool,
    pub support_size: usize,
    pub wall_time_s: f64,
    pub sign_consistent: bool,
    /// `ae < (14/3) gamma_n`; absent when `gamma_n` is unknown.
    pub linf_within_bound: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub t: usize,
    pub nu: f64,
    pub t_nu: f64,
    pub gamma_n: f64,
    /// `min |beta_star_A| >= 78 gamma_n`
    pub c1_ok: bool,
    /// `T nu <= 1/4`
    pub c3_ok: bool,
    /// `min |beta_star_A| / (78 gamma_n)`
    pub beta_min_ratio: f64,
}

fn sign_of(v: f64) -> i8 {
    if v > SUPPORT_THRESHOLD {
        1
    } else if v < -SUPPORT_THRESHOLD {
        -1
    } else {
        0
    }
}

/// `sign(beta_hat) == sign(beta_star)` componentwise, reading
/// `|beta_hat_i| <= 1e-10` as zero.
pub fn sign_consistent(beta_hat: &[f64], beta_star: &[f64]) -> bool {
    beta_hat
        .iter()
        .zip(beta_star)
        .all(|(h, s)| sign_of(*h) == sign_of(*s))
}

pub fn trial_metrics(
    beta_hat: &[f64],
    truth: &GroundTruth,
    gamma_n: Option<f64>,
    elapsed: Duration,
) -> Result<TrialMetrics> {
    let star = &truth.beta_star;
    check_len("beta_hat", star.len(), beta_hat.len())?;
    let star_norm = norm2(star);
    if star_norm == 0.0 {
        return Err(Error::ZeroTruth);
    }
    let diff: Vec<f64> = beta_hat.iter().zip(star).map(|(h, s)| h - s).collect();
    let ae = diff.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let re = norm2(&diff) / star_norm;
    let mut support_size = 0;
    let mut exact_support = true;
    for (i, h) in beta_hat.iter().enumerate() {
        let nonzero = h.abs() > SUPPORT_THRESHOLD;
        support_size += usize::from(nonzero);
        if nonzero != truth.support.contains(i) {
            exact_support = false;
        }
    }
    Ok(TrialMetrics {
        ae,
        re,
        exact_support,
        support_size,
        wall_time_s: elapsed.as_secs_f64(),
        sign_consistent: sign_consistent(beta_hat, star),
        linf_within_bound: gamma_n.map(|g| ae < LINF_BOUND_FACTOR * g),
    })
}

/// Mutual coherence `max_{i != j} |x_i^T x_j| / n` of a normalized design.
pub fn coherence(x: &DesignMatrix) -> f64 {
    let p = x.p();
    if p < 2 {
        return 0.0;
    }
    let inv_n = 1.0 / x.n() as f64;
    let run = exec::for_work(x.n() * p * p / 2);
    run.map_indexed(p - 1, |i| {
        let ci = x.column(i);
        (i + 1..p).fold(0.0f64, |m, j| m.max(dot(ci, x.column(j)).abs() * inv_n))
    })
    .into_iter()
    .fold(0.0, f64::max)
}

/// `sigma * sqrt(4 ln p / n)`
pub fn gamma_n(sigma: f64, n: usize, p: usize) -> f64 {
    sigma * (4.0 * (p as f64).ln() / n as f64).sqrt()
}

pub fn check_conditions(x: &DesignMatrix, truth: &GroundTruth, sigma: f64) -> Result<ConditionReport> {
    check_len("beta_star", x.p(), truth.beta_star.len())?;
    let t = truth.support.len();
    let nu = coherence(x);
    let gamma = gamma_n(sigma, x.n(), x.p());
    let beta_min = truth
        .support
        .indices()
        .iter()
        .map(|&i| truth.beta_star[i].abs())
        .fold(f64::INFINITY, f64::min);
    let t_nu = t as f64 * nu;
    Ok(ConditionReport {
        t,
        nu,
        t_nu,
        gamma_n: gamma,
        c1_ok: beta_min >= BETA_MIN_FACTOR * gamma,
        c3_ok: t_nu <= 0.25,
        beta_min_ratio: beta_min / (BETA_MIN_FACTOR * gamma),
    })
}
