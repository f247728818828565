//! Sequential Newton screening along a decreasing regularization grid.
//!
//! The path starts from the exact solution `(0, X^T y / n)` at
//! `lambda_0 = ||X^T y / n||_inf`, then walks `lambda_m = lambda_0 * alpha^m`,
//! warm-starting every knot from the previous one. It stops once the fitted
//! support exceeds `floor(n / ln p)`, once a knot's working set outgrows `n`
//! (the restricted least-squares problem is then rank deficient, so the fit
//! could only get denser), or when the knot budget runs out.

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ns::{ns_solve_with_xty, NsConfig, NsResult};
use crate::prox::residual;
use crate::types::{norm_inf, xty_over_n, DesignMatrix, PrimalDualState};

pub const DEFAULT_ALPHA: f64 = 8.0 / 13.0;
pub const DEFAULT_LAMBDA_BAR_SLOPE: f64 = 13.0 / 15.0;

/// Grid depth reached by the default knot budget, relative to `lambda_0`.
const DEFAULT_GRID_FLOOR: f64 = 1e-3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathConfig {
    pub alpha: f64,
    /// `None` uses enough knots to reach `1e-3 * lambda_0`.
    pub max_knots: Option<usize>,
    pub lambda_bar_slope: f64,
    pub lambda_bar_offset: f64,
    /// Template for every knot; `lambda` and `lambda_bar` are overwritten.
    pub ns: NsConfig,
    pub support_cap_override: Option<usize>,
    /// Explicit decreasing grid replacing the geometric one.
    pub lambda_grid: Option<Vec<f64>>,
}

impl Default for PathConfig {
    fn default() -> Self {
        PathConfig {
            alpha: DEFAULT_ALPHA,
            max_knots: None,
            lambda_bar_slope: DEFAULT_LAMBDA_BAR_SLOPE,
            lambda_bar_offset: 0.0,
            ns: NsConfig::new(1.0),
            support_cap_override: None,
            lambda_grid: None,
        }
    }
}

impl PathConfig {
    /// Undebiased Lasso path: `lambda_bar = 0` at every knot.
    pub fn plain_lasso() -> Self {
        PathConfig {
            lambda_bar_slope: 0.0,
            lambda_bar_offset: 0.0,
            ..PathConfig::default()
        }
    }

    pub fn knot_budget(&self) -> usize {
        self.max_knots
            .unwrap_or_else(|| (DEFAULT_GRID_FLOOR.ln() / self.alpha.ln()).ceil() as usize)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return bad(format!("alpha must lie in (0, 1), got {}", self.alpha));
        }
        if self.max_knots == Some(0) {
            return bad("max_knots must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.lambda_bar_slope) {
            return bad(format!(
                "lambda_bar slope must lie in [0, 1), got {}",
                self.lambda_bar_slope
            ));
        }
        if !(self.lambda_bar_offset >= 0.0 && self.lambda_bar_offset.is_finite()) {
            return bad(format!(
                "lambda_bar offset must be nonnegative, got {}",
                self.lambda_bar_offset
            ));
        }
        if self.support_cap_override == Some(0) {
            return bad("support cap must be positive".into());
        }
        if let Some(grid) = &self.lambda_grid {
            if grid.is_empty() {
                return bad("explicit lambda grid is empty".into());
            }
            if grid.iter().any(|l| !(*l > 0.0 && l.is_finite())) {
                return bad("explicit lambda grid must be positive".into());
            }
            if grid.windows(2).any(|w| w[1] >= w[0]) {
                return bad("explicit lambda grid must be strictly decreasing".into());
            }
        }
        let mut probe = self.ns;
        probe.lambda = 1.0;
        probe.lambda_bar = 0.0;
        probe.validate()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PathStop {
    SupportCap,
    KnotBudget,
    /// A knot's working set exceeded `n`; that knot is not part of the path.
    WorkingSetOverflow {
        knot: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathPoint {
    /// 1-based knot index.
    pub m: usize,
    pub lambda: f64,
    pub lambda_bar: f64,
    pub result: NsResult,
    pub wall_time: Duration,
}

impl PathPoint {
    pub fn beta(&self) -> &[f64] {
        &self.result.state.beta
    }

    pub fn support_size(&self) -> usize {
        self.beta().iter().filter(|b| **b != 0.0).count()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolutionPath {
    pub points: Vec<PathPoint>,
    pub lambda0: f64,
    pub stopped_by: PathStop,
    pub support_cap: usize,
}

/// `||X^T y / n||_inf`, the smallest `lambda` with an all-zero solution.
pub fn lambda_zero(x: &DesignMatrix, y: &[f64]) -> Result<f64> {
    let l0 = norm_inf(&xty_over_n(x, y)?);
    if l0 > 0.0 {
        Ok(l0)
    } else {
        Err(Error::DegenerateResponse)
    }
}

/// `slope * lambda_m + offset`, clamped to `[0, lambda_m)`.
pub fn lambda_bar_schedule(lambda_m: f64, cfg: &PathConfig) -> f64 {
    let raw = cfg.lambda_bar_slope * lambda_m + cfg.lambda_bar_offset;
    let ceiling = lambda_m - 1e-12 * lambda_m.max(1.0);
    raw.min(ceiling).max(0.0)
}

/// `floor(n / ln p)`.
pub fn support_cap(n: usize, p: usize) -> usize {
    (n as f64 / (p as f64).ln()).floor() as usize
}

pub fn sns_solve_path(x: &DesignMatrix, y: &[f64], cfg: &PathConfig) -> Result<SolutionPath> {
    cfg.validate()?;
    if x.p() < 2 {
        return Err(Error::InvalidDimensions(
            "a solution path needs at least two features".into(),
        ));
    }
    let xty = xty_over_n(x, y)?;
    let lambda0 = norm_inf(&xty);
    if !(lambda0 > 0.0) {
        return Err(Error::DegenerateResponse);
    }
    let cap = cfg
        .support_cap_override
        .unwrap_or_else(|| support_cap(x.n(), x.p()));

    let grid: Vec<f64> = match &cfg.lambda_grid {
        Some(g) => g.clone(),
        None => (1..=cfg.knot_budget())
            .map(|m| lambda0 * cfg.alpha.powi(m as i32))
            .collect(),
    };

    let mut state = PrimalDualState {
        beta: vec![0.0; x.p()],
        d: xty.clone(),
        lambda: lambda0,
        lambda_bar: 0.0,
    };
    let mut points = Vec::with_capacity(grid.len());
    let mut stopped_by = PathStop::KnotBudget;
    for (k, &lambda) in grid.iter().enumerate() {
        let m = k + 1;
        let lambda_bar = lambda_bar_schedule(lambda, cfg);
        let ns = NsConfig {
            lambda,
            lambda_bar,
            ..cfg.ns
        };
        let start = Instant::now();
        let result = match ns_solve_with_xty(x, y, &xty, &ns, &state) {
            Ok(r) => r,
            Err(Error::SingularSystem { size }) if size > x.n() && !points.is_empty() => {
                stopped_by = PathStop::WorkingSetOverflow { knot: m };
                break;
            }
            Err(e) => {
                return Err(Error::Knot {
                    knot: m,
                    source: Box::new(e),
                })
            }
        };
        let wall_time = start.elapsed();
        state = result.state.clone();
        let point = PathPoint {
            m,
            lambda,
            lambda_bar,
            result,
            wall_time,
        };
        let over_cap = point.support_size() > cap;
        points.push(point);
        if over_cap {
            stopped_by = PathStop::SupportCap;
            break;
        }
    }
    Ok(SolutionPath {
        points,
        lambda0,
        stopped_by,
        support_cap: cap,
    })
}

/// High-dimensional BIC: `n ln(RSS / n) + |supp| ln(n) ln(ln p)`.
pub fn information_criterion(x: &DesignMatrix, y: &[f64], beta: &[f64]) -> Result<f64> {
    let r = residual(x, y, beta)?;
    let n = x.n() as f64;
    let rss: f64 = r.iter().map(|v| v * v).sum();
    let k = beta.iter().filter(|b| **b != 0.0).count() as f64;
    Ok(n * (rss.max(f64::MIN_POSITIVE) / n).ln() + k * n.ln() * (x.p() as f64).ln().ln())
}

/// Index of the path point minimizing [`information_criterion`].
///
/// A final point that broke the support cap is skipped unless it is the
/// only point. Ties go to the earlier (sparser) point.
pub fn select_information_criterion(path: &SolutionPath, x: &DesignMatrix, y: &[f64]) -> Result<usize> {
    if path.points.is_empty() {
        return Err(Error::EmptyPath);
    }
    let mut candidates = path.points.len();
    if path.stopped_by == PathStop::SupportCap && candidates > 1 {
        candidates -= 1;
    }
    let mut best = (0, f64::INFINITY);
    for (i, point) in path.points[..candidates].iter().enumerate() {
        let score = information_criterion(x, y, point.beta())?;
        if score < best.1 {
            best = (i, score);
        }
    }
    Ok(best.0)
}
