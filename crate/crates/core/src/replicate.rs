//! Replication harness: generate, solve the path, select, score, aggregate.
//!
//! Replication `r` draws its data with seed `scenario.seed + r`, so a
//! report depends only on its inputs and never on thread scheduling.

use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::metrics::{gamma_n, sign_consistent, trial_metrics, TrialMetrics, LINF_BOUND_FACTOR};
use crate::path::{select_information_criterion, sns_solve_path, PathConfig, PathStop};
use crate::simgen::{GeneratorInfo, SimScenario, GENERATOR_INFO};
use crate::types::normalize_columns;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Selection {
    /// Minimize the high-dimensional BIC along the path.
    InformationCriterion,
    /// Pick the path point closest to the truth in sup norm. Needs the truth,
    /// so it only measures whether the path passes near it.
    BestOnPathOracle,
}

impl Selection {
    pub fn label(self) -> &'static str {
        match self {
            Selection::InformationCriterion => "bic",
            Selection::BestOnPathOracle => "oracle",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReplicationRow {
    pub replication: usize,
    pub seed: u64,
    pub error: Option<String>,
    pub selected_index: Option<usize>,
    pub selected_lambda: Option<f64>,
    pub path_length: Option<usize>,
    pub stopped_by: Option<PathStop>,
    pub metrics: Option<TrialMetrics>,
    /// Some path point is sign consistent with sup-norm error below
    /// `(14/3) gamma_n`. Absent when `gamma_n` is zero.
    pub path_hits_bound: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub successes: usize,
    pub failures: usize,
    pub ae: f64,
    pub re: f64,
    /// Fraction of successful replications with exact support recovery.
    pub rp: f64,
    /// Mean selected support size.
    pub mean: f64,
    pub time_s: f64,
    pub sign_rate: f64,
    pub path_hit_rate: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReplicationReport {
    pub method: String,
    pub selection: Selection,
    pub scenario: SimScenario,
    pub reps: usize,
    pub gamma_n: f64,
    pub path_config: PathConfig,
    pub generator: GeneratorInfo,
    pub rows: Vec<ReplicationRow>,
    pub aggregate: Aggregate,
}

fn run_one(
    index: usize,
    scenario: &SimScenario,
    cfg: &PathConfig,
    selection: Selection,
    gamma: f64,
) -> ReplicationRow {
    let seed = scenario.seed.wrapping_add(index as u64);
    let mut row = ReplicationRow {
        replication: index,
        seed,
        error: None,
        selected_index: None,
        selected_lambda: None,
        path_length: None,
        stopped_by: None,
        metrics: None,
        path_hits_bound: None,
    };
    let outcome = (|| -> Result<()> {
        let scenario = scenario.with_seed(seed);
        let data = scenario.generate()?;
        let x = normalize_columns(data.x)?;
        let start = Instant::now();
        let path = sns_solve_path(&x, &data.y, cfg)?;
        let elapsed = start.elapsed();
        let raw: Vec<Vec<f64>> = path.points.iter().map(|pt| x.unscale(pt.beta())).collect();

        let chosen = match selection {
            Selection::InformationCriterion => select_information_criterion(&path, &x, &data.y)?,
            Selection::BestOnPathOracle => closest_to_truth(&raw, &data.truth.beta_star)?,
        };
        let gamma_opt = (gamma > 0.0).then_some(gamma);
        row.metrics = Some(trial_metrics(&raw[chosen], &data.truth, gamma_opt, elapsed)?);
        row.selected_index = Some(chosen);
        row.selected_lambda = Some(path.points[chosen].lambda);
        row.path_length = Some(path.points.len());
        row.stopped_by = Some(path.stopped_by);
        row.path_hits_bound = gamma_opt.map(|g| {
            raw.iter().any(|b| {
                sign_consistent(b, &data.truth.beta_star)
                    && sup_distance(b, &data.truth.beta_star) < LINF_BOUND_FACTOR * g
            })
        });
        Ok(())
    })();
    if let Err(e) = outcome {
        row.error = Some(e.to_string());
    }
    row
}

fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0f64, |m, (u, v)| m.max((u - v).abs()))
}

/// Index of the first point minimizing the sup-norm distance to `truth`.
pub fn closest_to_truth(points: &[Vec<f64>], truth: &[f64]) -> Result<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, b) in points.iter().enumerate() {
        let dist = sup_distance(b, truth);
        if best.is_none_or(|(_, d)| dist < d) {
            best = Some((i, dist));
        }
    }
    best.map(|(i, _)| i).ok_or(Error::EmptyPath)
}

pub fn run_replications(
    scenario: &SimScenario,
    reps: usize,
    path_cfg: &PathConfig,
    selection: Selection,
    exec: Execution,
) -> Result<ReplicationReport> {
    if reps == 0 {
        return Err(Error::InvalidConfig("reps must be at least 1".into()));
    }
    scenario.validate()?;
    path_cfg.validate()?;
    let gamma = gamma_n(scenario.sigma, scenario.n, scenario.p);
    let rows = exec.map_indexed(reps, |r| run_one(r, scenario, path_cfg, selection, gamma));
    let aggregate = aggregate(&rows);
    Ok(ReplicationReport {
        method: "SNS".into(),
        selection,
        scenario: *scenario,
        reps,
        gamma_n: gamma,
        path_config: path_cfg.clone(),
        generator: GENERATOR_INFO,
        rows,
        aggregate,
    })
}

pub fn aggregate(rows: &[ReplicationRow]) -> Aggregate {
    let ok: Vec<&TrialMetrics> = rows.iter().filter_map(|r| r.metrics.as_ref()).collect();
    let k = ok.len();
    let mean = |f: &dyn Fn(&TrialMetrics) -> f64| -> f64 {
        if k == 0 {
            f64::NAN
        } else {
            ok.iter().map(|m| f(m)).sum::<f64>() / k as f64
        }
    };
    let hits: Vec<bool> = rows.iter().filter_map(|r| r.path_hits_bound).collect();
    Aggregate {
        successes: k,
        failures: rows.len() - k,
        ae: mean(&|m| m.ae),
        re: mean(&|m| m.re),
        rp: mean(&|m| f64::from(u8::from(m.exact_support))),
        mean: mean(&|m| m.support_size as f64),
        time_s: mean(&|m| m.wall_time_s),
        sign_rate: mean(&|m| f64::from(u8::from(m.sign_consistent))),
        path_hit_rate: (!hits.is_empty())
            .then(|| hits.iter().filter(|h| **h).count() as f64 / hits.len() as f64),
    }
}

impl ReplicationReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report is serializable")
    }

    /// One table row in the layout
    /// `rho sigma Method AE RE(1e-2) RP MEAN Time(s)`.
    pub fn table_row(&self) -> String {
        let a = &self.aggregate;
        format!(
            "{:<6.2}{:<7.2}{:<8}{:>8.3}{:>10.3}{:>7.2}{:>8.2}{:>10.3}",
            self.scenario.rho,
            self.scenario.sigma,
            self.method,
            a.ae,
            a.re * 100.0,
            a.rp,
            a.mean,
            a.time_s
        )
    }
}

/// Plain-text table for one or more reports. RE is printed in units of 1e-2.
pub fn render_table(reports: &[ReplicationReport]) -> String {
    let mut out = String::new();
    if let Some(first) = reports.first() {
        let s = &first.scenario;
        out.push_str(&format!(
            "# n={} p={} T={} R={} design={:?} reps={} selection={}\n",
            s.n,
            s.p,
            s.t,
            s.r,
            s.design,
            first.reps,
            first.selection.label()
        ));
    }
    out.push_str(&format!(
        "{:<6}{:<7}{:<8}{:>8}{:>10}{:>7}{:>8}{:>10}\n",
        "rho", "sigma", "Method", "AE", "RE(1e-2)", "RP", "MEAN", "Time(s)"
    ));
    for r in reports {
        out.push_str(&r.table_row());
        out.push('\n');
        if r.aggregate.failures > 0 {
            out.push_str(&format!("#   {} failed replications\n", r.aggregate.failures));
        }
    }
    out
}

/// Removes wall-clock fields so reports can be compared across runs.
pub fn strip_timing(value: &mut Value) {
    match value {
        Value::Object(map) => {
            map.retain(|k, _| !matches!(k.as_str(), "wall_time_s" | "time_s" | "time_ms" | "elapsed_s"));
            map.values_mut().for_each(strip_timing);
        }
        Value::Array(items) => items.iter_mut().for_each(strip_timing),
        _ => {}
    }
}
