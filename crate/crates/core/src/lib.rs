//! Lasso solvers built on a generalized Newton iteration with working-set
//! screening, a warm-started path variant, reference solvers, synthetic data
//! generators, and a replication harness.
//!
//! All solvers operate on a [`DesignMatrix`] whose columns are scaled to
//! `||x_j||_2 = sqrt(n)`. Use [`DesignMatrix::unscale`] to map coefficients
//! back to the raw design.

// `!(v > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod exec;
pub mod metrics;
pub mod ns;
pub mod oracle;
pub mod path;
pub mod prox;
pub mod replicate;
pub mod simgen;
pub mod types;

pub use error::{Error, Result};
pub use exec::Execution;
pub use metrics::{check_conditions, coherence, gamma_n, trial_metrics, ConditionReport, TrialMetrics};
pub use ns::{
    ns_iterate, ns_solve, restricted_ls_solve, working_set, LsMethod, NsConfig, NsResult, StopReason,
};
pub use path::{
    information_criterion, lambda_bar_schedule, lambda_zero, select_information_criterion, sns_solve_path,
    support_cap, PathConfig, PathPoint, PathStop, SolutionPath,
};
pub use prox::{kkt_residual, lasso_objective, soft_threshold, KktReport};
pub use replicate::{render_table, run_replications, strip_timing, ReplicationReport, Selection};
pub use simgen::{Design, GroundTruth, SimData, SimScenario};
pub use types::{normalize_columns, xty_over_n, xty_over_n_with, DesignMatrix, PrimalDualState, WorkingSet};
