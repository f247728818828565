use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use nscreen::{Design, LsMethod, PathConfig, Selection, SimScenario};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(name = "nscreen", version, about = "Newton screening Lasso solvers")]
pub struct Cli {
    /// Worker threads; defaults to every core for `bench` and one elsewhere.
    #[arg(long, global = true, env = "NS_THREADS")]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Subcommand, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Solve one Lasso problem with Newton screening.
    Solve(SolveArgs),
    /// Compute a sequential Newton screening path.
    Path(PathArgs),
    /// Generate a simulated design, response and truth.
    Gen(GenArgs),
    /// Run replicated simulations and print a summary table.
    Bench(BenchArgs),
    /// Report coherence and signal-strength conditions of a design.
    Check(CheckArgs),
    /// Re-run the command recorded in a run manifest.
    Replay(ReplayArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Solve(_) => "solve",
            Command::Path(_) => "path",
            Command::Gen(_) => "gen",
            Command::Bench(_) => "bench",
            Command::Check(_) => "check",
            Command::Replay(_) => "replay",
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct Output {
    /// Output file; standard output when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Run manifest path; defaults to `<out>.manifest.json`, or standard error
    /// when writing to standard output.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LsArg {
    Auto,
    Direct,
    Cg,
}

impl From<LsArg> for LsMethod {
    fn from(a: LsArg) -> Self {
        match a {
            LsArg::Auto => LsMethod::Auto,
            LsArg::Direct => LsMethod::Direct,
            LsArg::Cg => LsMethod::ConjugateGradient,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct SolveArgs {
    /// Design matrix CSV (no header, one row per sample).
    #[arg(long)]
    pub x: PathBuf,
    /// Response CSV (one value per line).
    #[arg(long)]
    pub y: PathBuf,
    #[arg(long)]
    pub lambda: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_bar: f64,
    #[arg(long, default_value_t = 50)]
    pub max_iter: usize,
    #[arg(long, value_enum, default_value = "auto")]
    pub ls: LsArg,
    /// Initial coefficients on the normalized scale; zeros when absent.
    #[arg(long)]
    pub init_beta: Option<PathBuf>,
    /// Initial dual; the residual correlation of the initial coefficients when absent.
    #[arg(long)]
    pub init_d: Option<PathBuf>,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PathOpts {
    #[arg(long, default_value_t = 8.0 / 13.0)]
    pub alpha: f64,
    #[arg(long)]
    pub max_knots: Option<usize>,
    #[arg(long, default_value_t = 13.0 / 15.0)]
    pub lambda_bar_slope: f64,
    #[arg(long, default_value_t = 0.0)]
    pub lambda_bar_offset: f64,
    /// Undebiased path: slope and offset both zero.
    #[arg(long)]
    pub plain_lasso: bool,
    #[arg(long, value_enum, default_value = "auto")]
    pub ls: LsArg,
}

impl PathOpts {
    pub fn config(&self) -> PathConfig {
        let mut cfg = PathConfig {
            alpha: self.alpha,
            max_knots: self.max_knots,
            lambda_bar_slope: self.lambda_bar_slope,
            lambda_bar_offset: self.lambda_bar_offset,
            ..PathConfig::default()
        };
        if self.plain_lasso {
            cfg.lambda_bar_slope = 0.0;
            cfg.lambda_bar_offset = 0.0;
        }
        cfg.ns.ls_method = self.ls.into();
        cfg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectArg {
    Bic,
    None,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct PathArgs {
    #[arg(long)]
    pub x: PathBuf,
    #[arg(long)]
    pub y: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    pub path: PathOpts,
    #[arg(long, value_enum, default_value = "none")]
    pub select: SelectArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DesignArg {
    Ar1,
    Ma,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ScenarioOpts {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: usize,
    #[arg(long)]
    pub t: usize,
    #[arg(long)]
    pub r: f64,
    #[arg(long)]
    pub rho: f64,
    #[arg(long)]
    pub sigma: f64,
    #[arg(long, value_enum)]
    pub design: DesignArg,
    #[arg(long)]
    pub seed: u64,
}

impl ScenarioOpts {
    pub fn scenario(&self) -> SimScenario {
        SimScenario {
            n: self.n,
            p: self.p,
            t: self.t,
            r: self.r,
            rho: self.rho,
            sigma: self.sigma,
            design: match self.design {
                DesignArg::Ar1 => Design::Ar1,
                DesignArg::Ma => Design::MovingAverage,
            },
            seed: self.seed,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct GenArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scenario: ScenarioOpts,
    /// Writes `<prefix>_X.csv`, `<prefix>_y.csv` and `<prefix>_truth.json`.
    #[arg(long)]
    pub out_prefix: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SelectionArg {
    Bic,
    Oracle,
}

impl From<SelectionArg> for Selection {
    fn from(a: SelectionArg) -> Self {
        match a {
            SelectionArg::Bic => Selection::InformationCriterion,
            SelectionArg::Oracle => Selection::BestOnPathOracle,
        }
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct BenchArgs {
    #[command(flatten)]
    #[serde(flatten)]
    pub scenario: ScenarioOpts,
    #[arg(long, default_value_t = 100)]
    pub reps: usize,
    #[arg(long, value_enum, default_value = "bic")]
    pub selection: SelectionArg,
    #[command(flatten)]
    #[serde(flatten)]
    pub path: PathOpts,
    /// Report JSON file; printed to standard output when absent, with the
    /// table moved to standard error.
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct CheckArgs {
    #[arg(long)]
    pub x: PathBuf,
    /// JSON with a `beta_star` array (as written by `gen`), or a bare array.
    #[arg(long)]
    pub truth: Option<PathBuf>,
    #[arg(long, default_value_t = 0.0)]
    pub sigma: f64,
    #[command(flatten)]
    #[serde(flatten)]
    pub output: Output,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
pub struct ReplayArgs {
    pub manifest: PathBuf,
}
