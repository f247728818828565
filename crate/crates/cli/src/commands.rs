use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use nscreen::prox::dual_variable;
use nscreen::simgen::GENERATOR_INFO;
use nscreen::{
    check_conditions, coherence, lasso_objective, ns_solve, render_table, run_replications,
    select_information_criterion, sns_solve_path, DesignMatrix, Execution, GroundTruth, NsConfig,
    PrimalDualState, StopReason,
};
use serde_json::{json, Value};

use crate::args::{BenchArgs, CheckArgs, GenArgs, Output, PathArgs, SelectArg, SolveArgs};
use crate::io::{read_json, read_matrix, read_vector, sink, write_json_file, write_matrix, write_vector};
use crate::{Failure, EXIT_BENCH_FAILURES, EXIT_ITERATION_CAP};

/// What a finished command hands back for its manifest.
pub struct Outcome {
    pub code: u8,
    pub seeds: Vec<u64>,
    pub outputs: Vec<PathBuf>,
    /// `None` sends the manifest to standard error.
    pub manifest: Option<PathBuf>,
}

impl Outcome {
    fn for_output(output: &Output, code: u8, seeds: Vec<u64>) -> Self {
        let manifest = output
            .manifest
            .clone()
            .or_else(|| output.out.as_ref().map(|o| with_suffix(o, ".manifest.json")));
        Outcome {
            code,
            seeds,
            outputs: output.out.iter().cloned().collect(),
            manifest,
        }
    }
}

fn with_suffix(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

fn load_design(path: &Path) -> Result<DesignMatrix, Failure> {
    let (n, p, data) = read_matrix(path)?;
    Ok(DesignMatrix::from_row_major(n, p, &data)?)
}

fn expect_len(what: &str, expected: usize, found: usize) -> Result<(), Failure> {
    if expected == found {
        Ok(())
    } else {
        Err(Failure::validation(format!(
            "{what} has length {found}, expected {expected}"
        )))
    }
}

fn emit(
    out: Option<&Path>,
    write: impl FnOnce(&mut dyn Write) -> std::io::Result<()>,
) -> Result<(), Failure> {
    let mut w = sink(out)?;
    write(&mut *w)
        .and_then(|_| w.flush())
        .map_err(|e| Failure::io(format!("writing output: {e}")))
}

fn support_of(beta: &[f64]) -> Vec<usize> {
    (0..beta.len()).filter(|&i| beta[i] != 0.0).collect()
}

pub fn solve(a: &SolveArgs) -> Result<Outcome, Failure> {
    let x = load_design(&a.x)?;
    let y = read_vector(&a.y)?;
    expect_len("y", x.n(), y.len())?;
    let beta = match &a.init_beta {
        Some(path) => read_vector(path)?,
        None => vec![0.0; x.p()],
    };
    expect_len("initial beta", x.p(), beta.len())?;
    let d = match &a.init_d {
        Some(path) => read_vector(path)?,
        None => dual_variable(&x, &y, &beta)?,
    };
    expect_len("initial d", x.p(), d.len())?;
    let init = PrimalDualState::new(beta, d, a.lambda, a.lambda_bar)?;
    let cfg = NsConfig {
        max_iter: a.max_iter,
        ls_method: a.ls.into(),
        ..NsConfig::new(a.lambda).with_lambda_bar(a.lambda_bar)
    };

    let start = Instant::now();
    let res = ns_solve(&x, &y, &cfg, &init)?;
    let elapsed = start.elapsed();

    let beta = &res.state.beta;
    let report = json!({
        "lambda": a.lambda,
        "lambda_bar": a.lambda_bar,
        "beta": beta,
        "beta_raw": x.unscale(beta),
        "support": support_of(beta),
        "d": res.state.d,
        "iterations": res.iterations,
        "converged_by": res.converged_by,
        "kkt_residual": res.kkt.residual_inf,
        "dual_feasibility": res.kkt.dual_feasibility,
        "objective": lasso_objective(&x, &y, beta, a.lambda)?,
        "cg_stalls": res.cg_stalls,
        "time_ms": elapsed.as_secs_f64() * 1e3,
    });
    emit(a.output.out.as_deref(), |w| writeln!(w, "{report}"))?;
    let code = match res.converged_by {
        StopReason::WorkingSetFixedPoint => 0,
        StopReason::IterationCap => EXIT_ITERATION_CAP,
    };
    Ok(Outcome::for_output(&a.output, code, Vec::new()))
}

pub fn path(a: &PathArgs) -> Result<Outcome, Failure> {
    let x = load_design(&a.x)?;
    let y = read_vector(&a.y)?;
    expect_len("y", x.n(), y.len())?;
    let cfg = a.path.config();
    let path = sns_solve_path(&x, &y, &cfg)?;
    let selected = match a.select {
        SelectArg::Bic => Some(select_information_criterion(&path, &x, &y)?),
        SelectArg::None => None,
    };

    emit(a.output.out.as_deref(), |w| {
        for pt in &path.points {
            let beta = pt.beta();
            let nonzero: Vec<(usize, f64)> = support_of(beta).into_iter().map(|i| (i, beta[i])).collect();
            let line = json!({
                "m": pt.m,
                "lambda": pt.lambda,
                "lambda_bar": pt.lambda_bar,
                "support": nonzero.len(),
                "beta_nonzero": nonzero,
                "iterations": pt.result.iterations,
                "converged_by": pt.result.converged_by,
                "kkt_residual": pt.result.kkt.residual_inf,
                "time_ms": pt.wall_time.as_secs_f64() * 1e3,
            });
            writeln!(w, "{line}")?;
        }
        let footer = json!({
            "footer": true,
            "lambda0": path.lambda0,
            "support_cap": path.support_cap,
            "knots": path.points.len(),
            "stopped_by": path.stopped_by,
            "selected": selected,
            "selected_m": selected.map(|i| path.points[i].m),
            "column_scales": x.column_scales(),
        });
        writeln!(w, "{footer}")
    })?;
    Ok(Outcome::for_output(&a.output, 0, Vec::new()))
}

pub fn gen(a: &GenArgs) -> Result<Outcome, Failure> {
    let scenario = a.scenario.scenario();
    let data = scenario.generate()?;
    let x_path = with_suffix(&a.out_prefix, "_X.csv");
    let y_path = with_suffix(&a.out_prefix, "_y.csv");
    let truth_path = with_suffix(&a.out_prefix, "_truth.json");

    write_matrix(&x_path, data.x.nrows(), data.x.ncols(), |i, j| data.x[(i, j)])?;
    write_vector(&y_path, &data.y)?;
    write_json_file(
        &truth_path,
        &json!({
            "beta_star": data.truth.beta_star,
            "support": data.truth.support.indices(),
            "signs": data.truth.signs,
            "scenario": scenario,
            "generator": GENERATOR_INFO,
        }),
    )?;
    Ok(Outcome {
        code: 0,
        seeds: vec![scenario.seed],
        outputs: vec![x_path, y_path, truth_path],
        manifest: Some(with_suffix(&a.out_prefix, "_manifest.json")),
    })
}

pub fn bench(a: &BenchArgs) -> Result<Outcome, Failure> {
    let scenario = a.scenario.scenario();
    let cfg = a.path.config();
    let report = run_replications(&scenario, a.reps, &cfg, a.selection.into(), Execution::default())?;
    let table = render_table(std::slice::from_ref(&report));
    let json = serde_json::to_string_pretty(&report.to_json()).expect("json value");
    match &a.output.out {
        Some(path) => {
            emit(Some(path), |w| writeln!(w, "{json}"))?;
            print!("{table}");
        }
        None => {
            emit(None, |w| writeln!(w, "{json}"))?;
            eprint!("{table}");
        }
    }
    let agg = &report.aggregate;
    for row in report.rows.iter().filter(|r| r.error.is_some()) {
        eprintln!(
            "replication {} (seed {}) failed: {}",
            row.replication,
            row.seed,
            row.error.as_deref().unwrap_or_default()
        );
    }
    let code = if agg.successes * 10 >= a.reps * 9 {
        0
    } else {
        EXIT_BENCH_FAILURES
    };
    let seeds = report.rows.iter().map(|r| r.seed).collect();
    Ok(Outcome::for_output(&a.output, code, seeds))
}

fn beta_star_from(value: &Value) -> Option<Vec<f64>> {
    let arr = match value {
        Value::Array(_) => value,
        Value::Object(map) => map.get("beta_star")?,
        _ => return None,
    };
    arr.as_array()?.iter().map(Value::as_f64).collect()
}

pub fn check(a: &CheckArgs) -> Result<Outcome, Failure> {
    let x = load_design(&a.x)?;
    let mut report = match &a.truth {
        Some(path) => {
            let beta = beta_star_from(&read_json(path)?).ok_or_else(|| {
                Failure::io(format!(
                    "{}: expected a beta_star array of numbers",
                    path.display()
                ))
            })?;
            let truth = GroundTruth::from_beta(beta)?;
            serde_json::to_value(check_conditions(&x, &truth, a.sigma)?).expect("report is serializable")
        }
        None => json!({ "nu": coherence(&x) }),
    };
    let map = report.as_object_mut().expect("object");
    map.insert("n".into(), x.n().into());
    map.insert("p".into(), x.p().into());
    emit(a.output.out.as_deref(), |w| writeln!(w, "{report}"))?;
    Ok(Outcome::for_output(&a.output, 0, Vec::new()))
}
