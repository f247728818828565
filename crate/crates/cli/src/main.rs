mod args;
mod commands;
mod io;

use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use args::{Cli, Command};
use commands::Outcome;

pub const EXIT_IO: u8 = 1;
pub const EXIT_VALIDATION: u8 = 2;
pub const EXIT_ITERATION_CAP: u8 = 3;
pub const EXIT_SINGULAR: u8 = 4;
pub const EXIT_BENCH_FAILURES: u8 = 5;

#[derive(Debug)]
pub struct Failure {
    pub code: u8,
    pub message: String,
}

impl Failure {
    pub fn io(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_IO,
            message: message.into(),
        }
    }

    pub fn validation(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_VALIDATION,
            message: message.into(),
        }
    }
}

impl From<nscreen::Error> for Failure {
    fn from(e: nscreen::Error) -> Self {
        let code = match e.root() {
            nscreen::Error::SingularSystem { .. } | nscreen::Error::SingularNewtonSystem => EXIT_SINGULAR,
            _ => EXIT_VALIDATION,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct RunManifest {
    command: String,
    config_snapshot: Value,
    threads: Option<usize>,
    seeds: Vec<u64>,
    tool_version: String,
    outputs: Vec<String>,
    exit_code: u8,
    elapsed_s: f64,
}

#[cfg(feature = "parallel")]
fn in_pool<T: Send>(threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Failure::validation(format!("cannot build thread pool: {e}")))?;
    Ok(pool.install(f))
}

#[cfg(not(feature = "parallel"))]
fn in_pool<T: Send>(_threads: usize, f: impl FnOnce() -> T + Send) -> Result<T, Failure> {
    Ok(f())
}

fn dispatch(command: &Command) -> Result<Outcome, Failure> {
    match command {
        Command::Solve(a) => commands::solve(a),
        Command::Path(a) => commands::path(a),
        Command::Gen(a) => commands::gen(a),
        Command::Bench(a) => commands::bench(a),
        Command::Check(a) => commands::check(a),
        Command::Replay(_) => Err(Failure::validation("a manifest cannot replay another replay")),
    }
}

fn run(command: Command, threads: Option<usize>) -> Result<u8, Failure> {
    if let Command::Replay(r) = &command {
        let manifest: RunManifest = serde_json::from_value(io::read_json(&r.manifest)?)
            .map_err(|e| Failure::io(format!("{}: {e}", r.manifest.display())))?;
        let recorded: Command = serde_json::from_value(manifest.config_snapshot)
            .map_err(|e| Failure::io(format!("{}: {e}", r.manifest.display())))?;
        if let Command::Replay(_) = recorded {
            return Err(Failure::validation("a manifest cannot replay another replay"));
        }
        return run(recorded, threads.or(manifest.threads));
    }

    // 0 lets rayon pick every available core
    let workers = threads.unwrap_or(if matches!(command, Command::Bench(_)) {
        0
    } else {
        1
    });
    let start = Instant::now();
    let outcome = in_pool(workers, || dispatch(&command))??;
    let manifest = RunManifest {
        command: command.name().into(),
        config_snapshot: serde_json::to_value(&command).expect("arguments are serializable"),
        threads,
        seeds: outcome.seeds,
        tool_version: env!("CARGO_PKG_VERSION").into(),
        outputs: outcome.outputs.iter().map(|p| p.display().to_string()).collect(),
        exit_code: outcome.code,
        elapsed_s: start.elapsed().as_secs_f64(),
    };
    let value = serde_json::to_value(&manifest).expect("manifest is serializable");
    match &outcome.manifest {
        Some(path) => io::write_json_file(path, &value)?,
        None => eprintln!("{value}"),
    }
    Ok(outcome.code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command, cli.threads) {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
