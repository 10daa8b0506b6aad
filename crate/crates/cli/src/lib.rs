//! Scenario runner, verification suite driver and parameter sweeps for the
//! damped-particle symmetry laboratory.
//!
//! Exit statuses: 0 when every check passes, 1 when a check fails, 2 for
//! schema or compatibility errors and 3 when an integration fails.

// `!(x <= tol)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod catalog;
pub mod output;
pub mod scenario;
pub mod sweep;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use bcklab::suite::{self, Check, SuiteConfig};
use serde::Serialize;

pub use scenario::{evaluate, Evaluation, Scenario};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error: {0}")]
    Schema(String),
    #[error("integration failed: {0}")]
    Integration(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema(_) | CliError::Io(_) => 2,
            CliError::Integration(_) => 3,
        }
    }
}

/// Overall result of a command.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Pass,
    Fail,
    IntegrationFailure,
}

impl Status {
    pub fn exit_code(self) -> u8 {
        match self {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::IntegrationFailure => 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

/// Summary document written next to the artifacts.
#[derive(Debug, Serialize)]
pub struct Summary<'a, S: Serialize> {
    pub version: &'static str,
    pub scenario: &'a S,
    pub checks: &'a [Check],
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    pub errors: &'a [String],
    #[serde(skip_serializing_if = "Option::is_none")]
    pub integration_error: Option<&'a str>,
    #[serde(skip_serializing_if = "<[String]>::is_empty")]
    pub artifacts: &'a [String],
    pub pass: bool,
    pub runtime_ms: u64,
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Schema(format!("cannot read {}: {e}", path.display())))
}

pub fn write_json(path: &Path, value: &impl Serialize) -> Result<(), CliError> {
    let text = serde_json::to_string_pretty(value).map_err(|e| CliError::Io(e.to_string()))?;
    fs::write(path, text + "\n").map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))
}

pub fn load_scenario(config: &Path, seed: Option<u64>) -> Result<Scenario, CliError> {
    let mut sc = Scenario::from_json(&read_text(config)?)?;
    if let Some(s) = seed {
        sc.seed = s;
    }
    Ok(sc)
}

fn status_of(ev: &Evaluation) -> Status {
    if ev.integration_error.is_some() {
        Status::IntegrationFailure
    } else if ev.pass() {
        Status::Pass
    } else {
        Status::Fail
    }
}

fn write_summary(
    out: &Path,
    sc: &Scenario,
    ev: &Evaluation,
    artifacts: &[String],
    start: Instant,
) -> Result<(), CliError> {
    let summary = Summary {
        version: VERSION,
        scenario: sc,
        checks: &ev.checks,
        errors: &ev.errors,
        integration_error: ev.integration_error.as_deref(),
        artifacts,
        pass: ev.pass(),
        runtime_ms: start.elapsed().as_millis() as u64,
    };
    write_json(&out.join("summary.json"), &summary)
}

/// `simulate`: integrate, write trajectories and the summary.
pub fn simulate(sc: &Scenario, out: &Path, format: Format) -> Result<Status, CliError> {
    let start = Instant::now();
    let ev = evaluate(sc)?;
    ensure_dir(out)?;
    let mut artifacts = Vec::new();
    let p = sc.params()?;
    for (k, tr) in ev.trajectories.iter().enumerate() {
        artifacts.push(output::write_trajectory(out, k, tr, sc, &p, format)?);
    }
    for (k, orbit) in ev.orbits.iter().enumerate() {
        artifacts.push(output::write_orbit(out, k, orbit, format)?);
    }
    write_summary(out, sc, &ev, &artifacts, start)?;
    Ok(status_of(&ev))
}

/// `verify --config`: run the checks and write only the summary.
pub fn verify_scenario(sc: &Scenario, out: &Path) -> Result<Status, CliError> {
    let start = Instant::now();
    let ev = evaluate(sc)?;
    ensure_dir(out)?;
    write_summary(out, sc, &ev, &[], start)?;
    for c in &ev.checks {
        println!(
            "[{}] {} ({:e} vs {:e})",
            if c.pass { "PASS" } else { "FAIL" },
            c.name,
            c.metric,
            c.tolerance
        );
    }
    Ok(status_of(&ev))
}

pub const PRESETS: [&str; 1] = ["paper-suite"];

#[derive(Debug, Serialize)]
struct PresetEcho {
    preset: &'static str,
    config: SuiteConfig,
}

/// `verify --preset paper-suite`: every acceptance criterion.
pub fn verify_preset(preset: &str, seed: Option<u64>, out: &Path) -> Result<Status, CliError> {
    let preset = PRESETS.into_iter().find(|p| *p == preset).ok_or_else(|| {
        CliError::Schema(format!(
            "unknown preset {preset:?}; known: {}",
            PRESETS.join(", ")
        ))
    })?;
    let start = Instant::now();
    let config = SuiteConfig {
        seed: seed.unwrap_or(scenario::DEFAULT_SEED),
        ..SuiteConfig::default()
    };
    let reports = suite::run_all(&config);
    let mut checks = Vec::new();
    let mut errors = Vec::new();
    for r in &reports {
        println!("{}", r.line());
        if let Some(e) = &r.error {
            errors.push(format!("criterion {}: {e}", r.number));
            checks.push(Check::at_most(
                format!("{}. {}", r.number, r.title),
                f64::NAN,
                0.0,
            ));
        }
        checks.extend(r.checks.iter().map(|c| Check {
            name: format!("{}. {}", r.number, c.name),
            ..c.clone()
        }));
    }
    let pass = reports.iter().all(|r| r.pass);
    ensure_dir(out)?;
    let echo = PresetEcho { preset, config };
    write_json(
        &out.join("summary.json"),
        &Summary {
            version: VERSION,
            scenario: &echo,
            checks: &checks,
            errors: &errors,
            integration_error: None,
            artifacts: &[],
            pass,
            runtime_ms: start.elapsed().as_millis() as u64,
        },
    )?;
    Ok(if pass { Status::Pass } else { Status::Fail })
}

/// Directory for artifacts: the flag, or `out` under the working directory.
pub fn out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.unwrap_or_else(|| PathBuf::from("out"))
}

/// Size the global worker pool; without the `parallel` feature this is a
/// no-op.
pub fn set_jobs(jobs: Option<usize>) -> Result<(), CliError> {
    #[cfg(feature = "parallel")]
    if let Some(n) = jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Schema(format!("--jobs {n}: {e}")))?;
    }
    #[cfg(not(feature = "parallel"))]
    let _ = jobs;
    Ok(())
}
