//! Parameter sweeps: the Cartesian product of value lists applied to a base
//! scenario, one summary row per grid point.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use bcklab::suite::Check;
use bcklab::Potential;
use serde::{Deserialize, Serialize};

use crate::scenario::{evaluate, Scenario};
use crate::{write_json, CliError, Status, VERSION};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub base: Scenario,
    pub grid: Grid,
}

/// Value lists per parameter. Absent axes keep the base value; an empty
/// list, or a grid with no axes at all, yields no rows.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Grid {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    #[serde(rename = "F", skip_serializing_if = "Option::is_none")]
    pub f: Option<Vec<f64>>,
    #[serde(rename = "A", skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub q0: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub qdot0: Option<Vec<f64>>,
}

pub type Point = BTreeMap<&'static str, f64>;

impl Grid {
    fn axes(&self) -> Vec<(&'static str, &[f64])> {
        [
            ("gamma", &self.gamma),
            ("F", &self.f),
            ("A", &self.a),
            ("alpha", &self.alpha),
            ("q0", &self.q0),
            ("qdot0", &self.qdot0),
        ]
        .into_iter()
        .filter_map(|(n, v)| v.as_deref().map(|v| (n, v)))
        .collect()
    }

    /// Grid points in row-major order over the axes as listed above.
    pub fn points(&self) -> Vec<Point> {
        let axes = self.axes();
        if axes.is_empty() {
            return Vec::new();
        }
        let mut out = vec![Point::new()];
        for (name, values) in axes {
            out = out
                .into_iter()
                .flat_map(|pt| {
                    values.iter().map(move |v| {
                        let mut next = pt.clone();
                        next.insert(name, *v);
                        next
                    })
                })
                .collect();
        }
        out
    }
}

/// Apply a grid point to the base scenario.
pub fn apply(base: &Scenario, pt: &Point, seed: u64) -> Result<Scenario, CliError> {
    let mut sc = base.clone();
    sc.seed = seed;
    for (&name, &v) in pt {
        match (name, &mut sc.potential) {
            ("gamma", _) => sc.gamma = v,
            ("F", Potential::Linear { f }) => *f = v,
            (
                "A",
                Potential::Quadratic { a }
                | Potential::Log { a }
                | Potential::Exp { a }
                | Potential::Power { a, .. },
            ) => *a = v,
            ("alpha", Potential::Power { alpha, .. }) => *alpha = v,
            ("q0", _) => sc.initial.iter_mut().for_each(|s| s.q = v),
            ("qdot0", _) => sc.initial.iter_mut().for_each(|s| s.qdot = v),
            (name, pot) => {
                return Err(CliError::Schema(format!(
                    "{name} does not apply to the {} potential",
                    pot.name()
                )))
            }
        }
    }
    Ok(sc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RowStatus {
    Pass,
    Fail,
    /// The grid point was not a valid scenario.
    Rejected,
    IntegrationFailure,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Row {
    pub index: usize,
    pub point: Point,
    pub status: RowStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<Check>,
}

pub fn run_row(base: &Scenario, index: usize, pt: Point) -> Row {
    let seed = base.seed.wrapping_add(index as u64);
    let outcome = apply(base, &pt, seed).and_then(|sc| evaluate(&sc));
    let (status, error, checks) = match outcome {
        Err(e) => (RowStatus::Rejected, Some(e.to_string()), Vec::new()),
        Ok(ev) => {
            let status = if ev.integration_error.is_some() {
                RowStatus::IntegrationFailure
            } else if ev.pass() {
                RowStatus::Pass
            } else {
                RowStatus::Fail
            };
            let mut errs = ev.errors;
            errs.extend(ev.integration_error);
            let error = if errs.is_empty() {
                None
            } else {
                Some(errs.join("; "))
            };
            (status, error, ev.checks)
        }
    };
    Row {
        index,
        point: pt,
        status,
        error,
        checks,
    }
}

/// Evaluate every grid point; rows keep grid order whatever the thread count.
pub fn run(cfg: &SweepConfig) -> Vec<Row> {
    let points: Vec<(usize, Point)> = cfg.grid.points().into_iter().enumerate().collect();
    let f = |(i, pt): (usize, Point)| run_row(&cfg.base, i, pt);
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        points.into_par_iter().map(f).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        points.into_iter().map(f).collect()
    }
}

#[derive(Debug, Serialize)]
struct SweepSummary<'a> {
    version: &'static str,
    sweep: &'a SweepConfig,
    rows: &'a [Row],
    pass: bool,
    runtime_ms: u64,
}

pub fn load(text: &str, seed: Option<u64>) -> Result<SweepConfig, CliError> {
    let mut cfg: SweepConfig =
        serde_json::from_str(text).map_err(|e| CliError::Schema(format!("sweep: {e}")))?;
    if let Some(s) = seed {
        cfg.base.seed = s;
    }
    Ok(cfg)
}

/// `sweep`: writes `sweep.json`; passes when every row passes.
pub fn sweep(cfg: &SweepConfig, out: &Path) -> Result<Status, CliError> {
    let start = Instant::now();
    let rows = run(cfg);
    let pass = rows.iter().all(|r| r.status == RowStatus::Pass);
    for r in &rows {
        let status = serde_json::to_value(r.status)
            .ok()
            .and_then(|v| v.as_str().map(str::to_owned))
            .unwrap_or_default();
        println!(
            "{:>4} {:?} {status}{}",
            r.index,
            r.point,
            r.error
                .as_deref()
                .map(|e| format!(": {e}"))
                .unwrap_or_default()
        );
    }
    std::fs::create_dir_all(out).map_err(|e| CliError::Io(format!("{}: {e}", out.display())))?;
    write_json(
        &out.join("sweep.json"),
        &SweepSummary {
            version: VERSION,
            sweep: cfg,
            rows: &rows,
            pass,
            runtime_ms: start.elapsed().as_millis() as u64,
        },
    )?;
    Ok(if pass { Status::Pass } else { Status::Fail })
}
