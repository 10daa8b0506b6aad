//! Trajectory artifacts in CSV or JSON.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use bcklab::central3d::{cross, Trajectory3D};
use bcklab::dynamics::Trajectory;
use bcklab::integrals::eval_integral;
use bcklab::Params;
use serde::Serialize;

use crate::{CliError, Format, Scenario};

#[derive(Serialize)]
struct Table<'a> {
    columns: Vec<&'a str>,
    rows: Vec<Vec<f64>>,
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

fn io(path: &Path) -> impl Fn(std::io::Error) -> CliError + '_ {
    move |e| CliError::Io(format!("{}: {e}", path.display()))
}

fn write_table(path: &Path, columns: Vec<&str>, rows: Vec<Vec<f64>>) -> Result<(), CliError> {
    let mut w = create(path)?;
    serde_json::to_writer(&mut w, &Table { columns, rows })
        .map_err(|e| CliError::Io(e.to_string()))?;
    w.flush().map_err(io(path))
}

/// Writes `trajectory_<k>.csv|json`; requested integrals become extra
/// columns, NaN where an integral is singular.
pub fn write_trajectory(
    dir: &Path,
    k: usize,
    tr: &Trajectory,
    sc: &Scenario,
    p: &Params,
    format: Format,
) -> Result<String, CliError> {
    let ids = &sc.checks.integrals;
    let extra: Vec<Vec<f64>> = ids
        .iter()
        .map(|id| {
            tr.states()
                .map(|s| eval_integral(*id, &sc.potential, p, s).unwrap_or(f64::NAN))
                .collect()
        })
        .collect();
    let names: Vec<String> = ids.iter().map(|id| id.to_string()).collect();
    match format {
        Format::Csv => {
            let name = format!("trajectory_{k}.csv");
            let path = dir.join(&name);
            let cols: Vec<(&str, &[f64])> = names
                .iter()
                .map(String::as_str)
                .zip(extra.iter().map(Vec::as_slice))
                .collect();
            let mut w = create(&path)?;
            tr.write_csv(&mut w, &cols).map_err(io(&path))?;
            w.flush().map_err(io(&path))?;
            Ok(name)
        }
        Format::Json => {
            let name = format!("trajectory_{k}.json");
            let mut columns = vec!["t", "q", "qdot", "action"];
            columns.extend(names.iter().map(String::as_str));
            let rows = tr
                .samples
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    let mut row = vec![s.state.t, s.state.q, s.state.qdot, s.action];
                    row.extend(extra.iter().map(|col| col[i]));
                    row
                })
                .collect();
            write_table(&dir.join(&name), columns, rows)?;
            Ok(name)
        }
    }
}

/// Writes `orbit_<k>.csv|json` with columns `t,x,y,z,vx,vy,vz,lx,ly,lz`.
pub fn write_orbit(
    dir: &Path,
    k: usize,
    orbit: &Trajectory3D,
    format: Format,
) -> Result<String, CliError> {
    match format {
        Format::Csv => {
            let name = format!("orbit_{k}.csv");
            let path = dir.join(&name);
            let mut w = create(&path)?;
            orbit.write_csv(&mut w).map_err(io(&path))?;
            w.flush().map_err(io(&path))?;
            Ok(name)
        }
        Format::Json => {
            let name = format!("orbit_{k}.json");
            let columns = vec!["t", "x", "y", "z", "vx", "vy", "vz", "lx", "ly", "lz"];
            let rows = orbit
                .samples
                .iter()
                .map(|smp| {
                    let s = &smp.state;
                    let mut row = vec![s.t];
                    row.extend(s.r);
                    row.extend(s.v);
                    row.extend(cross(&s.r, &s.v));
                    row
                })
                .collect();
            write_table(&dir.join(&name), columns, rows)?;
            Ok(name)
        }
    }
}
