//! Scenario schema, validation and evaluation of the requested checks.

use std::collections::BTreeSet;

use bcklab::action::{action_mismatch, nonlocal_constant, weak_constant_dt};
use bcklab::canonical::{chart_consistency, ChartId};
use bcklab::central3d::{
    central_energy_integral, integrate3d, orbit_report, State3D, Trajectory3D,
};
use bcklab::dynamics::{integrate, IntegratorConfig, Trajectory};
use bcklab::integrals::{drift, FirstIntegral, IntegralId};
use bcklab::lagrangian::{Bck, Lagrangian};
use bcklab::sampling::{self, Region};
use bcklab::suite::Check;
use bcklab::symmetry::catalog::{Catalog, Kind};
use bcklab::symmetry::{lie_residual, rund_trautman_residual, Generator};
use bcklab::{Error, Params, Potential, State1D};
use serde::{Deserialize, Deserializer, Serialize};

use crate::CliError;

pub const DEFAULT_SEED: u64 = 42;

fn default_seed() -> u64 {
    DEFAULT_SEED
}

fn default_samples() -> usize {
    1000
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub potential: Potential,
    pub gamma: f64,
    /// One-dimensional initial conditions; a single object is accepted too.
    #[serde(default, deserialize_with = "one_or_many")]
    pub initial: Vec<State1D>,
    /// Initial conditions for the central problem.
    #[serde(default, deserialize_with = "one_or_many")]
    pub initial3d: Vec<State3D>,
    pub t_end: f64,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub checks: Checks,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// Random points per residual check.
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
}

fn one_or_many<'de, D, T>(d: D) -> Result<Vec<T>, D::Error>
where
    D: Deserializer<'de>,
    T: Deserialize<'de>,
{
    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Either<T> {
        One(T),
        Many(Vec<T>),
    }
    Ok(match Either::deserialize(d)? {
        Either::One(x) => vec![x],
        Either::Many(v) => v,
    })
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Checks {
    /// First integrals whose drift is measured along each trajectory.
    pub integrals: Vec<IntegralId>,
    pub charts: Vec<ChartId>,
    /// Catalog generators, by name, for the residual checks.
    pub symmetries: Vec<String>,
    /// `H + 2γA` and the action reconstruction.
    pub weak_constant: bool,
    /// Generators whose non-local constant is tracked.
    pub nonlocal: Vec<String>,
    pub central3d: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub drift: f64,
    pub rund_trautman: f64,
    pub lie: f64,
    pub chart_drift: f64,
    pub chart_pointwise: f64,
    pub chart_dq_dt: f64,
    pub weak_constant: f64,
    pub action: f64,
    pub nonlocal: f64,
    pub orbit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            drift: 1e-7,
            rund_trautman: 1e-10,
            lie: 1e-8,
            chart_drift: 1e-7,
            chart_pointwise: 1e-9,
            chart_dq_dt: 1e-5,
            weak_constant: 1e-7,
            action: 1e-7,
            nonlocal: 1e-6,
            orbit: 1e-8,
        }
    }
}

impl Scenario {
    pub fn from_json(text: &str) -> Result<Scenario, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Schema(format!("scenario: {e}")))
    }

    pub fn params(&self) -> Result<Params, CliError> {
        Params::new(self.gamma).map_err(schema)
    }

    /// Compatibility rules that can be decided before integrating.
    pub fn validate(&self) -> Result<(), CliError> {
        let p = self.params()?;
        let pot = &self.potential;
        pot.validate().map_err(schema)?;
        self.integrator.validate().map_err(schema)?;
        if self.initial.is_empty() && self.initial3d.is_empty() {
            return Err(CliError::Schema("no initial condition given".into()));
        }
        if !(self.t_end.is_finite()) || self.t_end > p.max_horizon() {
            return Err(CliError::Schema(format!(
                "t_end = {} exceeds the horizon {} allowed by the exponent cap",
                self.t_end,
                p.max_horizon()
            )));
        }
        for ic in &self.initial {
            if !(self.t_end > ic.t) {
                return Err(CliError::Schema(format!(
                    "t_end must exceed the initial time {}",
                    ic.t
                )));
            }
            if !ic.is_finite() || !pot.in_domain(ic.q) {
                return Err(schema(Error::Domain {
                    potential: pot.name(),
                    q: ic.q,
                }));
            }
        }
        for ic in &self.initial3d {
            if !(self.t_end > ic.t) || !ic.is_finite() {
                return Err(CliError::Schema(format!(
                    "invalid 3D initial condition {ic:?}"
                )));
            }
        }
        for id in &self.checks.integrals {
            FirstIntegral::bind(*id, *pot, p).map_err(schema)?;
        }
        for chart in &self.checks.charts {
            FirstIntegral::bind(chart.integral(), *pot, p).map_err(schema)?;
        }
        let cat = Catalog::build(pot, &p);
        for name in self.checks.symmetries.iter().chain(&self.checks.nonlocal) {
            if cat.get(name).is_none() {
                return Err(CliError::Schema(format!(
                    "no generator {name:?} for the {} potential",
                    pot.name()
                )));
            }
        }
        if self.checks.central3d && self.initial3d.is_empty() {
            return Err(CliError::Schema("central3d checks need initial3d".into()));
        }
        let one_dimensional = !self.checks.integrals.is_empty()
            || !self.checks.charts.is_empty()
            || self.checks.weak_constant
            || !self.checks.nonlocal.is_empty();
        if one_dimensional && self.initial.is_empty() {
            return Err(CliError::Schema(
                "one-dimensional checks need initial".into(),
            ));
        }
        let ids: BTreeSet<_> = self.checks.integrals.iter().collect();
        if ids.len() != self.checks.integrals.len() {
            return Err(CliError::Schema("integrals listed twice".into()));
        }
        Ok(())
    }
}

pub fn schema(e: Error) -> CliError {
    CliError::Schema(e.to_string())
}

/// Checks and trajectories of one evaluated scenario.
#[derive(Debug, Default)]
pub struct Evaluation {
    pub checks: Vec<Check>,
    /// Problems met while computing a check; the check itself fails.
    pub errors: Vec<String>,
    /// Integration failure, if any; evaluation stops there.
    pub integration_error: Option<String>,
    pub trajectories: Vec<Trajectory>,
    pub orbits: Vec<Trajectory3D>,
}

impl Evaluation {
    pub fn pass(&self) -> bool {
        self.integration_error.is_none() && self.checks.iter().all(|c| c.pass)
    }

    fn push(&mut self, name: String, outcome: bcklab::Result<(f64, f64)>, above: bool) {
        match outcome {
            Ok((metric, tol)) if above => self.checks.push(Check::above(name, metric, tol)),
            Ok((metric, tol)) => self.checks.push(Check::at_most(name, metric, tol)),
            Err(e) => {
                self.errors.push(format!("{name}: {e}"));
                self.checks.push(Check::at_most(name, f64::NAN, 0.0));
            }
        }
    }
}

fn suffix(k: usize, n: usize) -> String {
    if n > 1 {
        format!(" [{k}]")
    } else {
        String::new()
    }
}

/// Validate, integrate and run every requested check.
pub fn evaluate(sc: &Scenario) -> Result<Evaluation, CliError> {
    sc.validate()?;
    let p = sc.params()?;
    let pot = sc.potential;
    let tol = sc.tolerances;
    let cat = Catalog::build(&pot, &p);
    let mut ev = Evaluation::default();

    symmetry_checks(sc, &cat, &p, &mut ev);

    let n = sc.initial.len();
    for (k, ic) in sc.initial.iter().enumerate() {
        let tr = match integrate(&pot, &p, *ic, sc.t_end, &sc.integrator) {
            Ok(tr) => tr,
            Err(e) => {
                ev.integration_error = Some(format!("initial condition {k}: {e}"));
                return Ok(ev);
            }
        };
        let sfx = suffix(k, n);
        for id in &sc.checks.integrals {
            let r = drift(&tr, *id, &pot, &p).map(|d| (d.normalized, tol.drift));
            ev.push(format!("drift {id}{sfx}"), r, false);
        }
        for chart in &sc.checks.charts {
            match chart_consistency(*chart, &tr, &pot, &p) {
                Ok(r) => {
                    ev.push(
                        format!("chart {chart} H~ drift{sfx}"),
                        Ok((r.htilde_drift, tol.chart_drift)),
                        false,
                    );
                    ev.push(
                        format!(
                            "chart {chart} H~ = {} * {}{sfx}",
                            r.factor, r.equals_integral
                        ),
                        Ok((r.pointwise, tol.chart_pointwise)),
                        false,
                    );
                    ev.push(
                        format!("chart {chart} dQ/dT{sfx}"),
                        Ok((r.dq_dt, tol.chart_dq_dt)),
                        false,
                    );
                }
                Err(e) => ev.push(format!("chart {chart}{sfx}"), Err(e), false),
            }
        }
        if sc.checks.weak_constant {
            let w = weak_constant_dt(&tr, &pot, &p).map(|w| (w.drift, tol.weak_constant));
            ev.push(format!("weak constant H + 2γA{sfx}"), w, false);
            let a = action_mismatch(&tr, &pot, &p).map(|m| (m, tol.action));
            ev.push(format!("reconstructed action{sfx}"), a, false);
        }
        for name in &sc.checks.nonlocal {
            let gen = &cat.get(name).expect("validated").generator;
            let r = nonlocal_constant(gen, &tr, &pot, &p).map(|w| (w.drift, tol.nonlocal));
            ev.push(format!("nonlocal constant {name}{sfx}"), r, false);
        }
        for name in &sc.checks.symmetries {
            let e = cat.get(name).expect("validated");
            // on-flow residual at the sampled states of this trajectory
            let worst = tr
                .states()
                .try_fold((0.0f64, f64::INFINITY), |(hi, lo), s| {
                    lie_residual(&e.generator, &pot, &p, s)
                        .map(|r| (hi.max(r.relative()), lo.min(r.value.abs())))
                });
            // q∂q rescales solutions of linear homogeneous equations
            let scaling = matches!(pot, Potential::Free | Potential::Quadratic { .. });
            if e.kind == Kind::Control && !scaling {
                ev.push(
                    format!("Lie residual {name} nonzero{sfx}"),
                    worst.map(|w| (w.1, 0.0)),
                    true,
                );
            } else {
                ev.push(
                    format!("Lie residual {name}{sfx}"),
                    worst.map(|w| (w.0, tol.lie)),
                    false,
                );
            }
        }
        ev.trajectories.push(tr);
    }

    let n3 = sc.initial3d.len();
    for (k, ic) in sc.initial3d.iter().enumerate() {
        let orbit = match integrate3d(&pot, &p, *ic, sc.t_end, &sc.integrator) {
            Ok(o) => o,
            Err(e) => {
                ev.integration_error = Some(format!("3D initial condition {k}: {e}"));
                return Ok(ev);
            }
        };
        if sc.checks.central3d {
            let sfx = suffix(k, n3);
            match orbit_report(&orbit, &p) {
                Ok(r) => {
                    ev.push(
                        format!("angular momentum drift{sfx}"),
                        Ok((r.angular_momentum_drift, tol.orbit)),
                        false,
                    );
                    ev.push(
                        format!("planarity{sfx}"),
                        Ok((r.planarity, tol.orbit)),
                        false,
                    );
                    ev.push(
                        format!("areal velocity{sfx}"),
                        Ok((r.areal_velocity, tol.orbit)),
                        false,
                    );
                }
                Err(e) => ev.push(format!("orbit{sfx}"), Err(e), false),
            }
            let id = match pot {
                Potential::Log { .. } => Some(IntegralId::IV1),
                Potential::Power { .. } => Some(IntegralId::IV2),
                _ => None,
            };
            if let Some(id) = id {
                let r = central_drift(id, &pot, &p, &orbit).map(|d| (d, tol.drift));
                ev.push(format!("drift {id} 3D{sfx}"), r, false);
            }
        }
        ev.orbits.push(orbit);
    }
    Ok(ev)
}

fn central_drift(
    id: IntegralId,
    pot: &Potential,
    p: &Params,
    orbit: &Trajectory3D,
) -> bcklab::Result<f64> {
    let vals = orbit
        .samples
        .iter()
        .map(|s| central_energy_integral(id, pot, p, &s.state))
        .collect::<bcklab::Result<Vec<_>>>()?;
    let i0 = vals[0];
    let dev = vals.iter().map(|v| (v - i0).abs()).fold(0.0, f64::max);
    Ok(dev / i0.abs().max(bcklab::integrals::DRIFT_ATOL))
}

/// Strong residuals of the requested Noether generators at seeded random
/// off-shell points.
fn symmetry_checks(sc: &Scenario, cat: &Catalog, p: &Params, ev: &mut Evaluation) {
    let lag = Bck::new(sc.potential, *p);
    let t0 = sc
        .initial
        .iter()
        .map(|s| s.t)
        .chain(sc.initial3d.iter().map(|s| s.t))
        .fold(f64::INFINITY, f64::min);
    let region = Region {
        t: (t0.min(sc.t_end), sc.t_end),
        ..Region::default()
    };
    let pts = sampling::offshell_points(sc.seed, sc.samples, &region);
    for name in &sc.checks.symmetries {
        let e = cat.get(name).expect("validated");
        if e.kind != Kind::Noether {
            continue;
        }
        let worst = strong_residual(&e.generator, &lag, &pts);
        ev.push(
            format!("Rund-Trautman residual {name}"),
            worst.map(|w| (w, sc.tolerances.rund_trautman)),
            false,
        );
    }
}

fn strong_residual(
    gen: &Generator,
    lag: &Bck,
    pts: &[sampling::OffShellPoint],
) -> bcklab::Result<f64> {
    let mut worst = 0.0f64;
    for pt in pts {
        let r = rund_trautman_residual(gen, lag, pt)?;
        let l = lag.parts(pt.t, pt.q, pt.qdot)?.value;
        worst = worst.max(r.abs() / (1.0 + l.abs()));
    }
    Ok(worst)
}
