//! Integration of the damped equation of motion, augmented with the BCK
//! action, plus closed-form solutions used as oracles.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, LastState, Result};
use crate::model::{lagrangian_bck, Params, Potential, State1D};
use crate::ode::{integrate_sampled, OdeSystem, StepControl};

pub use crate::ode::Stats;

/// Smallest coordinate accepted for `Log` and `Power` potentials.
pub const DOMAIN_MARGIN: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegratorConfig {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
    pub sample_dt: f64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        IntegratorConfig {
            rtol: 1e-10,
            atol: 1e-12,
            h_init: 1e-4,
            h_min: 1e-14,
            h_max: 0.1,
            sample_dt: 1e-3,
        }
    }
}

impl IntegratorConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if !(self.rtol > 0.0 && self.rtol <= 1e-6) {
            return bad(format!("rtol must lie in (0, 1e-6], got {}", self.rtol));
        }
        if !(self.atol > 0.0) {
            return bad(format!("atol must be > 0, got {}", self.atol));
        }
        if !(self.h_min > 0.0 && self.h_init >= self.h_min && self.h_max >= self.h_init) {
            return bad("step bounds must satisfy 0 < h_min <= h_init <= h_max".into());
        }
        if !(self.sample_dt > 0.0) {
            return bad(format!("sample_dt must be > 0, got {}", self.sample_dt));
        }
        Ok(())
    }

    pub(crate) fn step_control(&self) -> StepControl {
        StepControl {
            rtol: self.rtol,
            atol: self.atol,
            h_init: self.h_init,
            h_min: self.h_min,
            h_max: self.h_max,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample {
    pub state: State1D,
    /// `∫ L_BCK dt` from the initial time.
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub samples: Vec<Sample>,
    pub stats: Stats,
}

impl Trajectory {
    pub fn initial(&self) -> &Sample {
        &self.samples[0]
    }

    pub fn last(&self) -> &Sample {
        self.samples
            .last()
            .expect("trajectory has at least one sample")
    }

    pub fn states(&self) -> impl Iterator<Item = &State1D> + '_ {
        self.samples.iter().map(|s| &s.state)
    }

    /// Export as CSV with columns `t,q,qdot,action` and any extra columns.
    ///
    /// Extra columns must have one value per sample.
    pub fn write_csv<W: Write>(&self, mut w: W, extra: &[(&str, &[f64])]) -> std::io::Result<()> {
        write!(w, "t,q,qdot,action")?;
        for (name, col) in extra {
            assert_eq!(col.len(), self.samples.len(), "column {name} length");
            write!(w, ",{name}")?;
        }
        writeln!(w)?;
        for (i, s) in self.samples.iter().enumerate() {
            write!(
                w,
                "{},{},{},{}",
                fmt17(s.state.t),
                fmt17(s.state.q),
                fmt17(s.state.qdot),
                fmt17(s.action)
            )?;
            for (_, col) in extra {
                write!(w, ",{}", fmt17(col[i]))?;
            }
            writeln!(w)?;
        }
        Ok(())
    }
}

/// Decimal float with 17 significant digits.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

struct DampedSystem<'a> {
    pot: &'a Potential,
    params: &'a Params,
}

impl OdeSystem<3> for DampedSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; 3]) -> Result<[f64; 3]> {
        let (q, v) = (y[0], y[1]);
        if matches!(self.pot, Potential::Log { .. } | Potential::Power { .. }) && q < DOMAIN_MARGIN
        {
            return Err(Error::Domain {
                potential: self.pot.name(),
                q,
            });
        }
        let pv = self.pot.eval(self.params, q)?;
        let l = lagrangian_bck(self.pot, self.params, &State1D::new(t, q, v))?;
        Ok([v, -pv.d1 - 2.0 * self.params.gamma * v, l])
    }
}

pub(crate) fn check_horizon(params: &Params, t_end: f64) -> Result<()> {
    let exponent = 2.0 * params.gamma * t_end;
    if exponent > crate::model::EXP_CAP {
        return Err(Error::OverflowGuard {
            exponent,
            cap: crate::model::EXP_CAP,
        });
    }
    Ok(())
}

/// Integrate `(q, q̇, A)` from `ic` to `t_end` and sample every `sample_dt`.
pub fn integrate(
    pot: &Potential,
    params: &Params,
    ic: State1D,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory> {
    params.validate()?;
    pot.validate()?;
    cfg.validate()?;
    check_horizon(params, t_end)?;
    if !ic.is_finite() || !pot.in_domain(ic.q) {
        return Err(Error::Domain {
            potential: pot.name(),
            q: ic.q,
        });
    }
    if !(t_end > ic.t) {
        return Err(Error::InvalidParams(format!(
            "t_end = {t_end} must exceed the initial time {}",
            ic.t
        )));
    }

    let sys = DampedSystem { pot, params };
    let mut samples = Vec::with_capacity(((t_end - ic.t) / cfg.sample_dt) as usize + 2);
    let outcome = integrate_sampled(
        &sys,
        ic.t,
        [ic.q, ic.qdot, 0.0],
        t_end,
        cfg.sample_dt,
        cfg.step_control(),
        |t, y| {
            samples.push(Sample {
                state: State1D::new(t, y[0], y[1]),
                action: y[2],
            })
        },
    );
    match outcome {
        Ok(stats) => {
            // the first sample is the initial condition verbatim
            samples[0].state = ic;
            Ok(Trajectory { samples, stats })
        }
        Err((fail, err)) => {
            let last = LastState {
                t: fail.t,
                q: fail.y[0],
                qdot: fail.y[1],
            };
            Err(match err {
                Some(e) => e,
                None if fail.domain => Error::DomainExit { last },
                None => Error::StepSizeUnderflow { h: fail.h, last },
            })
        }
    }
}

/// Exact state at time `t` for the free, linear and quadratic potentials.
pub fn analytic_solution(pot: &Potential, params: &Params, ic: State1D, t: f64) -> Result<State1D> {
    let g = params.gamma;
    let s = t - ic.t;
    let (q0, v0) = (ic.q, ic.qdot);
    let decay = (-2.0 * g * s).exp();
    match *pot {
        Potential::Free => Ok(State1D::new(
            t,
            q0 + v0 / (2.0 * g) * (1.0 - decay),
            v0 * decay,
        )),
        Potential::Linear { f } => {
            let u = f / (2.0 * g);
            Ok(State1D::new(
                t,
                q0 + u * s + (v0 - u) * (1.0 - decay) / (2.0 * g),
                u + (v0 - u) * decay,
            ))
        }
        Potential::Quadratic { a } => Ok(damped_oscillator(g, a, q0, v0, s, t)),
        other => Err(Error::Unsupported(format!(
            "no closed-form solution for the {} potential",
            other.name()
        ))),
    }
}

/// Damping regime of `q̈ + 2γq̇ + 2Aq = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Underdamped,
    Critical,
    Overdamped,
}

pub fn quadratic_regime(gamma: f64, a: f64) -> Regime {
    let disc = gamma * gamma - 2.0 * a;
    if disc.abs() <= 1e-12 * gamma * gamma {
        Regime::Critical
    } else if disc < 0.0 {
        Regime::Underdamped
    } else {
        Regime::Overdamped
    }
}

fn damped_oscillator(g: f64, a: f64, q0: f64, v0: f64, s: f64, t: f64) -> State1D {
    let disc = g * g - 2.0 * a;
    match quadratic_regime(g, a) {
        Regime::Critical => {
            let c2 = v0 + g * q0;
            let e = (-g * s).exp();
            State1D::new(t, (q0 + c2 * s) * e, (c2 - g * (q0 + c2 * s)) * e)
        }
        Regime::Underdamped => {
            let w = (-disc).sqrt();
            let (sn, cs) = (w * s).sin_cos();
            let e = (-g * s).exp();
            let b = (v0 + g * q0) / w;
            State1D::new(
                t,
                e * (q0 * cs + b * sn),
                e * (v0 * cs - (g * b + w * q0) * sn),
            )
        }
        Regime::Overdamped => {
            let k = disc.sqrt();
            let (lp, lm) = (-g + k, -g - k);
            let cp = (v0 - lm * q0) / (2.0 * k);
            let cm = (lp * q0 - v0) / (2.0 * k);
            let (ep, em) = ((lp * s).exp(), (lm * s).exp());
            State1D::new(t, cp * ep + cm * em, lp * cp * ep + lm * cm * em)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn params(g: f64) -> Params {
        Params::new(g).unwrap()
    }

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn free_particle_example() {
        let p = params(0.5);
        let traj = integrate(
            &Potential::Free,
            &p,
            State1D::new(0.0, 1.0, 1.0),
            1.0,
            &cfg(),
        )
        .unwrap();
        let end = traj.last().state;
        assert_eq!(end.t, 1.0);
        // q(1) = 1 + (1 - e^{-1}), qdot(1) = e^{-1}
        assert!((end.q - 1.632_120_558_828_557_7).abs() < 1e-10);
        assert!((end.qdot - 0.367_879_441_171_442_33).abs() < 1e-10);
    }

    #[test]
    fn first_sample_is_initial_condition_and_action_starts_at_zero() {
        let p = params(0.3);
        let ic = State1D::new(0.25, 0.7, -0.1);
        let traj = integrate(&Potential::Quadratic { a: 1.0 }, &p, ic, 1.0, &cfg()).unwrap();
        assert_eq!(traj.initial().state, ic);
        assert_eq!(traj.initial().action, 0.0);
        assert!(traj.samples.windows(2).all(|w| w[1].state.t > w[0].state.t));
    }

    #[test]
    fn equilibrium_is_stationary() {
        // V' = 0 at q = 0 for the quadratic potential; V' = 0 everywhere for Free
        let p = params(0.5);
        for pot in [Potential::Quadratic { a: 2.0 }, Potential::Free] {
            let traj = integrate(&pot, &p, State1D::new(0.0, 0.0, 0.0), 5.0, &cfg()).unwrap();
            assert!(traj.states().all(|s| s.q == 0.0 && s.qdot == 0.0));
        }
    }

    #[test]
    fn linear_terminal_velocity() {
        let p = params(0.5);
        let pot = Potential::Linear { f: 1.0 };
        let traj = integrate(&pot, &p, State1D::new(0.0, 0.0, 0.0), 29.0, &cfg()).unwrap();
        assert!((traj.last().state.qdot - 1.0).abs() < 1e-10);
        // launched at terminal velocity: no acceleration
        let s = analytic_solution(&pot, &p, State1D::new(0.0, 0.0, 1.0), 3.0).unwrap();
        assert_relative_eq!(s.qdot, 1.0, max_relative = 1e-15);
        assert_relative_eq!(s.q, 3.0, max_relative = 1e-14);
    }

    #[test]
    fn analytic_free_at_rest() {
        let p = params(0.8);
        let s = analytic_solution(&Potential::Free, &p, State1D::new(0.0, 2.5, 0.0), 7.0).unwrap();
        assert_eq!((s.q, s.qdot), (2.5, 0.0));
    }

    #[test]
    fn analytic_unsupported_potential() {
        let p = params(0.5);
        let r = analytic_solution(
            &Potential::Log { a: 1.0 },
            &p,
            State1D::new(0.0, 1.0, 0.0),
            1.0,
        );
        assert!(matches!(r, Err(Error::Unsupported(_))));
    }

    #[test]
    fn critical_regime_closed_form() {
        // q'' + 2g q' + g^2 q = 0 for A = g^2/2
        let g = 0.5;
        let p = params(g);
        let pot = Potential::Quadratic { a: g * g / 2.0 };
        assert_eq!(quadratic_regime(g, g * g / 2.0), Regime::Critical);
        let (q0, v0) = (1.0, 0.5);
        let t = 3.0;
        let s = analytic_solution(&pot, &p, State1D::new(0.0, q0, v0), t).unwrap();
        let c2 = v0 + g * q0;
        assert_relative_eq!(s.q, (q0 + c2 * t) * (-g * t).exp(), max_relative = 1e-14);
    }

    #[test]
    fn analytic_satisfies_equation_of_motion() {
        // central second difference of q(t) against -V' - 2g qdot
        for (g, a) in [(0.5, 1.0), (0.5, 0.125), (1.0, 0.1), (0.1, 0.0)] {
            let p = params(g);
            let pot = Potential::Quadratic { a };
            let ic = State1D::new(0.0, 0.8, -0.3);
            let at = |t| analytic_solution(&pot, &p, ic, t).unwrap();
            let h = 1e-4;
            let t = 1.7;
            let qdd = (at(t + h).q - 2.0 * at(t).q + at(t - h).q) / (h * h);
            let qd = (at(t + h).q - at(t - h).q) / (2.0 * h);
            let s = at(t);
            assert_relative_eq!(qd, s.qdot, max_relative = 1e-7, epsilon = 1e-9);
            assert!((qdd - (-2.0 * a * s.q - 2.0 * g * s.qdot)).abs() < 1e-5);
        }
    }

    #[test]
    fn integrate_matches_analytic_over_regimes() {
        for g in [0.1, 0.5, 1.0] {
            let p = params(g);
            let pots = [
                Potential::Free,
                Potential::Linear { f: 1.2 },
                Potential::Quadratic { a: 2.0 * g * g },
                Potential::Quadratic { a: 0.5 * g * g },
                Potential::Quadratic { a: 0.1 * g * g },
            ];
            for pot in pots {
                let ic = State1D::new(0.0, 0.9, 0.4);
                let traj = integrate(&pot, &p, ic, 10.0, &cfg()).unwrap();
                let err = traj
                    .states()
                    .map(|s| {
                        let e = analytic_solution(&pot, &p, ic, s.t).unwrap();
                        (s.q - e.q).abs().max((s.qdot - e.qdot).abs())
                    })
                    .fold(0.0, f64::max);
                assert!(err <= 1e-8, "{pot:?} g={g}: {err:e}");
            }
        }
    }

    #[test]
    fn halving_rtol_does_not_increase_endpoint_error() {
        let p = params(0.5);
        let pot = Potential::Quadratic { a: 1.0 };
        let ic = State1D::new(0.0, 1.0, 0.0);
        let exact = analytic_solution(&pot, &p, ic, 10.0).unwrap();
        let mut prev = f64::INFINITY;
        for rtol in [1e-7, 5e-8, 2.5e-8, 1.25e-8] {
            let c = IntegratorConfig {
                rtol,
                atol: 1e-14,
                sample_dt: 10.0,
                h_max: 10.0,
                ..cfg()
            };
            let end = integrate(&pot, &p, ic, 10.0, &c).unwrap().last().state;
            let err = (end.q - exact.q).abs() + (end.qdot - exact.qdot).abs();
            assert!(err <= 4.0 * prev, "rtol {rtol}: {err:e} vs {prev:e}");
            prev = err;
        }
    }

    #[test]
    fn action_matches_trapezoid_of_sampled_lagrangian() {
        let p = params(0.4);
        let pot = Potential::Linear { f: 0.7 };
        let traj = integrate(&pot, &p, State1D::new(0.0, 0.2, 0.3), 5.0, &cfg()).unwrap();
        let ls: Vec<f64> = traj
            .states()
            .map(|s| lagrangian_bck(&pot, &p, s).unwrap())
            .collect();
        let mut trap = 0.0;
        for i in 1..ls.len() {
            let dt = traj.samples[i].state.t - traj.samples[i - 1].state.t;
            trap += 0.5 * dt * (ls[i] + ls[i - 1]);
        }
        assert_relative_eq!(traj.last().action, trap, max_relative = 1e-6);
    }

    #[test]
    fn horizon_beyond_exp_cap_is_rejected() {
        let p = params(1.0);
        let r = integrate(
            &Potential::Free,
            &p,
            State1D::new(0.0, 0.0, 1.0),
            15.5,
            &cfg(),
        );
        assert!(matches!(r, Err(Error::OverflowGuard { .. })));
    }

    #[test]
    fn log_potential_domain_exit() {
        // strong attraction toward q = 0 (V = A log q with A > 0 pulls inward)
        let p = params(0.1);
        let r = integrate(
            &Potential::Log { a: 1.0 },
            &p,
            State1D::new(0.0, 0.05, -3.0),
            2.0,
            &cfg(),
        );
        match r {
            Err(Error::DomainExit { last }) => assert!(last.q > 0.0),
            other => panic!("expected DomainExit, got {other:?}"),
        }
    }

    #[test]
    fn step_size_underflow_is_reported_with_last_state() {
        let p = params(0.5);
        let c = IntegratorConfig {
            h_min: 1e-3,
            h_init: 1e-3,
            rtol: 1e-14,
            atol: 1e-20,
            ..cfg()
        };
        let r = integrate(
            &Potential::Quadratic { a: 50.0 },
            &p,
            State1D::new(0.0, 1.0, 0.0),
            1.0,
            &c,
        );
        assert!(matches!(r, Err(Error::StepSizeUnderflow { .. })), "{r:?}");
    }

    #[test]
    fn csv_has_seventeen_significant_digits() {
        let p = params(0.5);
        let traj = integrate(
            &Potential::Free,
            &p,
            State1D::new(0.0, 1.0, 1.0),
            0.002,
            &cfg(),
        )
        .unwrap();
        let mut buf = Vec::new();
        let extra = vec![1.0 / 3.0; traj.samples.len()];
        traj.write_csv(&mut buf, &[("weak_constant", &extra)])
            .unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,q,qdot,action,weak_constant");
        let row: Vec<&str> = lines.next().unwrap().split(',').collect();
        assert_eq!(row[4], "3.3333333333333331e-1");
        assert_eq!(row[4].parse::<f64>().unwrap(), 1.0 / 3.0);
    }
}
