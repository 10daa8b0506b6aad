//! Damped motion in a central potential `V(r)`, integrated in cartesian
//! coordinates, with the damped angular momentum and the energy-like
//! integrals that survive in three dimensions.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::dynamics::{check_horizon, fmt17, integrate, IntegratorConfig, DOMAIN_MARGIN};
use crate::error::{Error, LastState, Result};
use crate::integrals::IntegralId;
use crate::model::{Params, Potential, State1D};
use crate::ode::{integrate_sampled, OdeSystem, Stats};
use crate::par;

pub type Vec3 = [f64; 3];

pub fn dot(a: &Vec3, b: &Vec3) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub fn cross(a: &Vec3, b: &Vec3) -> Vec3 {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}

pub fn norm(a: &Vec3) -> f64 {
    dot(a, a).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State3D {
    pub t: f64,
    pub r: Vec3,
    pub v: Vec3,
}

impl State3D {
    pub const fn new(t: f64, r: Vec3, v: Vec3) -> Self {
        State3D { t, r, v }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.r.iter().chain(&self.v).all(|x| x.is_finite())
    }

    pub fn radius(&self) -> f64 {
        norm(&self.r)
    }

    /// Radial speed `ṙ = r⃗·v⃗ / r`.
    pub fn radial_speed(&self) -> f64 {
        dot(&self.r, &self.v) / self.radius()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sample3D {
    pub state: State3D,
    pub action: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory3D {
    pub samples: Vec<Sample3D>,
    pub stats: Stats,
}

/// `V′(r)/r` is singular at the origin unless the force is linear in `r⃗`.
fn singular_at_origin(pot: &Potential) -> bool {
    !matches!(pot, Potential::Free | Potential::Quadratic { .. })
}

struct CentralSystem<'a> {
    pot: &'a Potential,
    params: &'a Params,
}

impl OdeSystem<7> for CentralSystem<'_> {
    fn rhs(&self, t: f64, y: &[f64; 7]) -> Result<[f64; 7]> {
        let r = [y[0], y[1], y[2]];
        let v = [y[3], y[4], y[5]];
        let rad = norm(&r);
        if singular_at_origin(self.pot) && rad < DOMAIN_MARGIN {
            return Err(Error::Domain {
                potential: self.pot.name(),
                q: rad,
            });
        }
        let pv = self.pot.eval(self.params, rad)?;
        let k = match self.pot {
            Potential::Free => 0.0,
            Potential::Quadratic { a } => 2.0 * a,
            _ => pv.d1 / rad,
        };
        let g2 = 2.0 * self.params.gamma;
        let l = (0.5 * dot(&v, &v) - pv.v) * self.params.weight(t)?;
        Ok([
            v[0],
            v[1],
            v[2],
            -k * r[0] - g2 * v[0],
            -k * r[1] - g2 * v[1],
            -k * r[2] - g2 * v[2],
            l,
        ])
    }
}

/// Integrate `(r⃗, v⃗, A)` with `v̇⃗ = −(V′(r)/r) r⃗ − 2γv⃗`.
pub fn integrate3d(
    pot: &Potential,
    params: &Params,
    ic: State3D,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<Trajectory3D> {
    params.validate()?;
    pot.validate()?;
    cfg.validate()?;
    check_horizon(params, t_end)?;
    let r0 = ic.radius();
    if !ic.is_finite() || !pot.in_domain(r0) || (singular_at_origin(pot) && r0 < DOMAIN_MARGIN) {
        return Err(Error::Domain {
            potential: pot.name(),
            q: r0,
        });
    }
    if !(t_end > ic.t) {
        return Err(Error::InvalidParams(format!(
            "t_end = {t_end} must exceed the initial time {}",
            ic.t
        )));
    }
    let sys = CentralSystem { pot, params };
    let y0 = [ic.r[0], ic.r[1], ic.r[2], ic.v[0], ic.v[1], ic.v[2], 0.0];
    let mut samples = Vec::new();
    let outcome = integrate_sampled(
        &sys,
        ic.t,
        y0,
        t_end,
        cfg.sample_dt,
        cfg.step_control(),
        |t, y| {
            samples.push(Sample3D {
                state: State3D::new(t, [y[0], y[1], y[2]], [y[3], y[4], y[5]]),
                action: y[6],
            })
        },
    );
    match outcome {
        Ok(stats) => {
            samples[0].state = ic;
            Ok(Trajectory3D { samples, stats })
        }
        Err((fail, err)) => {
            let s = State3D::new(
                fail.t,
                [fail.y[0], fail.y[1], fail.y[2]],
                [fail.y[3], fail.y[4], fail.y[5]],
            );
            let last = LastState {
                t: s.t,
                q: s.radius(),
                qdot: s.radial_speed(),
            };
            Err(match err {
                Some(e) => e,
                None if fail.domain => Error::DomainExit { last },
                None => Error::StepSizeUnderflow { h: fail.h, last },
            })
        }
    }
}

/// `ℓ⃗₀ = (r⃗ × v⃗) e^{2γt}`.
pub fn angular_momentum_integral(s: &State3D, params: &Params) -> Result<Vec3> {
    let w = params.weight(s.t)?;
    Ok(cross(&s.r, &s.v).map(|x| x * w))
}

/// `α⃗ · (r⃗ × v⃗) e^{2γt}`, the integral of the rotation about `α⃗`.
pub fn rotational_integral(alpha: &Vec3, s: &State3D, params: &Params) -> Result<f64> {
    Ok(dot(alpha, &angular_momentum_integral(s, params)?))
}

/// Energy-like integrals of the log and power central potentials.
///
/// Both follow from the single-symmetry generator with `ξ⃗ ∝ r⃗`:
/// `½|v⃗ + 2γr⃗|² + A log r + 2γAt` and
/// `(½|v⃗ + 4γr⃗/(α+2)|² + A r^α) e^{4γαt/(α+2)}`. For radial motion they
/// reduce to the one-dimensional formulas with `q → r`.
pub fn central_energy_integral(
    id: IntegralId,
    pot: &Potential,
    params: &Params,
    s: &State3D,
) -> Result<f64> {
    let g2 = 2.0 * params.gamma;
    params.weight(s.t)?;
    let r = s.radius();
    let shifted = |c: f64| -> f64 {
        let u = [
            s.v[0] + c * s.r[0],
            s.v[1] + c * s.r[1],
            s.v[2] + c * s.r[2],
        ];
        0.5 * dot(&u, &u)
    };
    match (id, *pot) {
        (IntegralId::IV1, Potential::Log { a }) => {
            if r <= 0.0 {
                return Err(Error::Domain {
                    potential: "log",
                    q: r,
                });
            }
            Ok(shifted(g2) + a * r.ln() + g2 * a * s.t)
        }
        (IntegralId::IV2, Potential::Power { a, alpha }) => {
            if !pot.in_domain(r) {
                return Err(Error::Domain {
                    potential: "power",
                    q: r,
                });
            }
            let k = alpha + 2.0;
            Ok((shifted(2.0 * g2 / k) + a * r.powf(alpha)) * (2.0 * g2 * alpha * s.t / k).exp())
        }
        (IntegralId::IV1 | IntegralId::IV2, _) => Err(Error::PotentialMismatch {
            id: id.as_str().to_owned(),
            expected: id.binding(),
            found: pot.name(),
        }),
        _ => Err(Error::Unsupported(format!("{id} has no central form"))),
    }
}

/// Diagnostics of the rotational structure along an orbit.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrbitReport {
    /// `max |ℓ⃗₀(t) − ℓ⃗₀(t₀)| / |ℓ⃗₀(t₀)|`
    pub angular_momentum_drift: f64,
    /// `max |r⃗ · ℓ̂₀| / max |r⃗|`
    pub planarity: f64,
    /// `max |½|r⃗ × v⃗| − ½|ℓ⃗₀| e^{−2γt}| / (½|ℓ⃗₀| e^{−2γt})`
    pub areal_velocity: f64,
}

pub fn orbit_report(traj: &Trajectory3D, params: &Params) -> Result<OrbitReport> {
    let l0 = angular_momentum_integral(&traj.samples[0].state, params)?;
    let l0n = norm(&l0);
    if l0n == 0.0 {
        return Err(Error::InvalidParams(
            "radial orbit has no orbital plane".into(),
        ));
    }
    let axis = l0.map(|x| x / l0n);
    let rows = par::map(&traj.samples, |smp| -> Result<(f64, f64, f64, f64)> {
        let s = &smp.state;
        let l = angular_momentum_integral(s, params)?;
        let d = [l[0] - l0[0], l[1] - l0[1], l[2] - l0[2]];
        let areal = 0.5 * norm(&cross(&s.r, &s.v));
        let expected = 0.5 * l0n / params.weight(s.t)?;
        Ok((
            norm(&d) / l0n,
            dot(&s.r, &axis).abs(),
            s.radius(),
            (areal - expected).abs() / expected,
        ))
    });
    let mut out = OrbitReport {
        angular_momentum_drift: 0.0,
        planarity: 0.0,
        areal_velocity: 0.0,
    };
    let (mut off_plane, mut rmax) = (0.0f64, 0.0f64);
    for row in rows {
        let (dl, z, r, a) = row?;
        out.angular_momentum_drift = out.angular_momentum_drift.max(dl);
        off_plane = off_plane.max(z);
        rmax = rmax.max(r);
        out.areal_velocity = out.areal_velocity.max(a);
    }
    out.planarity = off_plane / rmax.max(f64::MIN_POSITIVE);
    Ok(out)
}

/// Largest gap between a 3D quadratic orbit and three 1D integrations of
/// its cartesian components.
pub fn quadratic_separability(
    a: f64,
    params: &Params,
    ic: State3D,
    t_end: f64,
    cfg: &IntegratorConfig,
) -> Result<f64> {
    let pot = Potential::Quadratic { a };
    let orbit = integrate3d(&pot, params, ic, t_end, cfg)?;
    let mut worst = 0.0f64;
    for k in 0..3 {
        let tr = integrate(
            &pot,
            params,
            State1D::new(ic.t, ic.r[k], ic.v[k]),
            t_end,
            cfg,
        )?;
        if tr.samples.len() != orbit.samples.len() {
            return Err(Error::InvalidParams("sample grids differ".into()));
        }
        for (s1, s3) in tr.samples.iter().zip(&orbit.samples) {
            worst = worst
                .max((s1.state.q - s3.state.r[k]).abs())
                .max((s1.state.qdot - s3.state.v[k]).abs());
        }
    }
    Ok(worst)
}

impl Trajectory3D {
    /// CSV with columns `t,x,y,z,vx,vy,vz,lx,ly,lz`, where `l⃗ = r⃗ × v⃗`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "t,x,y,z,vx,vy,vz,lx,ly,lz")?;
        for smp in &self.samples {
            let s = &smp.state;
            let l = cross(&s.r, &s.v);
            let cols: Vec<String> = std::iter::once(s.t)
                .chain(s.r)
                .chain(s.v)
                .chain(l)
                .map(fmt17)
                .collect();
            writeln!(w, "{}", cols.join(","))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::integrals::{drift, eval_integral};
    use approx::assert_relative_eq;

    fn cfg() -> IntegratorConfig {
        IntegratorConfig::default()
    }

    #[test]
    fn free_particle_at_rest_stays_put() {
        let p = Params::new(0.5).unwrap();
        let ic = State3D::new(0.0, [1.0, -2.0, 0.5], [0.0; 3]);
        let tr = integrate3d(&Potential::Free, &p, ic, 2.0, &cfg()).unwrap();
        assert!(tr
            .samples
            .iter()
            .all(|s| s.state.r == ic.r && s.state.v == [0.0; 3]));
    }

    #[test]
    fn angular_momentum_examples() {
        let p = Params::new(0.5).unwrap();
        let s = State3D::new(0.0, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        assert_eq!(angular_momentum_integral(&s, &p).unwrap(), [0.0, 0.0, 1.0]);
        let radial = State3D::new(1.0, [1.0, 2.0, 3.0], [2.0, 4.0, 6.0]);
        assert_eq!(angular_momentum_integral(&radial, &p).unwrap(), [0.0; 3]);
        let s = State3D::new(0.3, [1.0, 0.2, -0.4], [0.1, 0.9, 0.3]);
        let l = angular_momentum_integral(&s, &p).unwrap();
        let ln = norm(&l);
        assert_relative_eq!(
            rotational_integral(&l.map(|x| x / ln), &s, &p).unwrap(),
            ln,
            max_relative = 1e-14
        );
        let perp = cross(&l, &[0.0, 0.0, 1.0]);
        assert!(rotational_integral(&perp, &s, &p).unwrap().abs() < 1e-14);
        assert_eq!(rotational_integral(&[0.0; 3], &s, &p).unwrap(), 0.0);
    }

    #[test]
    fn orbits_conserve_the_damped_angular_momentum() {
        let p = Params::new(0.3).unwrap();
        let ic = State3D::new(0.0, [1.0, 0.2, -0.3], [0.1, 0.8, 0.4]);
        for pot in [
            Potential::Log { a: 1.0 },
            Potential::Power {
                a: 1.0,
                alpha: -1.0,
            },
            Potential::Quadratic { a: 0.5 },
            Potential::Exp { a: 0.2 },
        ] {
            let tr = integrate3d(&pot, &p, ic, 6.0, &cfg()).unwrap();
            let r = orbit_report(&tr, &p).unwrap();
            assert!(r.angular_momentum_drift <= 1e-8, "{pot:?} {r:?}");
            assert!(r.planarity <= 1e-8, "{pot:?} {r:?}");
            assert!(r.areal_velocity <= 1e-8, "{pot:?} {r:?}");
        }
    }

    #[test]
    fn quadratic_case_separates() {
        let p = Params::new(0.2).unwrap();
        let ic = State3D::new(0.0, [1.0, -0.5, 0.3], [0.0, 0.7, -0.2]);
        assert!(quadratic_separability(0.8, &p, ic, 5.0, &cfg()).unwrap() <= 1e-9);
    }

    #[test]
    fn energy_like_integrals_are_conserved() {
        let p = Params::new(0.25).unwrap();
        let ic = State3D::new(0.0, [1.5, 0.0, 0.2], [0.0, 0.6, 0.1]);
        for (pot, id) in [
            (Potential::Log { a: 1.0 }, IntegralId::IV1),
            (
                Potential::Power {
                    a: -1.0,
                    alpha: -1.0,
                },
                IntegralId::IV2,
            ),
            (Potential::Power { a: 0.5, alpha: 3.0 }, IntegralId::IV2),
        ] {
            let tr = integrate3d(&pot, &p, ic, 6.0, &cfg()).unwrap();
            let vals: Vec<f64> = tr
                .samples
                .iter()
                .map(|s| central_energy_integral(id, &pot, &p, &s.state).unwrap())
                .collect();
            let dev = vals.iter().map(|v| (v - vals[0]).abs()).fold(0.0, f64::max);
            assert!(dev <= 1e-7 * vals[0].abs(), "{pot:?}: {dev:e}");
        }
    }

    #[test]
    fn radial_launch_reduces_to_one_dimension() {
        let p = Params::new(0.5).unwrap();
        let pot = Potential::Log { a: 1.0 };
        let dir = [0.6, 0.0, 0.8];
        let s3 = State3D::new(0.4, dir.map(|x| 2.0 * x), dir.map(|x| -0.3 * x));
        let s1 = State1D::new(0.4, 2.0, -0.3);
        assert_relative_eq!(
            central_energy_integral(IntegralId::IV1, &pot, &p, &s3).unwrap(),
            eval_integral(IntegralId::IV1, &pot, &p, &s1).unwrap(),
            max_relative = 1e-14
        );
        // at rest: ½(2γ·2)² + log 2
        let rest = State3D::new(0.0, [2.0, 0.0, 0.0], [0.0; 3]);
        assert_relative_eq!(
            central_energy_integral(IntegralId::IV1, &pot, &p, &rest).unwrap(),
            2.0 + 2f64.ln(),
            max_relative = 1e-15
        );
        // radial orbit matches the 1D trajectory sample by sample
        let tr3 = integrate3d(
            &pot,
            &p,
            State3D::new(0.0, [0.0, 2.0, 0.0], [0.0, 0.5, 0.0]),
            3.0,
            &cfg(),
        )
        .unwrap();
        let tr1 = integrate(&pot, &p, State1D::new(0.0, 2.0, 0.5), 3.0, &cfg()).unwrap();
        let d1 = drift(&tr1, IntegralId::IV1, &pot, &p).unwrap();
        assert!(d1.normalized <= 1e-7);
        for (a, b) in tr3.samples.iter().zip(&tr1.samples) {
            assert!((a.state.r[1] - b.state.q).abs() <= 1e-8);
        }
    }

    #[test]
    fn energy_like_limit_in_three_dimensions() {
        let p = Params::new(1e-8).unwrap();
        let s = State3D::new(0.5, [1.0, 0.5, -0.2], [0.3, -0.4, 0.9]);
        for (pot, id) in [
            (Potential::Log { a: 0.7 }, IntegralId::IV1),
            (Potential::Power { a: 0.7, alpha: 3.0 }, IntegralId::IV2),
        ] {
            let e = 0.5 * dot(&s.v, &s.v) + pot.eval(&p, s.radius()).unwrap().v;
            let i = central_energy_integral(id, &pot, &p, &s).unwrap();
            assert!((i - e).abs() <= 1e-6);
        }
    }

    #[test]
    fn origin_is_a_domain_error() {
        let p = Params::new(0.5).unwrap();
        let ic = State3D::new(0.0, [0.0; 3], [1.0, 0.0, 0.0]);
        assert!(matches!(
            integrate3d(&Potential::Log { a: 1.0 }, &p, ic, 1.0, &cfg()),
            Err(Error::Domain { .. })
        ));
        // attractive log potential with a radial launch falls into the origin
        let ic = State3D::new(0.0, [0.5, 0.0, 0.0], [-1.0, 0.0, 0.0]);
        assert!(matches!(
            integrate3d(&Potential::Log { a: 1.0 }, &p, ic, 5.0, &cfg()),
            Err(Error::DomainExit { .. }) | Err(Error::StepSizeUnderflow { .. })
        ));
    }

    #[test]
    fn csv_columns() {
        let p = Params::new(0.5).unwrap();
        let ic = State3D::new(0.0, [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]);
        let tr = integrate3d(&Potential::Quadratic { a: 0.5 }, &p, ic, 0.01, &cfg()).unwrap();
        let mut buf = Vec::new();
        tr.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let mut lines = text.lines();
        assert_eq!(lines.next().unwrap(), "t,x,y,z,vx,vy,vz,lx,ly,lz");
        let first: Vec<f64> = lines
            .next()
            .unwrap()
            .split(',')
            .map(|x| x.parse().unwrap())
            .collect();
        assert_eq!(
            first,
            vec![0.0, 1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]
        );
        assert_eq!(text.lines().count(), tr.samples.len() + 1);
    }
}
