//! Point transformations `X = τ ∂t + ξ ∂q` with divergence term `f`, and the
//! residuals that decide whether they are Noether or Lie symmetries.
//!
//! Strong (off-shell) evaluations take an [`OffShellPoint`], where `q̈` is an
//! independent coordinate; on-flow evaluations take a [`State1D`] and
//! substitute the equation of motion.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::lagrangian::{Bck, GaugeFn, Lagrangian};
use crate::model::{eom_rhs, Params, Potential, State1D};
use crate::phase::{self, PhaseFunction};
use crate::sampling::{self, OffShellPoint, Region};

pub mod catalog;

/// Closed-form point function of `(t, q)` evaluated over jets.
pub type PointFn = Arc<dyn Fn(Jet2, Jet2) -> Jet2 + Send + Sync>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Source {
    /// Noether point symmetries of the linear potential.
    LinearNoether,
    /// The single Noether point symmetry of the log, power and exp potentials.
    SingleNoether,
    /// Lie point symmetries that are not Noether point symmetries.
    LiePoint,
    /// Translations and other elementary fields.
    Elementary,
    /// Built from other generators (sums, multiples, gauge shifts).
    Derived,
    User,
}

/// Human-readable formulas for the catalog listing.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Display {
    pub tau: String,
    pub xi: String,
    pub f: String,
}

/// `τ`, `ξ`, `f` with their partials at one `(t, q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointJets {
    pub tau: Jet2,
    pub xi: Jet2,
    pub f: Jet2,
}

/// Generator of a point transformation together with its divergence term.
///
/// Only the value and first partials of `f` enter any residual, so second
/// partials of `f` are neither required nor audited.
#[derive(Clone)]
pub struct Generator {
    name: String,
    source: Source,
    display: Display,
    tau: PointFn,
    xi: PointFn,
    f: PointFn,
    synthesized: bool,
}

impl fmt::Debug for Generator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Generator")
            .field("name", &self.name)
            .field("source", &self.source)
            .field("display", &self.display)
            .finish_non_exhaustive()
    }
}

/// Partials of a plain function by central differences, packed as a jet.
fn synthesize(g: Arc<dyn Fn(f64, f64) -> f64 + Send + Sync>) -> PointFn {
    Arc::new(move |t: Jet2, q: Jet2| {
        let (t0, q0) = (t.v, q.v);
        let (h1t, h1q) = (phase::fd_step(t0), phase::fd_step(q0));
        let (h2t, h2q) = (1e2 * h1t, 1e2 * h1q);
        let c = g(t0, q0);
        let local = Jet2 {
            v: c,
            t: (g(t0 + h1t, q0) - g(t0 - h1t, q0)) / (2.0 * h1t),
            q: (g(t0, q0 + h1q) - g(t0, q0 - h1q)) / (2.0 * h1q),
            tt: (g(t0 + h2t, q0) - 2.0 * c + g(t0 - h2t, q0)) / (h2t * h2t),
            qq: (g(t0, q0 + h2q) - 2.0 * c + g(t0, q0 - h2q)) / (h2q * h2q),
            tq: (g(t0 + h2t, q0 + h2q) - g(t0 + h2t, q0 - h2q) - g(t0 - h2t, q0 + h2q)
                + g(t0 - h2t, q0 - h2q))
                / (4.0 * h2t * h2q),
        };
        Jet2::compose(local, t, q)
    })
}

impl Generator {
    pub fn new<T, X, F>(name: impl Into<String>, source: Source, tau: T, xi: X, f: F) -> Self
    where
        T: Fn(Jet2, Jet2) -> Jet2 + Send + Sync + 'static,
        X: Fn(Jet2, Jet2) -> Jet2 + Send + Sync + 'static,
        F: Fn(Jet2, Jet2) -> Jet2 + Send + Sync + 'static,
    {
        Generator {
            name: name.into(),
            source,
            display: Display::default(),
            tau: Arc::new(tau),
            xi: Arc::new(xi),
            f: Arc::new(f),
            synthesized: false,
        }
    }

    /// Generator with `f = 0`.
    pub fn point<T, X>(name: impl Into<String>, source: Source, tau: T, xi: X) -> Self
    where
        T: Fn(Jet2, Jet2) -> Jet2 + Send + Sync + 'static,
        X: Fn(Jet2, Jet2) -> Jet2 + Send + Sync + 'static,
    {
        Generator::new(name, source, tau, xi, |_, _| Jet2::constant(0.0))
    }

    /// User generator given by values only; partials come from finite
    /// differences and are audited at the looser tolerance.
    pub fn from_values<T, X, F>(name: impl Into<String>, tau: T, xi: X, f: F) -> Self
    where
        T: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        X: Fn(f64, f64) -> f64 + Send + Sync + 'static,
        F: Fn(f64, f64) -> f64 + Send + Sync + 'static,
    {
        Generator {
            name: name.into(),
            source: Source::User,
            display: Display::default(),
            tau: synthesize(Arc::new(tau)),
            xi: synthesize(Arc::new(xi)),
            f: synthesize(Arc::new(f)),
            synthesized: true,
        }
    }

    pub fn with_display(mut self, tau: &str, xi: &str, f: &str) -> Self {
        self.display = Display {
            tau: tau.to_owned(),
            xi: xi.to_owned(),
            f: f.to_owned(),
        };
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn source(&self) -> Source {
        self.source
    }

    pub fn display(&self) -> &Display {
        &self.display
    }

    pub fn is_synthesized(&self) -> bool {
        self.synthesized
    }

    pub fn eval(&self, t: f64, q: f64) -> PointJets {
        let (tj, qj) = (Jet2::var_t(t), Jet2::var_q(q));
        PointJets {
            tau: (self.tau)(tj, qj),
            xi: (self.xi)(tj, qj),
            f: (self.f)(tj, qj),
        }
    }

    /// `λX` with divergence term `λf`.
    pub fn scaled(&self, lambda: f64) -> Generator {
        let (tau, xi, f) = (self.tau.clone(), self.xi.clone(), self.f.clone());
        Generator {
            name: format!("{lambda}*{}", self.name),
            source: Source::Derived,
            display: Display::default(),
            tau: Arc::new(move |t, q| tau(t, q).scale(lambda)),
            xi: Arc::new(move |t, q| xi(t, q).scale(lambda)),
            f: Arc::new(move |t, q| f(t, q).scale(lambda)),
            synthesized: self.synthesized,
        }
    }

    /// `X + X′` with divergence term `f + f′`.
    pub fn sum(&self, other: &Generator) -> Generator {
        let add = |a: &PointFn, b: &PointFn| -> PointFn {
            let (a, b) = (a.clone(), b.clone());
            Arc::new(move |t, q| a(t, q) + b(t, q))
        };
        Generator {
            name: format!("{}+{}", self.name, other.name),
            source: Source::Derived,
            display: Display::default(),
            tau: add(&self.tau, &other.tau),
            xi: add(&self.xi, &other.xi),
            f: add(&self.f, &other.f),
            synthesized: self.synthesized || other.synthesized,
        }
    }

    /// Compare every supplied partial with central differences at `n` random
    /// `(t, q)` points.
    pub fn audit(&self, seed: u64, n: usize, region: &Region) -> Result<()> {
        let tol = if self.synthesized { 1e-5 } else { 1e-6 };
        let second_step = if self.synthesized { 1e-3 } else { 1e-6 };
        let parts: [(&'static str, &PointFn, bool); 3] = [
            ("tau", &self.tau, true),
            ("xi", &self.xi, true),
            ("f", &self.f, false),
        ];
        for s in sampling::states(seed, n, region) {
            let (t, q) = (s.t, s.q);
            for (what, g, second) in parts {
                let jet = |t: f64, q: f64| g(Jet2::var_t(t), Jet2::var_q(q));
                let val = |t: f64, q: f64| g(Jet2::constant(t), Jet2::constant(q)).v;
                let j = jet(t, q);
                let mag = [j.v, j.t, j.q, j.tt, j.tq, j.qq]
                    .iter()
                    .filter(|x| x.is_finite())
                    .fold(0.0f64, |m, x| m.max(x.abs()));
                let check = |a: f64, b: f64| -> Result<()> {
                    let rel = (a - b).abs() / a.abs().max(b.abs()).max(1e-3 * mag).max(1e-14);
                    if rel <= tol {
                        Ok(())
                    } else {
                        Err(Error::PartialAudit {
                            name: self.name.clone(),
                            what,
                            rel,
                        })
                    }
                };
                let (ht, hq) = (phase::fd_step(t), phase::fd_step(q));
                check(j.t, (val(t + ht, q) - val(t - ht, q)) / (2.0 * ht))?;
                check(j.q, (val(t, q + hq) - val(t, q - hq)) / (2.0 * hq))?;
                if second {
                    let (ht, hq) = (
                        second_step * t.abs().max(1.0),
                        second_step * q.abs().max(1.0),
                    );
                    let (tp, tm) = (jet(t + ht, q), jet(t - ht, q));
                    let (qp, qm) = (jet(t, q + hq), jet(t, q - hq));
                    check(j.tt, (tp.t - tm.t) / (2.0 * ht))?;
                    check(j.tq, (qp.t - qm.t) / (2.0 * hq))?;
                    check(j.tq, (tp.q - tm.q) / (2.0 * ht))?;
                    check(j.qq, (qp.q - qm.q) / (2.0 * hq))?;
                }
            }
        }
        Ok(())
    }
}

fn first_prolongation(j: &PointJets, qdot: f64) -> (f64, f64) {
    let dtau = j.tau.total_dt(qdot);
    (dtau, j.xi.total_dt(qdot) - qdot * dtau)
}

/// `X^[1](L) + D(τ) L`.
pub fn prolong1_l(gen: &Generator, lag: &impl Lagrangian, p: &OffShellPoint) -> Result<f64> {
    let j = gen.eval(p.t, p.q);
    let l = lag.parts(p.t, p.q, p.qdot)?;
    let (dtau, eta) = first_prolongation(&j, p.qdot);
    Ok(j.tau.v * l.dt + j.xi.v * l.dq + eta * l.dv + dtau * l.value)
}

/// `X^[1](L) + D(τ) L − D(f)`, zero identically for a strong Noether symmetry.
pub fn rund_trautman_residual(
    gen: &Generator,
    lag: &impl Lagrangian,
    p: &OffShellPoint,
) -> Result<f64> {
    let df = gen.eval(p.t, p.q).f.total_dt(p.qdot);
    Ok(prolong1_l(gen, lag, p)? - df)
}

/// [`rund_trautman_residual`] with the summed magnitude of its five terms.
pub fn rund_trautman_terms(
    gen: &Generator,
    lag: &impl Lagrangian,
    p: &OffShellPoint,
) -> Result<Residual> {
    let j = gen.eval(p.t, p.q);
    let l = lag.parts(p.t, p.q, p.qdot)?;
    let (dtau, eta) = first_prolongation(&j, p.qdot);
    let terms = [
        j.tau.v * l.dt,
        j.xi.v * l.dq,
        eta * l.dv,
        dtau * l.value,
        -j.f.total_dt(p.qdot),
    ];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|x| x.abs()).sum(),
    })
}

/// `ξ − q̇τ`.
pub fn characteristic(gen: &Generator, s: &State1D) -> f64 {
    let j = gen.eval(s.t, s.q);
    j.xi.v - s.qdot * j.tau.v
}

/// `I = f − Lτ − (∂L/∂q̇)(ξ − q̇τ)`.
pub fn noether_integral(gen: &Generator, lag: &impl Lagrangian, s: &State1D) -> Result<f64> {
    let j = gen.eval(s.t, s.q);
    let l = lag.parts(s.t, s.q, s.qdot)?;
    Ok(j.f.v - l.value * j.tau.v - l.dv * (j.xi.v - s.qdot * j.tau.v))
}

/// Divergence term `f + τ ∂Λ/∂t + ξ ∂Λ/∂q` for the Lagrangian `L + D(Λ)`,
/// returned as a generator with the same `τ`, `ξ`.
pub fn gauge_shift(gen: &Generator, lambda: &GaugeFn) -> Generator {
    let (tau, xi, f, lam) = (
        gen.tau.clone(),
        gen.xi.clone(),
        gen.f.clone(),
        lambda.clone(),
    );
    let shifted: PointFn = Arc::new(move |t, q| {
        let (a, b, c, l) = (tau(t, q), xi(t, q), f(t, q), lam(t, q));
        Jet2 {
            v: c.v + a.v * l.t + b.v * l.q,
            t: c.t + a.t * l.t + a.v * l.tt + b.t * l.q + b.v * l.tq,
            q: c.q + a.q * l.t + a.v * l.tq + b.q * l.q + b.v * l.qq,
            tt: f64::NAN,
            tq: f64::NAN,
            qq: f64::NAN,
        }
    });
    Generator {
        name: format!("{}~", gen.name),
        source: Source::Derived,
        display: Display::default(),
        tau: gen.tau.clone(),
        xi: gen.xi.clone(),
        f: shifted,
        synthesized: gen.synthesized,
    }
}

/// `−g^{-1} ∂I/∂q̇ = −e^{−2γt} ∂I/∂q̇`, the characteristic of the symmetry that
/// generates `I`.
pub fn converse_characteristic(
    integral: &(impl PhaseFunction + ?Sized),
    params: &Params,
    s: &State1D,
) -> Result<f64> {
    let w = params.weight(s.t)?;
    Ok(-phase::partial_qdot(integral, s)? / w)
}

/// Residual together with the size of the terms that cancel in it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residual {
    pub value: f64,
    pub scale: f64,
}

impl Residual {
    pub fn relative(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.value.abs() / self.scale.max(f64::MIN_POSITIVE)
        }
    }
}

/// `X^[2](E(L))` on the flow. With `Δ = q̈ + 2γq̇ + V′` and `E(L) = −e^{2γt}Δ`,
/// this is `−e^{2γt} (η₂ + 2γη₁ + ξV″)` once `Δ = 0`.
pub fn lie_residual(
    gen: &Generator,
    pot: &Potential,
    params: &Params,
    s: &State1D,
) -> Result<Residual> {
    let w = params.weight(s.t)?;
    let pv = pot.eval(params, s.q)?;
    let (v, a) = (s.qdot, eom_rhs(pot, params, s)?);
    let g2 = 2.0 * params.gamma;
    let j = gen.eval(s.t, s.q);
    let (dtau, eta1) = first_prolongation(&j, v);
    let d2xi = j.xi.total_dt2(v, a);
    let d2tau = j.tau.total_dt2(v, a);
    let eta2 = d2xi - v * d2tau - 2.0 * a * dtau;
    let value = -w * (eta2 + g2 * eta1 + j.xi.v * pv.d2);
    let scale = w
        * (d2xi.abs()
            + (v * d2tau).abs()
            + (2.0 * a * dtau).abs()
            + g2 * (j.xi.total_dt(v).abs() + (v * dtau).abs())
            + (j.xi.v * pv.d2).abs());
    Ok(Residual { value, scale })
}

/// `X^[1](I)` on the flow, with partials of `I` by central differences.
pub fn invariance_residual(
    gen: &Generator,
    integral: &(impl PhaseFunction + ?Sized),
    s: &State1D,
) -> Result<Residual> {
    let g = phase::gradient(integral, s)?;
    let j = gen.eval(s.t, s.q);
    let (_, eta) = first_prolongation(&j, s.qdot);
    let terms = [j.tau.v * g.t, j.xi.v * g.q, eta * g.qdot];
    Ok(Residual {
        value: terms.iter().sum(),
        scale: terms.iter().map(|x| x.abs()).sum(),
    })
}

/// Off-shell identity `D(I) − (ξ − q̇τ) E(L)` for the Noether integral of
/// `gen`, with `D(I)` formed from finite-difference partials of `I`.
pub fn noether_identity_residual(
    gen: &Generator,
    lag: &Bck,
    p: &OffShellPoint,
) -> Result<Residual> {
    let integral = |s: &State1D| noether_integral(gen, lag, s);
    let s = p.state();
    let terms = phase::total_derivative(&integral, &s, p.qddot)?;
    let rhs = characteristic(gen, &s) * lag.euler_lagrange(p.t, p.q, p.qdot, p.qddot)?;
    Ok(Residual {
        value: terms.iter().sum::<f64>() - rhs,
        scale: terms.iter().map(|x| x.abs()).sum::<f64>() + rhs.abs(),
    })
}
