//! Potentials, parameters and the Bateman-Caldirola-Kanai Lagrangian of the
//! one-dimensional damped particle.
//!
//! With unit mass and dissipation rate `γ` the Lagrangian is
//! `L = (½q̇² − V(q)) e^{2γt}`, whose Euler-Lagrange equation reduces to the
//! damped motion `q̈ = −V′(q) − 2γq̇`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Upper bound on the exponent `2γt` before `e^{2γt}` is evaluated.
pub const EXP_CAP: f64 = 30.0;

fn unit_mass() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Params {
    pub gamma: f64,
    /// Kept for documentation; every formula assumes unit mass.
    #[serde(default = "unit_mass")]
    pub mass: f64,
}

impl Params {
    pub fn new(gamma: f64) -> Result<Self> {
        let p = Params { gamma, mass: 1.0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.gamma.is_finite() && self.gamma > 0.0) {
            return Err(Error::InvalidParams(format!(
                "gamma must be finite and > 0, got {}",
                self.gamma
            )));
        }
        if self.mass != 1.0 {
            return Err(Error::InvalidParams(format!(
                "mass is fixed to 1, got {}",
                self.mass
            )));
        }
        Ok(())
    }

    /// `e^{2γt}`, refusing exponents above [`EXP_CAP`].
    pub fn weight(&self, t: f64) -> Result<f64> {
        let exponent = 2.0 * self.gamma * t;
        if exponent > EXP_CAP {
            return Err(Error::OverflowGuard {
                exponent,
                cap: EXP_CAP,
            });
        }
        Ok(exponent.exp())
    }

    /// Largest horizon allowed by [`EXP_CAP`].
    pub fn max_horizon(&self) -> f64 {
        EXP_CAP / (2.0 * self.gamma)
    }
}

/// Time-independent potential `V(q)`.
///
/// `Log`, `Power` and `Exp` are the three non-polynomial potentials that admit
/// exactly one Noether point symmetry; the `Power` and `Exp` variants include
/// their γ-dependent quadratic/linear parts, with γ read from [`Params`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum Potential {
    Free,
    /// `V = −F q`
    Linear {
        #[serde(rename = "F")]
        f: f64,
    },
    /// `V = A q²`
    Quadratic {
        #[serde(rename = "A")]
        a: f64,
    },
    /// `V₁ = A log q`
    Log {
        #[serde(rename = "A")]
        a: f64,
    },
    /// `V₂ = A q^α + 4γ²α/(α+2)² q²`
    Power {
        #[serde(rename = "A")]
        a: f64,
        alpha: f64,
    },
    /// `V₃ = A e^q + 8γ² q`
    Exp {
        #[serde(rename = "A")]
        a: f64,
    },
}

/// Value and first two derivatives of a potential at one coordinate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PotentialValue {
    pub v: f64,
    pub d1: f64,
    pub d2: f64,
}

const EXCLUDED_ALPHA: [f64; 4] = [-2.0, 0.0, 1.0, 2.0];

impl Potential {
    pub fn name(&self) -> &'static str {
        match self {
            Potential::Free => "free",
            Potential::Linear { .. } => "linear",
            Potential::Quadratic { .. } => "quadratic",
            Potential::Log { .. } => "log",
            Potential::Power { .. } => "power",
            Potential::Exp { .. } => "exp",
        }
    }

    pub fn validate(&self) -> Result<()> {
        let finite = |x: f64, what: &str| {
            if x.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParams(format!("{what} must be finite")))
            }
        };
        match *self {
            Potential::Free => Ok(()),
            Potential::Linear { f } => finite(f, "F"),
            Potential::Quadratic { a } | Potential::Log { a } | Potential::Exp { a } => {
                finite(a, "A")
            }
            Potential::Power { a, alpha } => {
                finite(a, "A")?;
                finite(alpha, "alpha")?;
                if EXCLUDED_ALPHA.contains(&alpha) {
                    return Err(Error::InvalidParams(format!(
                        "alpha = {alpha} is excluded (alpha must avoid -2, 0, 1, 2)"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Whether `q` lies in the potential's domain.
    pub fn in_domain(&self, q: f64) -> bool {
        match self {
            Potential::Log { .. } | Potential::Power { .. } => q > 0.0,
            _ => q.is_finite(),
        }
    }

    /// `V`, `V′`, `V″` at `q`.
    pub fn eval(&self, params: &Params, q: f64) -> Result<PotentialValue> {
        if !self.in_domain(q) {
            return Err(Error::Domain {
                potential: self.name(),
                q,
            });
        }
        let g = params.gamma;
        let pv = match *self {
            Potential::Free => PotentialValue {
                v: 0.0,
                d1: 0.0,
                d2: 0.0,
            },
            Potential::Linear { f } => PotentialValue {
                v: -f * q,
                d1: -f,
                d2: 0.0,
            },
            Potential::Quadratic { a } => PotentialValue {
                v: a * q * q,
                d1: 2.0 * a * q,
                d2: 2.0 * a,
            },
            Potential::Log { a } => PotentialValue {
                v: a * q.ln(),
                d1: a / q,
                d2: -a / (q * q),
            },
            Potential::Power { a, alpha } => {
                let b = 4.0 * g * g * alpha / ((alpha + 2.0) * (alpha + 2.0));
                PotentialValue {
                    v: a * q.powf(alpha) + b * q * q,
                    d1: a * alpha * q.powf(alpha - 1.0) + 2.0 * b * q,
                    d2: a * alpha * (alpha - 1.0) * q.powf(alpha - 2.0) + 2.0 * b,
                }
            }
            Potential::Exp { a } => {
                let e = q.exp();
                PotentialValue {
                    v: a * e + 8.0 * g * g * q,
                    d1: a * e + 8.0 * g * g,
                    d2: a * e,
                }
            }
        };
        Ok(pv)
    }
}

/// Phase point `(t, q, q̇)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct State1D {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
}

impl State1D {
    pub const fn new(t: f64, q: f64, qdot: f64) -> Self {
        State1D { t, q, qdot }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.is_finite() && self.qdot.is_finite()
    }
}

/// Acceleration `q̈ = −V′(q) − 2γq̇`.
pub fn eom_rhs(pot: &Potential, params: &Params, s: &State1D) -> Result<f64> {
    let pv = pot.eval(params, s.q)?;
    Ok(-pv.d1 - 2.0 * params.gamma * s.qdot)
}

/// `L = (½q̇² − V) e^{2γt}`.
pub fn lagrangian_bck(pot: &Potential, params: &Params, s: &State1D) -> Result<f64> {
    let w = params.weight(s.t)?;
    let pv = pot.eval(params, s.q)?;
    Ok((0.5 * s.qdot * s.qdot - pv.v) * w)
}

/// `H = q̇ ∂L/∂q̇ − L = (½q̇² + V) e^{2γt}`.
pub fn hamiltonian_bck(pot: &Potential, params: &Params, s: &State1D) -> Result<f64> {
    let w = params.weight(s.t)?;
    let pv = pot.eval(params, s.q)?;
    Ok((0.5 * s.qdot * s.qdot + pv.v) * w)
}
