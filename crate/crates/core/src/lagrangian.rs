//! Lagrangians as seen by the symmetry machinery: value and first partials
//! at a phase point, plus gauge-shifted variants `L + D(Λ)`.

use std::sync::Arc;

use crate::error::Result;
use crate::jet::Jet2;
use crate::model::{Params, Potential};

/// `L` and its partials `∂L/∂t`, `∂L/∂q`, `∂L/∂q̇` at one point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LagrangianParts {
    pub value: f64,
    pub dt: f64,
    pub dq: f64,
    pub dv: f64,
}

pub trait Lagrangian: Sync {
    fn parts(&self, t: f64, q: f64, qdot: f64) -> Result<LagrangianParts>;
}

/// The BCK Lagrangian `(½q̇² − V) e^{2γt}` for one potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bck {
    pub pot: Potential,
    pub params: Params,
}

impl Bck {
    pub fn new(pot: Potential, params: Params) -> Self {
        Bck { pot, params }
    }

    /// Euler-Lagrange expression `E(L) = −(q̈ + 2γq̇ + V′) e^{2γt}`.
    pub fn euler_lagrange(&self, t: f64, q: f64, qdot: f64, qddot: f64) -> Result<f64> {
        let w = self.params.weight(t)?;
        let pv = self.pot.eval(&self.params, q)?;
        Ok(-(qddot + 2.0 * self.params.gamma * qdot + pv.d1) * w)
    }
}

impl Lagrangian for Bck {
    fn parts(&self, t: f64, q: f64, qdot: f64) -> Result<LagrangianParts> {
        let w = self.params.weight(t)?;
        let pv = self.pot.eval(&self.params, q)?;
        let value = (0.5 * qdot * qdot - pv.v) * w;
        Ok(LagrangianParts {
            value,
            dt: 2.0 * self.params.gamma * value,
            dq: -pv.d1 * w,
            dv: qdot * w,
        })
    }
}

/// Gauge function `Λ(q, t)` evaluated as a jet in `(t, q)`.
pub type GaugeFn = Arc<dyn Fn(Jet2, Jet2) -> Jet2 + Send + Sync>;

/// `L̂ = L + D(Λ)`.
#[derive(Clone)]
pub struct Gauged<L> {
    pub base: L,
    pub lambda: GaugeFn,
}

impl<L: Lagrangian> Lagrangian for Gauged<L> {
    fn parts(&self, t: f64, q: f64, qdot: f64) -> Result<LagrangianParts> {
        let b = self.base.parts(t, q, qdot)?;
        let l = (self.lambda)(Jet2::var_t(t), Jet2::var_q(q));
        Ok(LagrangianParts {
            value: b.value + l.t + qdot * l.q,
            dt: b.dt + l.tt + qdot * l.tq,
            dq: b.dq + l.tq + qdot * l.qq,
            dv: b.dv + l.q,
        })
    }
}
