//! Charts `(T, Q, P)` in which a Noether point symmetry becomes a time
//! translation, so the associated first integral is an autonomous Hamiltonian
//! `H̃(Q, P)`.
//!
//! `T` and `Q` follow the printed maps. The momenta were derived from
//! `Q′ = D(Q)/D(T)` (or from `∂L̃/∂Q′` for the two charts where `T` depends on
//! `q`) and are checked here against finite differences of `Q(T)`.
//! For every chart `H̃ = c · I` with a chart-specific constant `c`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::integrals::{eval_integral, IntegralId};
use crate::model::{Params, Potential, State1D};
use crate::par;
use crate::sampling::{self, Region};
use crate::symmetry::catalog;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ChartId {
    V1,
    V2,
    V3,
    X3,
    X4,
    X5,
    X1,
    X2,
}

impl ChartId {
    pub const ALL: [ChartId; 8] = [
        ChartId::V1,
        ChartId::V2,
        ChartId::V3,
        ChartId::X3,
        ChartId::X4,
        ChartId::X5,
        ChartId::X1,
        ChartId::X2,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ChartId::V1 => "V1",
            ChartId::V2 => "V2",
            ChartId::V3 => "V3",
            ChartId::X3 => "X3",
            ChartId::X4 => "X4",
            ChartId::X5 => "X5",
            ChartId::X1 => "X1",
            ChartId::X2 => "X2",
        }
    }

    /// The catalog integral that `H̃` reproduces.
    pub fn integral(self) -> IntegralId {
        match self {
            ChartId::V1 => IntegralId::IV1,
            ChartId::V2 => IntegralId::IV2,
            ChartId::V3 => IntegralId::IV3,
            ChartId::X3 => IntegralId::I3,
            ChartId::X4 => IntegralId::I4,
            ChartId::X5 => IntegralId::I5,
            ChartId::X1 => IntegralId::I1,
            ChartId::X2 => IntegralId::I2,
        }
    }

    /// `c` in `H̃ = c · I`.
    pub fn factor(self, params: &Params) -> f64 {
        let g = params.gamma;
        match self {
            ChartId::V1 | ChartId::V2 | ChartId::V3 => 1.0,
            ChartId::X3 => 1.0 / (2.0 * g),
            ChartId::X4 => 4.0 * g * g,
            ChartId::X5 => -2.0 * g * g,
            ChartId::X1 => -2.0 * g,
            ChartId::X2 => g,
        }
    }

    /// Condition on the state for the chart to be valid.
    pub fn window(self) -> &'static str {
        match self {
            ChartId::X1 => "q̇ < 0",
            ChartId::X2 => "2γq + q̇ < 0",
            ChartId::V1 => "q > 0",
            ChartId::V2 => "q in the domain of q^α",
            _ => "all states",
        }
    }

    pub fn momentum_map(self) -> &'static str {
        match self {
            ChartId::V1 => "q̇ + 2γq",
            ChartId::V2 => "(q̇ + 4γq/(α+2)) e^{2γαt/(α+2)}",
            ChartId::V3 => "(q̇ + 4γ) e^{2γt}",
            ChartId::X3 => "(F − 2γq̇) e^{2γt}/(2γ)",
            ChartId::X4 => "2γ(2γq + q̇ − Ft)",
            ChartId::X5 => "γ(2γq + 2q̇ − Ft) e^{γt}",
            ChartId::X1 => "(γq̇)²",
            ChartId::X2 => "(γ(2γq + q̇) e^{γt}/2)²",
        }
    }
}

impl fmt::Display for ChartId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChartId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ChartId::ALL
            .into_iter()
            .find(|c| c.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown chart {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ChartPoint {
    #[serde(rename = "T")]
    pub t: f64,
    #[serde(rename = "Q")]
    pub q: f64,
    #[serde(rename = "P")]
    pub p: f64,
}

/// Potential parameters a chart needs.
#[derive(Debug, Clone, Copy)]
enum Bound {
    Log { a: f64 },
    Power { a: f64, alpha: f64 },
    Exp { a: f64 },
    Linear { f: f64 },
}

fn bind(chart: ChartId, pot: &Potential) -> Result<Bound> {
    let b = match (chart, *pot) {
        (ChartId::V1, Potential::Log { a }) => Bound::Log { a },
        (ChartId::V2, Potential::Power { a, alpha }) => Bound::Power { a, alpha },
        (ChartId::V3, Potential::Exp { a }) => Bound::Exp { a },
        (
            ChartId::X1 | ChartId::X2 | ChartId::X3 | ChartId::X4 | ChartId::X5,
            Potential::Linear { f },
        ) => Bound::Linear { f },
        (ChartId::X1 | ChartId::X2 | ChartId::X3 | ChartId::X4 | ChartId::X5, Potential::Free) => {
            Bound::Linear { f: 0.0 }
        }
        _ => {
            return Err(Error::PotentialMismatch {
                id: chart.as_str().to_owned(),
                expected: chart.integral().binding(),
                found: pot.name(),
            })
        }
    };
    Ok(b)
}

fn out_of_window(chart: ChartId) -> Error {
    Error::OutOfWindow {
        chart: chart.as_str().to_owned(),
        sample: None,
    }
}

/// `(T, Q, P)` at a state.
pub fn chart_map(
    chart: ChartId,
    pot: &Potential,
    params: &Params,
    s: &State1D,
) -> Result<ChartPoint> {
    let bound = bind(chart, pot)?;
    params.weight(s.t)?;
    let g = params.gamma;
    let g2 = 2.0 * g;
    let (t, q, v) = (s.t, s.q, s.qdot);
    let e2 = (g2 * t).exp();
    let cp = match (chart, bound) {
        (ChartId::V1, _) => {
            if q <= 0.0 {
                return Err(out_of_window(chart));
            }
            ChartPoint {
                t: e2 / g2,
                q: q * e2,
                p: v + g2 * q,
            }
        }
        (ChartId::V2, Bound::Power { alpha, .. }) => {
            if !pot.in_domain(q) {
                return Err(out_of_window(chart));
            }
            let k = alpha + 2.0;
            ChartPoint {
                t: k / (g2 * (2.0 - alpha)) * (g2 * (2.0 - alpha) / k * t).exp(),
                q: q * (2.0 * g2 / k * t).exp(),
                p: (v + 2.0 * g2 * q / k) * (g2 * alpha / k * t).exp(),
            }
        }
        (ChartId::V3, _) => ChartPoint {
            t: -1.0 / (g2 * e2),
            q: q + 2.0 * g2 * t,
            p: (v + 2.0 * g2) * e2,
        },
        (ChartId::X3, Bound::Linear { f }) => ChartPoint {
            t: 1.0 / e2,
            q: g2 * q - f * t,
            p: (f - g2 * v) * e2 / g2,
        },
        (ChartId::X4, Bound::Linear { f }) => ChartPoint {
            t: e2,
            q: (f * (1.0 - g2 * t) + g2 * g2 * q) * e2,
            p: g2 * (g2 * q + v - f * t),
        },
        (ChartId::X5, Bound::Linear { f }) => {
            let e1 = (g * t).exp();
            ChartPoint {
                t: g * t,
                q: (f * (1.0 - g * t) + 2.0 * g * g * q) * e1,
                p: g * (g2 * q + 2.0 * v - f * t) * e1,
            }
        }
        (ChartId::X1, _) => {
            if v >= 0.0 {
                return Err(out_of_window(chart));
            }
            ChartPoint {
                t: 2.0 * g * g * q,
                q: e2,
                p: (g * v).powi(2),
            }
        }
        (ChartId::X2, _) => {
            let u = g2 * q + v;
            if u >= 0.0 {
                return Err(out_of_window(chart));
            }
            ChartPoint {
                t: 0.5 * g * g * q * e2,
                q: g * t,
                p: (0.5 * g * u * (g * t).exp()).powi(2),
            }
        }
        _ => unreachable!("bind() pairs charts with their potentials"),
    };
    Ok(cp)
}

fn domain(chart: ChartId, x: f64) -> Error {
    Error::Domain {
        potential: match chart {
            ChartId::V1 => "log",
            ChartId::V2 => "power",
            _ => "linear",
        },
        q: x,
    }
}

/// Terms of `H̃` before summation.
pub fn h_terms(chart: ChartId, cp: &ChartPoint, pot: &Potential) -> Result<[f64; 2]> {
    let kinetic = 0.5 * cp.p * cp.p;
    Ok(match (chart, bind(chart, pot)?) {
        (ChartId::V1, Bound::Log { a }) => {
            if cp.q <= 0.0 {
                return Err(domain(chart, cp.q));
            }
            [kinetic, a * cp.q.ln()]
        }
        (ChartId::V2, Bound::Power { a, alpha }) => {
            let x = a * cp.q.powf(alpha);
            if !x.is_finite() {
                return Err(domain(chart, cp.q));
            }
            [kinetic, x]
        }
        (ChartId::V3, Bound::Exp { a }) => [kinetic, a * cp.q.exp()],
        (ChartId::X3 | ChartId::X4, _) => [kinetic, 0.0],
        (ChartId::X5, _) => [kinetic, -0.5 * cp.q * cp.q],
        (ChartId::X1, Bound::Linear { f }) => {
            if cp.p <= 0.0 {
                return Err(domain(chart, cp.p));
            }
            [2.0 * cp.p.sqrt() * cp.q, f * cp.q]
        }
        (ChartId::X2, Bound::Linear { f }) => {
            if cp.p <= 0.0 {
                return Err(domain(chart, cp.p));
            }
            [2.0 * (-cp.q).exp() * cp.p.sqrt(), f * cp.q]
        }
        _ => unreachable!("bind() pairs charts with their potentials"),
    })
}

/// The autonomous Hamiltonian `H̃(Q, P)`.
pub fn h_tilde(chart: ChartId, cp: &ChartPoint, pot: &Potential) -> Result<f64> {
    let [a, b] = h_terms(chart, cp, pot)?;
    Ok(a + b)
}

/// `dQ/dT` predicted from `(Q, P)`: `P` when `τ ≠ 0`, and `−∂H̃/∂P` for the
/// two charts whose `T` is built from `q`.
pub fn q_prime(chart: ChartId, cp: &ChartPoint) -> f64 {
    match chart {
        ChartId::X1 => -cp.q / cp.p.sqrt(),
        ChartId::X2 => -(-cp.q).exp() / cp.p.sqrt(),
        _ => cp.p,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChartReport {
    pub chart: ChartId,
    pub equals_integral: IntegralId,
    pub factor: f64,
    /// `max |H̃ − H̃(t₀)| / max(|H̃(t₀)|, 1e-12)`
    pub htilde_drift: f64,
    /// `max |H̃ − c·I|` relative to the magnitude of the terms of `H̃`
    pub pointwise: f64,
    /// `max |ΔQ/ΔT − Q′|` over interior samples, relative to `max |Q′|`
    pub dq_dt: f64,
    /// `dT/dt` kept one sign along the trajectory
    pub t_monotone: bool,
}

pub fn chart_consistency(
    chart: ChartId,
    traj: &Trajectory,
    pot: &Potential,
    params: &Params,
) -> Result<ChartReport> {
    let c = chart.factor(params);
    let id = chart.integral();
    let rows = par::map(
        &traj.samples,
        |smp| -> Result<(ChartPoint, f64, f64, f64)> {
            let cp = chart_map(chart, pot, params, &smp.state)?;
            let [a, b] = h_terms(chart, &cp, pot)?;
            let i = eval_integral(id, pot, params, &smp.state)?;
            Ok((cp, a + b, a.abs() + b.abs(), i))
        },
    );
    let mut pts = Vec::with_capacity(rows.len());
    for (k, r) in rows.into_iter().enumerate() {
        pts.push(r.map_err(|e| e.at_sample(k))?);
    }
    let h0 = pts[0].1;
    let htilde_drift = par::max_abs(pts.iter().map(|p| p.1 - h0)) / h0.abs().max(1e-12);
    let pointwise = pts
        .iter()
        .map(|&(_, h, scale, i)| {
            let d = h - c * i;
            if d == 0.0 {
                0.0
            } else {
                d.abs() / scale.max((c * i).abs()).max(f64::MIN_POSITIVE)
            }
        })
        .fold(0.0, f64::max);
    let qp_max = par::max_abs(pts.iter().map(|p| q_prime(chart, &p.0)));
    let mut dq_dt = 0.0f64;
    for k in 1..pts.len().saturating_sub(1) {
        let (a, b) = (&pts[k - 1].0, &pts[k + 1].0);
        let fd = (b.q - a.q) / (b.t - a.t);
        dq_dt = dq_dt.max((fd - q_prime(chart, &pts[k].0)).abs() / qp_max.max(f64::MIN_POSITIVE));
    }
    let dts: Vec<f64> = pts.windows(2).map(|w| w[1].0.t - w[0].0.t).collect();
    let t_monotone = dts.iter().all(|d| *d > 0.0) || dts.iter().all(|d| *d < 0.0);
    Ok(ChartReport {
        chart,
        equals_integral: id,
        factor: c,
        htilde_drift,
        pointwise,
        dq_dt,
        t_monotone,
    })
}

/// `Ṽ = (Vτ − ξ²/(2τ)) e^{2γt} + f` from the chart's generator, at `(t, q)`.
pub fn v_tilde(chart: ChartId, pot: &Potential, params: &Params, t: f64, q: f64) -> Result<f64> {
    let gen = catalog::generator(chart.as_str(), pot, params)?;
    let j = gen.eval(t, q);
    let v = pot.eval(params, q)?.v;
    let w = params.weight(t)?;
    Ok((v * j.tau.v - j.xi.v * j.xi.v / (2.0 * j.tau.v)) * w + j.f.v)
}

/// `q` at time `t` on the level set `Q = const` of a single-symmetry chart.
fn q_on_level(chart: ChartId, pot: &Potential, params: &Params, big_q: f64, t: f64) -> f64 {
    let g2 = 2.0 * params.gamma;
    match (chart, *pot) {
        (ChartId::V2, Potential::Power { alpha, .. }) => {
            big_q * (-2.0 * g2 * t / (alpha + 2.0)).exp()
        }
        (ChartId::V3, _) => big_q - 2.0 * g2 * t,
        _ => big_q * (-g2 * t).exp(),
    }
}

/// Largest relative spread of `Ṽ` between pairs of points with the same `Q`
/// and different `T`, for the V1/V2/V3 charts.
pub fn v_tilde_independence(
    chart: ChartId,
    pot: &Potential,
    params: &Params,
    seed: u64,
    n: usize,
) -> Result<f64> {
    if !matches!(chart, ChartId::V1 | ChartId::V2 | ChartId::V3) {
        return Err(Error::Unsupported(format!("Ṽ check on chart {chart}")));
    }
    let horizon = 5.0f64.min(0.25 * params.max_horizon());
    let region = Region {
        t: (0.0, horizon),
        q: (0.2, 3.0),
        ..Region::default()
    };
    let draws = sampling::offshell_points(seed, n, &region);
    let mut worst = 0.0f64;
    for p in draws {
        let s1 = State1D::new(p.t, p.q, 0.0);
        let big_q = chart_map(chart, pot, params, &s1)?.q;
        // second time drawn from the q̇ coordinate, mapped into [0, horizon)
        let t2 = (p.qdot + 5.0) / 10.0 * horizon;
        let q2 = q_on_level(chart, pot, params, big_q, t2);
        let a = v_tilde(chart, pot, params, p.t, p.q)?;
        let b = v_tilde(chart, pot, params, t2, q2)?;
        worst = worst.max((a - b).abs() / a.abs().max(b.abs()).max(1.0));
    }
    Ok(worst)
}
