//! Closed-form first integrals and their drift along trajectories.
//!
//! Every integral is stored exactly as printed for its family. The Noether
//! integrals produced by [`crate::symmetry::noether_integral`] agree with them
//! up to the per-entry [`IntegralId::sign`].

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::Trajectory;
use crate::error::{Error, Result};
use crate::model::{Params, Potential, State1D};
use crate::par;
use crate::phase::PhaseFunction;
use crate::sampling::{self, Region};

/// Relative proximity to a singular set that is treated as singular.
pub const SINGULAR_THRESHOLD: f64 = 1e-9;
/// Floor of the drift normalization.
pub const DRIFT_ATOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum IntegralId {
    I1,
    I2,
    I3,
    I4,
    I5,
    I6,
    I7,
    I8,
    IV1,
    IV2,
    IV3,
}

/// Which family of symmetries an integral belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    LinearNoether,
    SingleNoether,
    LiePoint,
}

impl IntegralId {
    pub const ALL: [IntegralId; 11] = [
        IntegralId::I1,
        IntegralId::I2,
        IntegralId::I3,
        IntegralId::I4,
        IntegralId::I5,
        IntegralId::I6,
        IntegralId::I7,
        IntegralId::I8,
        IntegralId::IV1,
        IntegralId::IV2,
        IntegralId::IV3,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntegralId::I1 => "I1",
            IntegralId::I2 => "I2",
            IntegralId::I3 => "I3",
            IntegralId::I4 => "I4",
            IntegralId::I5 => "I5",
            IntegralId::I6 => "I6",
            IntegralId::I7 => "I7",
            IntegralId::I8 => "I8",
            IntegralId::IV1 => "IV1",
            IntegralId::IV2 => "IV2",
            IntegralId::IV3 => "IV3",
        }
    }

    pub fn family(self) -> Family {
        use IntegralId::*;
        match self {
            I1 | I2 | I3 | I4 | I5 => Family::LinearNoether,
            I6 | I7 | I8 => Family::LiePoint,
            IV1 | IV2 | IV3 => Family::SingleNoether,
        }
    }

    /// Name of the potential variant the formula is written for.
    pub fn binding(self) -> &'static str {
        use IntegralId::*;
        match self {
            I1 | I2 | I3 | I4 | I5 | I6 | I7 | I8 => "linear",
            IV1 => "log",
            IV2 => "power",
            IV3 => "exp",
        }
    }

    /// Overall sign `s` with `noether_integral = s · printed`, for integrals
    /// that come from a Noether point symmetry.
    pub fn sign(self) -> Option<f64> {
        use IntegralId::*;
        match self {
            I1 | I5 => Some(-1.0),
            I2 | I3 | I4 | IV1 | IV2 | IV3 => Some(1.0),
            I6 | I7 | I8 => None,
        }
    }

    /// Name of the generator that produces this integral.
    pub fn generator(self) -> &'static str {
        use IntegralId::*;
        match self {
            I1 => "X1",
            I2 => "X2",
            I3 => "X3",
            I4 => "X4",
            I5 => "X5",
            I6 => "X6",
            I7 => "X7",
            I8 => "X8",
            IV1 => "V1",
            IV2 => "V2",
            IV3 => "V3",
        }
    }

    pub fn singular_set(self) -> &'static str {
        use IntegralId::*;
        match self {
            I6 | I8 => "I1 = 0 (2γq̇ = F)",
            I7 => "2γI2 + F = 0",
            IV1 => "q ≤ 0",
            IV2 => "outside the domain of q^α",
            _ => "none",
        }
    }

    pub fn info(self) -> IntegralInfo {
        IntegralInfo {
            id: self,
            family: self.family(),
            binding: self.binding(),
            sign: self.sign(),
            generator: self.generator(),
            singular_set: self.singular_set(),
        }
    }
}

impl fmt::Display for IntegralId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntegralId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        IntegralId::ALL
            .into_iter()
            .find(|id| id.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParams(format!("unknown integral id {s:?}")))
    }
}

/// Catalog metadata of one integral.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegralInfo {
    pub id: IntegralId,
    pub family: Family,
    pub binding: &'static str,
    pub sign: Option<f64>,
    pub generator: &'static str,
    pub singular_set: &'static str,
}

fn force(id: IntegralId, pot: &Potential) -> Result<f64> {
    match *pot {
        Potential::Linear { f } => Ok(f),
        // the free particle is the F = 0 member of the linear family
        Potential::Free => Ok(0.0),
        _ => Err(mismatch(id, pot)),
    }
}

fn mismatch(id: IntegralId, pot: &Potential) -> Error {
    Error::PotentialMismatch {
        id: id.as_str().to_owned(),
        expected: id.binding(),
        found: pot.name(),
    }
}

fn singular(id: IntegralId) -> Error {
    Error::SingularPoint {
        id: id.as_str().to_owned(),
        sample: None,
    }
}

fn near_zero(x: f64, scale: f64) -> bool {
    x.abs() <= SINGULAR_THRESHOLD * scale
}

fn guarded_exp(x: f64) -> Result<f64> {
    if x.abs() > 700.0 {
        return Err(Error::OverflowGuard {
            exponent: x,
            cap: 700.0,
        });
    }
    Ok(x.exp())
}

/// Value of `id` at `s` with the bound potential's parameters.
pub fn eval_integral(id: IntegralId, pot: &Potential, params: &Params, s: &State1D) -> Result<f64> {
    use IntegralId::*;
    let g = params.gamma;
    let g2 = 2.0 * g;
    let w = params.weight(s.t)?;
    let (t, q, v) = (s.t, s.q, s.qdot);
    match id {
        I1 | I2 | I3 | I4 | I5 | I6 | I7 | I8 => {
            let f = force(id, pot)?;
            // I1 = 0 and 2γI2 + F = 0 in forms free of the exponential weight
            let i1_core = g2 * v - f;
            let i1_scale = (g2 * v).abs() + f.abs();
            let den7 = g2 * f * t - g2 * g2 * q - g2 * v + f;
            let den7_scale = (g2 * f * t).abs() + (g2 * g2 * q).abs() + (g2 * v).abs() + f.abs();
            Ok(match id {
                I1 => i1_core * w / g2,
                I2 => f * t - g2 * q - v,
                I3 => w * w * (g * v * v - f * v + f * f / (4.0 * g)),
                I4 => {
                    g2 * g * q * q - g2 * f * q * t + 0.5 * f * f * t * t + 0.5 * v * v - f * v * t
                        + g2 * q * v
                }
                I5 => {
                    w * (f * f * (1.0 - g2 * t) / (g2 * g2) + f * q - v * v + f * v * t
                        - g2 * q * v)
                }
                I6 => {
                    let log_part = if f == 0.0 {
                        0.0
                    } else {
                        if near_zero(i1_core, i1_scale) {
                            return Err(singular(id));
                        }
                        f * i1_core.abs().ln() - f * g2.ln()
                    };
                    log_part + g2 * g2 * q + g2 * v
                }
                I7 => {
                    if near_zero(den7, den7_scale) {
                        return Err(singular(id));
                    }
                    i1_core * w / (g2 * den7)
                }
                I8 => {
                    if near_zero(i1_core, i1_scale) {
                        return Err(singular(id));
                    }
                    g2 * den7 / (w * i1_core)
                }
                _ => unreachable!(),
            })
        }
        IV1 => {
            let Potential::Log { a } = *pot else {
                return Err(mismatch(id, pot));
            };
            if q <= 0.0 {
                return Err(singular(id));
            }
            let p = v + g2 * q;
            Ok(0.5 * p * p + a * q.ln() + g2 * a * t)
        }
        IV2 => {
            let Potential::Power { a, alpha } = *pot else {
                return Err(mismatch(id, pot));
            };
            if !pot.in_domain(q) {
                return Err(singular(id));
            }
            let p = v + 2.0 * g2 * q / (alpha + 2.0);
            let e = guarded_exp(2.0 * g2 * alpha * t / (alpha + 2.0))?;
            Ok((0.5 * p * p + a * q.powf(alpha)) * e)
        }
        IV3 => {
            let Potential::Exp { a } = *pot else {
                return Err(mismatch(id, pot));
            };
            let p = v + 2.0 * g2;
            Ok((0.5 * p * p + a * q.exp()) * w * w)
        }
    }
}

/// Analytic `∂I/∂q̇` where the catalog supplies it.
pub fn d_qdot(
    id: IntegralId,
    pot: &Potential,
    params: &Params,
    s: &State1D,
) -> Option<Result<f64>> {
    use IntegralId::*;
    let g2 = 2.0 * params.gamma;
    let (t, q, v) = (s.t, s.q, s.qdot);
    let w = match params.weight(t) {
        Ok(w) => w,
        Err(e) => return Some(Err(e)),
    };
    let f = match id {
        I1 | I2 | I3 | I4 | I5 | I6 | I7 | I8 => match force(id, pot) {
            Ok(f) => f,
            Err(e) => return Some(Err(e)),
        },
        _ => 0.0,
    };
    if matches!(id, I6 | I7 | I8) {
        // rejects the singular sets
        if let Err(e) = eval_integral(id, pot, params, s) {
            return Some(Err(e));
        }
    }
    let i1_core = g2 * v - f;
    let den7 = g2 * f * t - g2 * g2 * q - g2 * v + f;
    let d = match (id, *pot) {
        (I1, _) => w,
        (I2, _) => -1.0,
        (I3, _) => w * w * (g2 * v - f),
        (I4, _) => v - f * t + g2 * q,
        (I5, _) => w * (-2.0 * v + f * t - g2 * q),
        (I6, _) if f == 0.0 => g2,
        (I6, _) => f * g2 / i1_core + g2,
        (I7, _) => w * (den7 + i1_core) / (den7 * den7),
        (I8, _) => -g2 * g2 * (i1_core + den7) / (w * i1_core * i1_core),
        (IV1, Potential::Log { .. }) => v + g2 * q,
        (IV2, Potential::Power { alpha, .. }) => {
            let k = alpha + 2.0;
            match guarded_exp(2.0 * g2 * alpha * t / k) {
                Ok(e) => (v + 2.0 * g2 * q / k) * e,
                Err(err) => return Some(Err(err)),
            }
        }
        (IV3, Potential::Exp { .. }) => (v + 2.0 * g2) * w * w,
        _ => return None,
    };
    Some(Ok(d))
}

/// An integral bound to a potential and parameters, usable as a phase function.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FirstIntegral {
    pub id: IntegralId,
    pub pot: Potential,
    pub params: Params,
}

impl FirstIntegral {
    pub fn bind(id: IntegralId, pot: Potential, params: Params) -> Result<Self> {
        let ok = match id.binding() {
            "linear" => matches!(pot, Potential::Linear { .. } | Potential::Free),
            b => pot.name() == b,
        };
        if !ok {
            return Err(mismatch(id, &pot));
        }
        Ok(FirstIntegral { id, pot, params })
    }

    /// Integrals whose formulas apply to `pot`.
    pub fn all_for(pot: &Potential, params: &Params) -> Vec<FirstIntegral> {
        IntegralId::ALL
            .into_iter()
            .filter_map(|id| FirstIntegral::bind(id, *pot, *params).ok())
            .collect()
    }
}

impl PhaseFunction for FirstIntegral {
    fn value(&self, s: &State1D) -> Result<f64> {
        eval_integral(self.id, &self.pot, &self.params, s)
    }

    fn d_qdot(&self, s: &State1D) -> Option<Result<f64>> {
        d_qdot(self.id, &self.pot, &self.params, s)
    }
}

/// Deviation of an integral from its initial value along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftReport {
    pub integral: IntegralId,
    #[serde(rename = "I0")]
    pub i0: f64,
    pub max_drift: f64,
    pub normalized: f64,
}

pub fn drift(
    traj: &Trajectory,
    id: IntegralId,
    pot: &Potential,
    params: &Params,
) -> Result<DriftReport> {
    let values = par::map(&traj.samples, |smp| {
        eval_integral(id, pot, params, &smp.state)
    });
    let mut vals = Vec::with_capacity(values.len());
    for (i, v) in values.into_iter().enumerate() {
        vals.push(v.map_err(|e| e.at_sample(i))?);
    }
    let i0 = vals[0];
    let max_drift = par::max_abs(vals.iter().map(|v| v - i0));
    Ok(DriftReport {
        integral: id,
        i0,
        max_drift,
        normalized: max_drift / i0.abs().max(DRIFT_ATOL),
    })
}

/// Worst relative violation of one functional relation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelationCheck {
    pub relation: &'static str,
    pub max_rel: f64,
    pub points: usize,
}

/// Values of `I1..I8` (printed forms) at one state.
fn linear_family(pot: &Potential, params: &Params, s: &State1D) -> Result<[f64; 8]> {
    use IntegralId::*;
    let mut out = [0.0; 8];
    for (k, id) in [I1, I2, I3, I4, I5, I6, I7, I8].into_iter().enumerate() {
        out[k] = eval_integral(id, pot, params, s)?;
    }
    Ok(out)
}

/// Check the dependencies among `I1..I8` at `n` random states; states on a
/// singular set are skipped.
pub fn functional_relations_check(
    params: &Params,
    f: f64,
    seed: u64,
    n: usize,
) -> Vec<RelationCheck> {
    let pot = Potential::Linear { f };
    let g = params.gamma;
    let g2 = 2.0 * g;
    let region = Region {
        t: (0.0, 5.0f64.min(0.5 * params.max_horizon())),
        ..Region::default()
    };
    let states = sampling::states(seed, n, &region);
    let rows = par::map(&states, |s| {
        linear_family(&pot, params, s).ok().map(|r| (*s, r))
    });
    let names: [&'static str; 7] = [
        "I3 = γ I1²",
        "I4 = ½ I2²",
        "I5 = I1 (I2 − F/2γ)",
        "I6 = F log|I1| − 2γ I2",
        "I7 = I1 / (2γ I2 + F)",
        "I8 = (2γ I2 + F) / I1",
        "I7 · I8 = 1",
    ];
    let mut worst = [0.0f64; 7];
    let mut points = 0;
    for (s, [i1, i2, i3, i4, i5, i6, i7, i8]) in rows.into_iter().flatten() {
        points += 1;
        let (t, q, v) = (s.t, s.q, s.qdot);
        let w = params.weight(t).unwrap_or(f64::NAN);
        let d = g2 * i2 + f;
        let d_scale = (g2 * i2).abs() + f.abs();
        let i2_terms = (f * t).abs() + (g2 * q).abs() + v.abs();
        let i1_terms = w * ((g2 * v).abs() + f.abs()) / g2;
        // (lhs − rhs, magnitude of the terms that cancel in either side)
        let pairs = [
            (
                i3 - g * i1 * i1,
                w * w * (g * v * v + (f * v).abs() + f * f / (4.0 * g)),
            ),
            (i4 - 0.5 * i2 * i2, 0.5 * i2_terms * i2_terms),
            (
                i5 - i1 * (i2 - f / g2),
                i1_terms * (i2_terms + (f / g2).abs()),
            ),
            (
                i6 - (f * i1.abs().ln() - g2 * i2),
                (f * i1.abs().ln()).abs() + g2 * i2_terms + (f * (g2 * t - g2.ln())).abs(),
            ),
            (
                i7 - i1 / d,
                (i1 / d).abs() * (1.0 + (d_scale + g2 * i2_terms) / d.abs()),
            ),
            (
                i8 - d / i1,
                (d_scale + g2 * i2_terms) / i1.abs() * (1.0 + i1_terms / i1.abs()),
            ),
            (
                i7 * i8 - 1.0,
                1.0 + (d_scale + g2 * i2_terms) / d.abs() + i1_terms / i1.abs(),
            ),
        ];
        for (k, (diff, scale)) in pairs.into_iter().enumerate() {
            let rel = if diff == 0.0 {
                0.0
            } else {
                diff.abs() / scale.max(f64::MIN_POSITIVE)
            };
            worst[k] = if rel.is_nan() {
                f64::NAN
            } else {
                worst[k].max(rel)
            };
        }
    }
    names
        .into_iter()
        .zip(worst)
        .map(|(relation, max_rel)| RelationCheck {
            relation,
            max_rel,
            points,
        })
        .collect()
}

/// Determinant of `∂(I1, I2)/∂(q, q̇)` by central differences.
pub fn jacobian_i1_i2(params: &Params, f: f64, s: &State1D) -> Result<f64> {
    let pot = Potential::Linear { f };
    let i1 = FirstIntegral::bind(IntegralId::I1, pot, *params)?;
    let i2 = FirstIntegral::bind(IntegralId::I2, pot, *params)?;
    let fd = |i: &FirstIntegral, dq: f64, dv: f64| -> Result<f64> {
        let up = i.value(&State1D::new(s.t, s.q + dq, s.qdot + dv))?;
        let dn = i.value(&State1D::new(s.t, s.q - dq, s.qdot - dv))?;
        Ok((up - dn) / (2.0 * (dq + dv)))
    };
    let (hq, hv) = (crate::phase::fd_step(s.q), crate::phase::fd_step(s.qdot));
    Ok(fd(&i1, hq, 0.0)? * fd(&i2, 0.0, hv)? - fd(&i1, 0.0, hv)? * fd(&i2, hq, 0.0)?)
}

/// Sum with Neumaier compensation after ordering terms by magnitude.
fn careful_sum(mut terms: Vec<f64>) -> f64 {
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let (mut sum, mut comp) = (0.0f64, 0.0f64);
    for x in terms {
        let t = sum + x;
        comp += if sum.abs() >= x.abs() {
            (sum - t) + x
        } else {
            (x - t) + sum
        };
        sum = t;
    }
    sum + comp
}

/// `I5 − I4 + (F/2γ)²` with `I5` taken in the Noether-integral sign
/// convention, which tends to `½q̇² − Fq` as γ → 0. The terms are expanded and
/// summed with compensation so the large `(F/2γ)²` pieces cancel exactly.
pub fn energy_like(params: &Params, f: f64, s: &State1D) -> Result<f64> {
    let g2 = 2.0 * params.gamma;
    let w = params.weight(s.t)?;
    let (t, q, v) = (s.t, s.q, s.qdot);
    let k = f * f / (g2 * g2);
    // noether-signed I5 = −w (k(1 − 2γt) + Fq − v² + Fvt − 2γqv)
    let mut terms: Vec<f64> = [-k, k * g2 * t, -f * q, v * v, -f * v * t, g2 * q * v]
        .iter()
        .map(|x| x * w)
        .collect();
    // −I4
    terms.extend([
        -0.5 * g2 * g2 * q * q,
        g2 * f * q * t,
        -0.5 * f * f * t * t,
        -0.5 * v * v,
        f * v * t,
        -g2 * q * v,
    ]);
    terms.push(k);
    Ok(careful_sum(terms))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use approx::assert_relative_eq;

    fn lin(g: f64, f: f64) -> (Potential, Params) {
        (Potential::Linear { f }, Params::new(g).unwrap())
    }

    #[test]
    fn hand_values() {
        let (pot, p) = lin(0.5, 0.0);
        let s = State1D::new(0.0, 1.0, 0.0);
        assert_eq!(eval_integral(IntegralId::I2, &pot, &p, &s).unwrap(), -1.0);

        let (pot, p) = lin(0.5, 1.0);
        let s = State1D::new(0.0, 0.0, 0.0);
        assert_eq!(eval_integral(IntegralId::I1, &pot, &p, &s).unwrap(), -1.0);
        assert_relative_eq!(
            eval_integral(IntegralId::I5, &pot, &p, &s).unwrap(),
            1.0,
            max_relative = 1e-15
        );
        assert_relative_eq!(
            eval_integral(IntegralId::I3, &pot, &p, &s).unwrap(),
            0.5,
            max_relative = 1e-15
        );

        let pot = Potential::Log { a: 1.0 };
        let v = eval_integral(IntegralId::IV1, &pot, &p, &State1D::new(0.0, 2.0, 0.0)).unwrap();
        assert_relative_eq!(v, 2.0 + 2f64.ln(), max_relative = 1e-15);
    }

    #[test]
    fn mismatch_and_singular_errors() {
        let p = Params::new(0.5).unwrap();
        let s = State1D::new(0.0, 1.0, 1.0);
        assert!(matches!(
            eval_integral(IntegralId::IV1, &Potential::Linear { f: 1.0 }, &p, &s),
            Err(Error::PotentialMismatch { .. })
        ));
        assert!(matches!(
            eval_integral(IntegralId::I3, &Potential::Exp { a: 1.0 }, &p, &s),
            Err(Error::PotentialMismatch { .. })
        ));
        // 2γq̇ = F makes I1 vanish
        let pot = Potential::Linear { f: 1.0 };
        for id in [IntegralId::I6, IntegralId::I8] {
            assert!(matches!(
                eval_integral(id, &pot, &p, &s),
                Err(Error::SingularPoint { .. })
            ));
        }
        // 2γI2 + F = 0 at q = 1, q̇ = 0, t = 0
        assert!(matches!(
            eval_integral(IntegralId::I7, &pot, &p, &State1D::new(0.0, 1.0, 0.0)),
            Err(Error::SingularPoint { .. })
        ));
    }

    #[test]
    fn i4_vanishes_with_i2() {
        let (pot, p) = lin(0.3, 0.7);
        // I2 = Ft − 2γq − q̇ = 0
        let s = State1D::new(2.0, 1.0, 0.7 * 2.0 - 0.6);
        assert!(eval_integral(IntegralId::I2, &pot, &p, &s).unwrap().abs() < 1e-15);
        assert!(eval_integral(IntegralId::I4, &pot, &p, &s).unwrap().abs() < 1e-15);
    }

    #[test]
    fn analytic_qdot_partials_match_finite_differences() {
        let cases = [
            (Potential::Linear { f: 0.8 }, IntegralId::ALL[..8].to_vec()),
            (Potential::Free, vec![IntegralId::I6]),
            (Potential::Log { a: 1.2 }, vec![IntegralId::IV1]),
            (
                Potential::Power { a: 0.6, alpha: 2.5 },
                vec![IntegralId::IV2],
            ),
            (Potential::Exp { a: 0.3 }, vec![IntegralId::IV3]),
        ];
        let p = Params::new(0.4).unwrap();
        let s = State1D::new(1.3, 0.9, -0.4);
        for (pot, ids) in cases {
            for id in ids {
                let fi = FirstIntegral::bind(id, pot, p).unwrap();
                let analytic = fi.d_qdot(&s).unwrap().unwrap();
                let h = 1e-6;
                let fd = (fi
                    .value(&State1D {
                        qdot: s.qdot + h,
                        ..s
                    })
                    .unwrap()
                    - fi.value(&State1D {
                        qdot: s.qdot - h,
                        ..s
                    })
                    .unwrap())
                    / (2.0 * h);
                assert_relative_eq!(analytic, fd, max_relative = 1e-7);
            }
        }
    }

    #[test]
    fn relations_hold() {
        for (g, f) in [(0.5, 1.0), (0.2, -0.7), (1.0, 2.5)] {
            let p = Params::new(g).unwrap();
            for r in functional_relations_check(&p, f, 3, 1000) {
                assert!(r.points > 900, "{}: {} points", r.relation, r.points);
                assert!(r.max_rel <= 1e-10, "{}: {:e}", r.relation, r.max_rel);
            }
        }
    }

    #[test]
    fn jacobian_of_i1_i2_is_nonzero() {
        let p = Params::new(0.5).unwrap();
        for s in sampling::states(4, 50, &Region::default()) {
            let d = jacobian_i1_i2(&p, 1.0, &s).unwrap();
            assert_relative_eq!(d, 2.0 * 0.5 * (s.t).exp(), max_relative = 1e-6);
        }
    }

    #[test]
    fn free_particle_momentum_drift() {
        let p = Params::new(0.5).unwrap();
        let pot = Potential::Free;
        let cfg = IntegratorConfig::default();
        let tr = integrate(&pot, &p, State1D::new(0.0, 0.0, 1.0), 5.0, &cfg).unwrap();
        let r = drift(&tr, IntegralId::I1, &pot, &p).unwrap();
        assert!(r.normalized <= 1e-8, "{r:?}");
        assert_relative_eq!(r.i0, 1.0);
    }

    #[test]
    fn equilibrium_has_zero_drift() {
        let p = Params::new(0.5).unwrap();
        // V′ = A e^q + 8γ² vanishes at q = 0 for A = −8γ²
        let pot = Potential::Exp { a: -2.0 };
        let q0 = 0.0;
        let tr = integrate(
            &pot,
            &p,
            State1D::new(0.0, q0, 0.0),
            3.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        assert!(tr
            .samples
            .iter()
            .all(|s| s.state.q == q0 && s.state.qdot == 0.0));
        // time-independent combination: ½q̇² + V
        let e: Vec<f64> = tr
            .states()
            .map(|s| 0.5 * s.qdot * s.qdot + pot.eval(&p, s.q).unwrap().v)
            .collect();
        assert!(e.iter().all(|x| *x == e[0]));
    }

    #[test]
    fn singular_point_reports_sample_index() {
        // terminal velocity q̇ = F/2γ keeps I1 = 0 along the whole trajectory
        let (pot, p) = lin(0.5, 1.0);
        let tr = integrate(
            &pot,
            &p,
            State1D::new(0.0, 0.0, 1.0),
            1.0,
            &IntegratorConfig::default(),
        )
        .unwrap();
        let err = drift(&tr, IntegralId::I6, &pot, &p).unwrap_err();
        assert_eq!(
            err,
            Error::SingularPoint {
                id: "I6".into(),
                sample: Some(0)
            }
        );
    }

    #[test]
    fn single_noether_integrals_reduce_to_energy() {
        let p = Params::new(1e-8).unwrap();
        let s = State1D::new(0.3, 1.4, -0.6);
        for (pot, id) in [
            (Potential::Log { a: 1.1 }, IntegralId::IV1),
            (Potential::Power { a: 0.7, alpha: 3.0 }, IntegralId::IV2),
            (Potential::Exp { a: 0.9 }, IntegralId::IV3),
        ] {
            let e = 0.5 * s.qdot * s.qdot + pot.eval(&p, s.q).unwrap().v;
            let i = eval_integral(id, &pot, &p, &s).unwrap();
            assert!((i - e).abs() <= 1e-6, "{id}: {i} vs {e}");
        }
    }

    #[test]
    fn energy_like_limit() {
        let s = State1D::new(0.0, 1.0, 1.0);
        let p = Params::new(0.2).unwrap();
        // exact value ½q̇² − Fq − 2γ²q² at t = 0
        assert_relative_eq!(
            energy_like(&p, 1.0, &s).unwrap(),
            0.5 - 1.0 - 0.08,
            max_relative = 1e-12
        );
        let p = Params::new(1e-3).unwrap();
        let e = energy_like(&p, 1.0, &s).unwrap();
        assert_relative_eq!(e, -0.5 - 2e-6, max_relative = 1e-12);
    }

    #[test]
    fn ids_round_trip() {
        for id in IntegralId::ALL {
            assert_eq!(id.as_str().parse::<IntegralId>().unwrap(), id);
            assert_eq!(serde_json::to_string(&id).unwrap(), format!("\"{id}\""));
        }
        assert!("I9".parse::<IntegralId>().is_err());
    }
}
