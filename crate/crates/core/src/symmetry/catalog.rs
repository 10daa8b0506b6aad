//! The fixed catalog of generators for the linear, log, power and exp
//! potentials, with the Lie point symmetries of the linear potential and the
//! evolutionary representatives of their integrals.

use serde::Serialize;

use super::{Generator, Source};
use crate::error::{Error, Result};
use crate::integrals::{eval_integral, IntegralId};
use crate::jet::Jet2;
use crate::model::{Params, Potential, State1D};
use crate::sampling::Region;

/// Points per generator in the load-time partial audit.
pub const AUDIT_POINTS: usize = 1000;
const AUDIT_SEED: u64 = 0x5eed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    /// Strong Noether point symmetry with its divergence term.
    Noether,
    /// Lie point symmetry of the equation of motion only.
    Lie,
    /// Deliberately not a symmetry.
    Control,
}

fn e(t: Jet2, k: f64) -> Jet2 {
    (t * k).exp()
}

pub fn x1(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "X1",
        Source::LinearNoether,
        |_, _| Jet2::constant(0.0),
        |_, _| Jet2::constant(1.0),
        move |t, _| e(t, 2.0 * g) * (f / (2.0 * g)),
    )
    .with_display("0", "1", "F/(2γ) e^{2γt}")
}

pub fn x2(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "X2",
        Source::LinearNoether,
        |_, _| Jet2::constant(0.0),
        move |t, _| e(t, -2.0 * g),
        move |t, q| t * f - q * (2.0 * g),
    )
    .with_display("0", "e^{−2γt}", "Ft − 2γq")
}

pub fn x3(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "X3",
        Source::LinearNoether,
        move |t, _| e(t, 2.0 * g) * (2.0 * g),
        move |t, _| e(t, 2.0 * g) * f,
        move |t, q| (q * (8.0 * g * g) + f) * e(t, 4.0 * g) * (f / (4.0 * g)),
    )
    .with_display("2γ e^{2γt}", "F e^{2γt}", "F/(4γ) (8γ²q + F) e^{4γt}")
}

pub fn x4(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "X4",
        Source::LinearNoether,
        move |t, _| e(t, -2.0 * g),
        move |t, q| e(t, -2.0 * g) * (t * f - q * (2.0 * g)),
        move |t, q| q * q * (2.0 * g * g) + q * (1.0 - t * (2.0 * g)) * f + t * t * (0.5 * f * f),
    )
    .with_display(
        "e^{−2γt}",
        "e^{−2γt} (Ft − 2γq)",
        "2γ²q² + Fq(1 − 2γt) + ½F²t²",
    )
}

pub fn x5(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "X5",
        Source::LinearNoether,
        |_, _| Jet2::constant(2.0),
        move |t, q| t * f - q * (2.0 * g),
        move |t, q| {
            ((t * (2.0 * g) - 1.0) * f + q * (4.0 * g * g)) * e(t, 2.0 * g) * (f / (4.0 * g * g))
        },
    )
    .with_display("2", "Ft − 2γq", "F/(4γ²) (F(2γt − 1) + 4γ²q) e^{2γt}")
}

pub fn v1(params: &Params, a: f64) -> Generator {
    let g = params.gamma;
    Generator::new(
        "V1",
        Source::SingleNoether,
        move |t, _| e(t, -2.0 * g),
        move |t, q| e(t, -2.0 * g) * q * (-2.0 * g),
        move |t, q| (q * q * g + t * a) * (2.0 * g),
    )
    .with_display("e^{−2γt}", "−2γq e^{−2γt}", "2γ(γq² + At)")
}

pub fn v2(params: &Params, alpha: f64) -> Generator {
    let g = params.gamma;
    let k = alpha + 2.0;
    Generator::new(
        "V2",
        Source::SingleNoether,
        move |t, _| e(t, 2.0 * g * (alpha - 2.0) / k),
        move |t, q| e(t, 2.0 * g * (alpha - 2.0) / k) * q * (-4.0 * g / k),
        move |t, q| q * q * e(t, 4.0 * g * alpha / k) * (4.0 * g * g * (2.0 - alpha) / (k * k)),
    )
    .with_display(
        "e^{2γ(α−2)t/(α+2)}",
        "−4γ/(α+2) q e^{2γ(α−2)t/(α+2)}",
        "4γ²(2−α)/(α+2)² q² e^{4γαt/(α+2)}",
    )
}

pub fn v3(params: &Params) -> Generator {
    let g = params.gamma;
    Generator::new(
        "V3",
        Source::SingleNoether,
        move |t, _| e(t, 2.0 * g),
        move |t, _| e(t, 2.0 * g) * (-4.0 * g),
        move |t, q| (1.0 - q) * e(t, 4.0 * g) * (8.0 * g * g),
    )
    .with_display("e^{2γt}", "−4γ e^{2γt}", "8γ²(1 − q) e^{4γt}")
}

/// Time translation `∂t`.
pub fn time_translation(name: &str) -> Generator {
    Generator::point(
        name,
        Source::Elementary,
        |_, _| Jet2::constant(1.0),
        |_, _| Jet2::constant(0.0),
    )
    .with_display("1", "0", "0")
}

/// Space translation `∂q`.
pub fn space_translation() -> Generator {
    Generator::point(
        "Dq",
        Source::Elementary,
        |_, _| Jet2::constant(0.0),
        |_, _| Jet2::constant(1.0),
    )
    .with_display("0", "1", "0")
}

/// `q ∂q`, not a symmetry of any catalog equation with `V″ ≠ 0` or `F ≠ 0`.
pub fn control() -> Generator {
    Generator::point(
        "qDq",
        Source::Elementary,
        |_, _| Jet2::constant(0.0),
        |_, q| q,
    )
    .with_display("0", "q", "0")
}

pub fn x7(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    let w = move |t: Jet2, q: Jet2| t * f - q * (2.0 * g);
    Generator::point("X7", Source::LiePoint, w, move |t, q| w(t, q) * w(t, q)).with_display(
        "Ft − 2γq",
        "(Ft − 2γq)²",
        "",
    )
}

pub fn x8(params: &Params, f: f64) -> Generator {
    let g = params.gamma;
    let w = move |t: Jet2, q: Jet2| (t * f - q * (2.0 * g)) * e(t, 2.0 * g);
    Generator::point(
        "X8",
        Source::LiePoint,
        move |t, q| w(t, q) * (2.0 * g),
        move |t, q| w(t, q) * f,
    )
    .with_display("2γ e^{2γt} (Ft − 2γq)", "F e^{2γt} (Ft − 2γq)", "")
}

/// One catalog generator bound to a potential.
#[derive(Debug, Clone)]
pub struct Entry {
    pub generator: Generator,
    pub kind: Kind,
    pub integral: Option<IntegralId>,
}

/// Generators that apply to one potential, audited on load.
#[derive(Debug, Clone)]
pub struct Catalog {
    pub pot: Potential,
    pub params: Params,
    pub entries: Vec<Entry>,
}

fn entry(generator: Generator, kind: Kind, integral: Option<IntegralId>) -> Entry {
    Entry {
        generator,
        kind,
        integral,
    }
}

impl Catalog {
    /// Build without the partial audit.
    pub fn build(pot: &Potential, params: &Params) -> Catalog {
        use IntegralId::*;
        let mut entries = Vec::new();
        match *pot {
            Potential::Linear { .. } | Potential::Free => {
                let f = match *pot {
                    Potential::Linear { f } => f,
                    _ => 0.0,
                };
                let n = Kind::Noether;
                entries.push(entry(x1(params, f), n, Some(I1)));
                entries.push(entry(x2(params, f), n, Some(I2)));
                entries.push(entry(x3(params, f), n, Some(I3)));
                entries.push(entry(x4(params, f), n, Some(I4)));
                entries.push(entry(x5(params, f), n, Some(I5)));
                entries.push(entry(time_translation("X6"), Kind::Lie, Some(I6)));
                entries.push(entry(x7(params, f), Kind::Lie, Some(I7)));
                entries.push(entry(x8(params, f), Kind::Lie, Some(I8)));
            }
            Potential::Log { a } => {
                entries.push(entry(v1(params, a), Kind::Noether, Some(IV1)));
                entries.push(entry(time_translation("Dt"), Kind::Lie, None));
            }
            Potential::Power { alpha, .. } => {
                entries.push(entry(v2(params, alpha), Kind::Noether, Some(IV2)));
                entries.push(entry(time_translation("Dt"), Kind::Lie, None));
            }
            Potential::Exp { .. } => {
                entries.push(entry(v3(params), Kind::Noether, Some(IV3)));
                entries.push(entry(time_translation("Dt"), Kind::Lie, None));
            }
            Potential::Quadratic { .. } => {
                entries.push(entry(time_translation("Dt"), Kind::Lie, None));
            }
        }
        entries.push(entry(control(), Kind::Control, None));
        Catalog {
            pot: *pot,
            params: *params,
            entries,
        }
    }

    /// Build and audit every generator's partials.
    pub fn load(pot: &Potential, params: &Params) -> Result<Catalog> {
        pot.validate()?;
        params.validate()?;
        let cat = Catalog::build(pot, params);
        for e in &cat.entries {
            e.generator
                .audit(AUDIT_SEED, AUDIT_POINTS, &Region::default())?;
        }
        Ok(cat)
    }

    /// Entry by generator name; `Dt` also finds the time translation listed
    /// as X6 for the linear family.
    pub fn get(&self, name: &str) -> Option<&Entry> {
        let found = self.entries.iter().find(|e| e.generator.name() == name);
        match (found, name) {
            (None, "Dt") => self.get("X6"),
            _ => found,
        }
    }

    pub fn of_kind(&self, kind: Kind) -> impl Iterator<Item = &Entry> + '_ {
        self.entries.iter().filter(move |e| e.kind == kind)
    }
}

/// Look up a catalog generator by name for `pot`.
pub fn generator(name: &str, pot: &Potential, params: &Params) -> Result<Generator> {
    Catalog::build(pot, params)
        .get(name)
        .map(|e| e.generator.clone())
        .ok_or_else(|| {
            Error::InvalidParams(format!(
                "no generator {name:?} for the {} potential",
                pot.name()
            ))
        })
}

/// Catalog listing row.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Record {
    pub name: String,
    pub source: Source,
    pub kind: Kind,
    pub binding: &'static str,
    pub tau: String,
    pub xi: String,
    pub f: String,
    pub integral: Option<IntegralId>,
    /// `noether_integral = sign · printed integral`
    pub sign: Option<f64>,
}

/// Every generator in the catalog, with symbolic formulas.
pub fn listing() -> Vec<Record> {
    let params = Params::new(1.0).expect("unit damping is valid");
    let pots = [
        Potential::Linear { f: 1.0 },
        Potential::Log { a: 1.0 },
        Potential::Power { a: 1.0, alpha: 3.0 },
        Potential::Exp { a: 1.0 },
    ];
    let mut out: Vec<Record> = Vec::new();
    for pot in pots {
        for e in Catalog::build(&pot, &params).entries {
            let binding = match e.kind {
                Kind::Noether => pot.name(),
                Kind::Lie if e.generator.name() == "Dt" => "any",
                Kind::Lie => pot.name(),
                Kind::Control => "any",
            };
            if out.iter().any(|r| r.name == e.generator.name()) {
                continue;
            }
            let d = e.generator.display().clone();
            out.push(Record {
                name: e.generator.name().to_owned(),
                source: e.generator.source(),
                kind: e.kind,
                binding,
                tau: d.tau,
                xi: d.xi,
                f: d.f,
                integral: e.integral,
                sign: e.integral.and_then(IntegralId::sign),
            });
        }
    }
    out
}

/// Velocity-dependent representative `μ(t, q, q̇) ∂q` of a Lie point symmetry
/// of the linear potential, in the form that generates the same integral as a
/// Noether symmetry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Evolutionary {
    Y6,
    Y7,
    Y8,
}

impl Evolutionary {
    pub const ALL: [Evolutionary; 3] = [Evolutionary::Y6, Evolutionary::Y7, Evolutionary::Y8];

    pub fn integral(self) -> IntegralId {
        match self {
            Evolutionary::Y6 => IntegralId::I6,
            Evolutionary::Y7 => IntegralId::I7,
            Evolutionary::Y8 => IntegralId::I8,
        }
    }

    /// `μ`: `q̇/I1`, `(Ft − 2γq)/(2γI2 + F)²`, `(Ft − 2γq)/I1²`.
    pub fn mu(self, params: &Params, f: f64, s: &State1D) -> Result<f64> {
        let pot = Potential::Linear { f };
        let g2 = 2.0 * params.gamma;
        let i1 = eval_integral(IntegralId::I1, &pot, params, s)?;
        let i2 = eval_integral(IntegralId::I2, &pot, params, s)?;
        let w = f * s.t - g2 * s.q;
        Ok(match self {
            Evolutionary::Y6 => s.qdot / i1,
            Evolutionary::Y7 => w / (g2 * i2 + f).powi(2),
            Evolutionary::Y8 => w / (i1 * i1),
        })
    }

    /// Constant `c` with `converse_characteristic(I) = c · μ`.
    pub fn factor(self, params: &Params) -> f64 {
        let g2 = 2.0 * params.gamma;
        match self {
            Evolutionary::Y6 | Evolutionary::Y7 => -g2,
            Evolutionary::Y8 => g2,
        }
    }
}
