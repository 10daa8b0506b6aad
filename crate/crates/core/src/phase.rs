//! Functions on phase space `(t, q, q̇)` and their finite-difference partials.

use crate::error::Result;
use crate::model::State1D;

/// Central-difference step for a coordinate of size `x`.
pub fn fd_step(x: f64) -> f64 {
    1e-6 * x.abs().max(1.0)
}

/// A scalar function of `(t, q, q̇)`, such as a first integral.
pub trait PhaseFunction: Sync {
    fn value(&self, s: &State1D) -> Result<f64>;

    /// Analytic `∂/∂q̇` when known.
    fn d_qdot(&self, _s: &State1D) -> Option<Result<f64>> {
        None
    }
}

impl<F> PhaseFunction for F
where
    F: Fn(&State1D) -> Result<f64> + Sync,
{
    fn value(&self, s: &State1D) -> Result<f64> {
        self(s)
    }
}

/// `(∂/∂t, ∂/∂q, ∂/∂q̇)` by central differences.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gradient {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
}

pub fn gradient(f: &(impl PhaseFunction + ?Sized), s: &State1D) -> Result<Gradient> {
    let c = |d: State1D, h: f64, e: State1D| -> Result<f64> {
        Ok((f.value(&d)? - f.value(&e)?) / (2.0 * h))
    };
    let (ht, hq) = (fd_step(s.t), fd_step(s.q));
    Ok(Gradient {
        t: c(
            State1D { t: s.t + ht, ..*s },
            ht,
            State1D { t: s.t - ht, ..*s },
        )?,
        q: c(
            State1D { q: s.q + hq, ..*s },
            hq,
            State1D { q: s.q - hq, ..*s },
        )?,
        qdot: partial_qdot(f, s)?,
    })
}

/// `∂f/∂q̇`, analytic when the function supplies it.
pub fn partial_qdot(f: &(impl PhaseFunction + ?Sized), s: &State1D) -> Result<f64> {
    if let Some(d) = f.d_qdot(s) {
        return d;
    }
    let h = fd_step(s.qdot);
    let up = f.value(&State1D {
        qdot: s.qdot + h,
        ..*s
    })?;
    let dn = f.value(&State1D {
        qdot: s.qdot - h,
        ..*s
    })?;
    Ok((up - dn) / (2.0 * h))
}

/// Total derivative `∂t f + q̇ ∂q f + q̈ ∂q̇ f` from fourth-order central
/// differences with a wider step, for identities checked near round-off.
pub fn total_derivative(
    f: &(impl PhaseFunction + ?Sized),
    s: &State1D,
    qddot: f64,
) -> Result<[f64; 3]> {
    let d = |shift: &dyn Fn(f64) -> State1D, x: f64| -> Result<f64> {
        let h = 1e-3 * x.abs().max(0.1);
        let v = |k: f64| f.value(&shift(k * h));
        Ok((8.0 * (v(1.0)? - v(-1.0)?) - (v(2.0)? - v(-2.0)?)) / (12.0 * h))
    };
    let ft = d(&|h| State1D { t: s.t + h, ..*s }, s.t)?;
    let fq = d(&|h| State1D { q: s.q + h, ..*s }, s.q)?;
    let fv = d(
        &|h| State1D {
            qdot: s.qdot + h,
            ..*s
        },
        s.qdot,
    )?;
    Ok([ft, s.qdot * fq, qddot * fv])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn gradient_of_a_polynomial() {
        let f = |s: &State1D| Ok(s.t * s.q * s.q + s.qdot.powi(3));
        let s = State1D::new(1.5, -2.0, 0.5);
        let g = gradient(&f, &s).unwrap();
        assert_relative_eq!(g.t, 4.0, max_relative = 1e-9);
        assert_relative_eq!(g.q, -6.0, max_relative = 1e-9);
        assert_relative_eq!(g.qdot, 0.75, max_relative = 1e-9);
    }
}
