//! Second-order forward-mode jets in the two variables `(t, q)`.
//!
//! A [`Jet2`] carries a value together with its exact gradient and Hessian,
//! so a point function written once over jets yields every partial the
//! prolongation formulas need. Arithmetic follows the usual chain rule for
//! truncated Taylor polynomials of degree two.

use std::ops::{Add, Div, Mul, Neg, Sub};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Jet2 {
    pub v: f64,
    pub t: f64,
    pub q: f64,
    pub tt: f64,
    pub tq: f64,
    pub qq: f64,
}

impl Jet2 {
    pub const fn constant(v: f64) -> Self {
        Jet2 {
            v,
            t: 0.0,
            q: 0.0,
            tt: 0.0,
            tq: 0.0,
            qq: 0.0,
        }
    }

    /// The independent variable `t` seeded at `value`.
    pub const fn var_t(value: f64) -> Self {
        Jet2 {
            v: value,
            t: 1.0,
            q: 0.0,
            tt: 0.0,
            tq: 0.0,
            qq: 0.0,
        }
    }

    /// The independent variable `q` seeded at `value`.
    pub const fn var_q(value: f64) -> Self {
        Jet2 {
            v: value,
            t: 0.0,
            q: 1.0,
            tt: 0.0,
            tq: 0.0,
            qq: 0.0,
        }
    }

    /// Compose with a scalar function given its value and first two derivatives
    /// at `self.v`.
    #[inline]
    fn chain(self, f0: f64, f1: f64, f2: f64) -> Self {
        Jet2 {
            v: f0,
            t: f1 * self.t,
            q: f1 * self.q,
            tt: f1 * self.tt + f2 * self.t * self.t,
            tq: f1 * self.tq + f2 * self.t * self.q,
            qq: f1 * self.qq + f2 * self.q * self.q,
        }
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.chain(e, e, e)
    }

    pub fn ln(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(self.v.ln(), inv, -inv * inv)
    }

    pub fn powf(self, n: f64) -> Self {
        let x = self.v;
        self.chain(
            x.powf(n),
            n * x.powf(n - 1.0),
            n * (n - 1.0) * x.powf(n - 2.0),
        )
    }

    pub fn powi(self, n: i32) -> Self {
        let x = self.v;
        let nf = f64::from(n);
        self.chain(
            x.powi(n),
            nf * x.powi(n - 1),
            nf * (nf - 1.0) * x.powi(n - 2),
        )
    }

    pub fn sqrt(self) -> Self {
        let s = self.v.sqrt();
        self.chain(s, 0.5 / s, -0.25 / (s * self.v))
    }

    pub fn recip(self) -> Self {
        let inv = 1.0 / self.v;
        self.chain(inv, -inv * inv, 2.0 * inv * inv * inv)
    }

    pub fn scale(self, c: f64) -> Self {
        Jet2 {
            v: c * self.v,
            t: c * self.t,
            q: c * self.q,
            tt: c * self.tt,
            tq: c * self.tq,
            qq: c * self.qq,
        }
    }

    /// Compose a local expansion `g` about `(t.v, q.v)` (partials with respect
    /// to the plain coordinates) with the jets `t` and `q`.
    pub fn compose(g: Jet2, t: Jet2, q: Jet2) -> Self {
        Jet2 {
            v: g.v,
            t: g.t * t.t + g.q * q.t,
            q: g.t * t.q + g.q * q.q,
            tt: g.t * t.tt
                + g.q * q.tt
                + g.tt * t.t * t.t
                + 2.0 * g.tq * t.t * q.t
                + g.qq * q.t * q.t,
            tq: g.t * t.tq
                + g.q * q.tq
                + g.tt * t.t * t.q
                + g.tq * (t.t * q.q + t.q * q.t)
                + g.qq * q.t * q.q,
            qq: g.t * t.qq
                + g.q * q.qq
                + g.tt * t.q * t.q
                + 2.0 * g.tq * t.q * q.q
                + g.qq * q.q * q.q,
        }
    }

    /// Total time derivative `D = ∂t + q̇ ∂q` of a point function.
    #[inline]
    pub fn total_dt(&self, qdot: f64) -> f64 {
        self.t + qdot * self.q
    }

    /// Second total derivative `D² = ∂tt + 2q̇ ∂tq + q̇² ∂qq + q̈ ∂q`.
    #[inline]
    pub fn total_dt2(&self, qdot: f64, qddot: f64) -> f64 {
        self.tt + 2.0 * qdot * self.tq + qdot * qdot * self.qq + qddot * self.q
    }

    pub fn is_finite(&self) -> bool {
        [self.v, self.t, self.q, self.tt, self.tq, self.qq]
            .iter()
            .all(|x| x.is_finite())
    }
}

impl From<f64> for Jet2 {
    fn from(v: f64) -> Self {
        Jet2::constant(v)
    }
}

impl Add for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v + o.v,
            t: self.t + o.t,
            q: self.q + o.q,
            tt: self.tt + o.tt,
            tq: self.tq + o.tq,
            qq: self.qq + o.qq,
        }
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(self, o: Jet2) -> Jet2 {
        self + (-o)
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    #[inline]
    fn neg(self) -> Jet2 {
        self.scale(-1.0)
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, o: Jet2) -> Jet2 {
        Jet2 {
            v: self.v * o.v,
            t: self.t * o.v + self.v * o.t,
            q: self.q * o.v + self.v * o.q,
            tt: self.tt * o.v + 2.0 * self.t * o.t + self.v * o.tt,
            tq: self.tq * o.v + self.t * o.q + self.q * o.t + self.v * o.tq,
            qq: self.qq * o.v + 2.0 * self.q * o.q + self.v * o.qq,
        }
    }
}

impl Div for Jet2 {
    type Output = Jet2;
    #[inline]
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, o: Jet2) -> Jet2 {
        self * o.recip()
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn add(mut self, c: f64) -> Jet2 {
        self.v += c;
        self
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn sub(mut self, c: f64) -> Jet2 {
        self.v -= c;
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn mul(self, c: f64) -> Jet2 {
        self.scale(c)
    }
}

impl Div<f64> for Jet2 {
    type Output = Jet2;
    #[inline]
    fn div(self, c: f64) -> Jet2 {
        self.scale(1.0 / c)
    }
}

impl Add<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn add(self, j: Jet2) -> Jet2 {
        j + self
    }
}

impl Sub<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn sub(self, j: Jet2) -> Jet2 {
        (-j) + self
    }
}

impl Mul<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn mul(self, j: Jet2) -> Jet2 {
        j.scale(self)
    }
}

impl Div<Jet2> for f64 {
    type Output = Jet2;
    #[inline]
    fn div(self, j: Jet2) -> Jet2 {
        j.recip().scale(self)
    }
}
