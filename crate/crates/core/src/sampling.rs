//! Seeded random draws of off-shell points and phase states.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::model::State1D;

/// Point `(t, q, q̇, q̈)` with all four coordinates independent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OffShellPoint {
    pub t: f64,
    pub q: f64,
    pub qdot: f64,
    pub qddot: f64,
}

impl OffShellPoint {
    pub const fn new(t: f64, q: f64, qdot: f64, qddot: f64) -> Self {
        OffShellPoint { t, q, qdot, qddot }
    }

    pub fn is_finite(&self) -> bool {
        self.t.is_finite() && self.q.is_finite() && self.qdot.is_finite() && self.qddot.is_finite()
    }

    pub fn state(&self) -> State1D {
        State1D::new(self.t, self.q, self.qdot)
    }
}

/// Box from which random points are drawn.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Region {
    pub t: (f64, f64),
    pub q: (f64, f64),
    pub qdot: (f64, f64),
    pub qddot: (f64, f64),
}

impl Default for Region {
    fn default() -> Self {
        Region {
            t: (0.0, 5.0),
            q: (0.1, 5.0),
            qdot: (-5.0, 5.0),
            qddot: (-5.0, 5.0),
        }
    }
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn draw(rng: &mut impl Rng, (lo, hi): (f64, f64)) -> f64 {
    if lo == hi {
        lo
    } else {
        rng.gen_range(lo..hi)
    }
}

pub fn offshell_points(seed: u64, n: usize, region: &Region) -> Vec<OffShellPoint> {
    let mut r = rng(seed);
    (0..n)
        .map(|_| OffShellPoint {
            t: draw(&mut r, region.t),
            q: draw(&mut r, region.q),
            qdot: draw(&mut r, region.qdot),
            qddot: draw(&mut r, region.qddot),
        })
        .collect()
}

pub fn states(seed: u64, n: usize, region: &Region) -> Vec<State1D> {
    offshell_points(seed, n, region)
        .iter()
        .map(OffShellPoint::state)
        .collect()
}
