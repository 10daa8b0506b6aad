//! Non-local constants of motion and the action along solutions.
//!
//! For any point transformation, `∫(X^[1]L + D(τ)L) dt − Lτ − L_q̇(ξ − q̇τ)` is
//! constant on solutions, symmetry or not. For `∂t` it reads `H + 2γA`, which
//! turns the action `A = ∫L dt` into a local function of the state.

use serde::Serialize;

use crate::dynamics::Trajectory;
use crate::error::Result;
use crate::lagrangian::{Bck, Lagrangian};
use crate::model::{hamiltonian_bck, Params, Potential};
use crate::par;
use crate::sampling::OffShellPoint;
use crate::symmetry::{prolong1_l, Generator};

/// A constant of motion sampled on a trajectory's grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WeakConstantSeries {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
    /// Largest magnitude among the terms summed into the constant.
    pub scale: f64,
    /// `max |𝓘 − 𝓘(t₀)| / max(|𝓘(t₀)|, scale, 1e-12)`
    pub drift: f64,
}

impl WeakConstantSeries {
    fn new(times: Vec<f64>, values: Vec<f64>, scale: f64) -> Self {
        let v0 = values[0];
        let dev = par::max_abs(values.iter().map(|v| v - v0));
        let drift = dev / v0.abs().max(scale).max(1e-12);
        WeakConstantSeries {
            times,
            values,
            scale,
            drift,
        }
    }
}

fn hamiltonians(traj: &Trajectory, pot: &Potential, params: &Params) -> Result<Vec<f64>> {
    par::map(&traj.samples, |s| hamiltonian_bck(pot, params, &s.state))
        .into_iter()
        .collect()
}

/// `𝓘 = H + 2γA` with `A` the action accumulated by the integrator.
pub fn weak_constant_dt(
    traj: &Trajectory,
    pot: &Potential,
    params: &Params,
) -> Result<WeakConstantSeries> {
    let h = hamiltonians(traj, pot, params)?;
    let g2 = 2.0 * params.gamma;
    let values: Vec<f64> = h
        .iter()
        .zip(&traj.samples)
        .map(|(h, s)| h + g2 * s.action)
        .collect();
    let scale = par::max_abs(h.iter().copied());
    let times = traj.samples.iter().map(|s| s.state.t).collect();
    Ok(WeakConstantSeries::new(times, values, scale))
}

/// `𝓘(t) = ∫₀ᵗ (X^[1]L + D(τ)L) dt′ − Lτ − L_q̇(ξ − q̇τ)`, the integral taken
/// by the trapezoid rule over the samples.
pub fn nonlocal_constant(
    gen: &Generator,
    traj: &Trajectory,
    pot: &Potential,
    params: &Params,
) -> Result<WeakConstantSeries> {
    let lag = Bck::new(*pot, *params);
    let rows: Vec<(f64, f64)> = par::map(&traj.samples, |smp| -> Result<(f64, f64)> {
        let s = smp.state;
        // point generators never see q̈ at first order
        let integrand = prolong1_l(gen, &lag, &OffShellPoint::new(s.t, s.q, s.qdot, 0.0))?;
        let j = gen.eval(s.t, s.q);
        let l = lag.parts(s.t, s.q, s.qdot)?;
        let boundary = -l.value * j.tau.v - l.dv * (j.xi.v - s.qdot * j.tau.v);
        Ok((integrand, boundary))
    })
    .into_iter()
    .collect::<Result<_>>()?;
    let mut values = Vec::with_capacity(rows.len());
    let mut integral = 0.0;
    let mut scale = 0.0f64;
    for (k, &(g, b)) in rows.iter().enumerate() {
        if k > 0 {
            let dt = traj.samples[k].state.t - traj.samples[k - 1].state.t;
            integral += 0.5 * dt * (g + rows[k - 1].0);
        }
        scale = scale.max(integral.abs()).max(b.abs());
        values.push(integral + b);
    }
    let times = traj.samples.iter().map(|s| s.state.t).collect();
    Ok(WeakConstantSeries::new(times, values, scale))
}

/// `A(t) = (𝓘(t₀) − H(t)) / 2γ` with `𝓘(t₀) = H(t₀)`.
pub fn reconstruct_action(traj: &Trajectory, pot: &Potential, params: &Params) -> Result<Vec<f64>> {
    let h = hamiltonians(traj, pot, params)?;
    let g2 = 2.0 * params.gamma;
    let h0 = h[0];
    Ok(h.iter().map(|h| (h0 - h) / g2).collect())
}

/// Largest absolute gap between the reconstructed and accumulated action.
pub fn action_mismatch(traj: &Trajectory, pot: &Potential, params: &Params) -> Result<f64> {
    let rec = reconstruct_action(traj, pot, params)?;
    Ok(par::max_abs(
        rec.iter().zip(&traj.samples).map(|(a, s)| a - s.action),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{integrate, IntegratorConfig};
    use crate::model::State1D;
    use crate::symmetry::catalog;
    use approx::assert_relative_eq;

    fn run(pot: Potential, g: f64, ic: State1D, t_end: f64) -> (Trajectory, Params) {
        let p = Params::new(g).unwrap();
        (
            integrate(&pot, &p, ic, t_end, &IntegratorConfig::default()).unwrap(),
            p,
        )
    }

    #[test]
    fn free_particle_constant_and_action() {
        let (tr, p) = run(Potential::Free, 0.5, State1D::new(0.0, 1.0, 1.0), 5.0);
        let w = weak_constant_dt(&tr, &Potential::Free, &p).unwrap();
        for v in &w.values {
            assert_relative_eq!(*v, 0.5, max_relative = 1e-9);
        }
        let a = reconstruct_action(&tr, &Potential::Free, &p).unwrap();
        assert_eq!(a[0], 0.0);
        for (s, a) in tr.samples.iter().zip(&a) {
            let exact = 0.5 * (1.0 - (-s.state.t).exp());
            assert!((a - exact).abs() < 1e-10);
        }
        assert!(action_mismatch(&tr, &Potential::Free, &p).unwrap() <= 1e-7);
    }

    #[test]
    fn equilibrium_constant_is_zero() {
        // V = A e^q + 8γ²q with V′(0) = 0 for A = −8γ², and V(0) = A
        let pot = Potential::Exp { a: -2.0 };
        let (tr, p) = run(pot, 0.5, State1D::new(0.0, 0.0, 0.0), 2.0);
        let w = weak_constant_dt(&tr, &pot, &p).unwrap();
        // H + 2γA = V e^{2γt} − V(e^{2γt} − 1) = V(0)
        assert!(w.values.iter().all(|v| (v + 2.0).abs() < 1e-9));
        let (tr, p) = run(Potential::Free, 0.5, State1D::new(0.0, 3.0, 0.0), 2.0);
        let w = weak_constant_dt(&tr, &Potential::Free, &p).unwrap();
        assert!(w.values.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn linear_potential_conserves_the_weak_constant() {
        let pot = Potential::Linear { f: 1.3 };
        let (tr, p) = run(pot, 0.3, State1D::new(0.0, 0.4, -0.8), 8.0);
        assert!(weak_constant_dt(&tr, &pot, &p).unwrap().drift <= 1e-7);
        assert!(action_mismatch(&tr, &pot, &p).unwrap() <= 1e-7);
    }

    #[test]
    fn time_translation_reproduces_h_plus_2_gamma_a() {
        let pot = Potential::Log { a: -0.7 };
        let (tr, p) = run(pot, 0.4, State1D::new(0.0, 1.0, 0.2), 4.0);
        let a = weak_constant_dt(&tr, &pot, &p).unwrap();
        let b = nonlocal_constant(&catalog::time_translation("Dt"), &tr, &pot, &p).unwrap();
        for (x, y) in a.values.iter().zip(&b.values) {
            assert!((x - y).abs() <= 1e-6 * a.scale.max(1.0));
        }
    }

    #[test]
    fn any_generator_gives_a_constant() {
        let pot = Potential::Linear { f: 0.8 };
        let p = Params::new(0.3).unwrap();
        let (tr, _) = run(pot, 0.3, State1D::new(0.0, 0.5, 0.4), 6.0);
        let gens = [
            catalog::control(),
            catalog::x3(&p, 0.8),
            catalog::x5(&p, 0.8),
            catalog::x7(&p, 0.8),
        ];
        for g in gens {
            let w = nonlocal_constant(&g, &tr, &pot, &p).unwrap();
            assert!(w.drift <= 1e-6, "{}: {:e}", g.name(), w.drift);
        }
    }
}
