//! Dormand-Prince 5(4) embedded Runge-Kutta integrator with proportional
//! step-size control and dense sampling at fixed output times.
//!
//! The solution update uses compensated (Kahan) summation so long runs of
//! small steps do not accumulate rounding in slowly varying components.

use crate::error::{Error, Result};

const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;

// fifth-order weights (also row 7 of the tableau, FSAL)
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;

// b - b* (difference to the embedded fourth-order weights)
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 5.0;

/// First-order system `y′ = F(t, y)` with `N` components.
pub trait OdeSystem<const N: usize> {
    fn rhs(&self, t: f64, y: &[f64; N]) -> Result<[f64; N]>;
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub rtol: f64,
    pub atol: f64,
    pub h_init: f64,
    pub h_min: f64,
    pub h_max: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, serde::Serialize)]
pub struct Stats {
    pub accepted: usize,
    pub rejected: usize,
    /// Largest normalized local error estimate among accepted steps.
    pub max_error_estimate: f64,
}

/// Why integration stopped early, with the last accepted point.
#[derive(Debug, Clone, PartialEq)]
pub struct Failure<const N: usize> {
    pub t: f64,
    pub y: [f64; N],
    pub h: f64,
    pub domain: bool,
}

#[inline]
fn axpy<const N: usize>(y: &[f64; N], terms: &[(f64, &[f64; N])]) -> [f64; N] {
    let mut out = *y;
    for i in 0..N {
        let mut acc = 0.0;
        for (c, k) in terms {
            acc += c * k[i];
        }
        out[i] += acc;
    }
    out
}

struct Stepper<'a, S, const N: usize> {
    sys: &'a S,
    ctrl: StepControl,
    t: f64,
    y: [f64; N],
    comp: [f64; N],
    k1: [f64; N],
    h: f64,
    stats: Stats,
}

enum Attempt {
    Accepted,
    Rejected,
    Domain,
}

impl<'a, S: OdeSystem<N>, const N: usize> Stepper<'a, S, N> {
    /// Try one step of size `h` (clipped by the caller). On acceptance the
    /// state advances and `self.h` holds the proposal for the next step.
    fn attempt(&mut self, h: f64) -> Result<Attempt> {
        let sys = self.sys;
        let (t, y, k1) = (self.t, self.y, self.k1);

        macro_rules! stage {
            ($tt:expr, $yy:expr) => {
                match sys.rhs($tt, &$yy) {
                    Ok(k) => k,
                    Err(Error::Domain { .. }) => return Ok(Attempt::Domain),
                    Err(e) => return Err(e),
                }
            };
        }

        let k2 = stage!(t + C2 * h, axpy(&y, &[(h * A21, &k1)]));
        let k3 = stage!(t + C3 * h, axpy(&y, &[(h * A31, &k1), (h * A32, &k2)]));
        let k4 = stage!(
            t + C4 * h,
            axpy(&y, &[(h * A41, &k1), (h * A42, &k2), (h * A43, &k3)])
        );
        let k5 = stage!(
            t + C5 * h,
            axpy(
                &y,
                &[
                    (h * A51, &k1),
                    (h * A52, &k2),
                    (h * A53, &k3),
                    (h * A54, &k4)
                ]
            )
        );
        let k6 = stage!(
            t + h,
            axpy(
                &y,
                &[
                    (h * A61, &k1),
                    (h * A62, &k2),
                    (h * A63, &k3),
                    (h * A64, &k4),
                    (h * A65, &k5)
                ]
            )
        );

        let mut delta = [0.0; N];
        for i in 0..N {
            delta[i] = h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        let mut y_new = [0.0; N];
        let mut comp_new = [0.0; N];
        for i in 0..N {
            let d = delta[i] - self.comp[i];
            let s = y[i] + d;
            comp_new[i] = (s - y[i]) - d;
            y_new[i] = s;
        }
        if !y_new.iter().all(|v| v.is_finite()) {
            return Ok(Attempt::Domain);
        }
        let k7 = stage!(t + h, y_new);

        let mut err = 0.0_f64;
        for i in 0..N {
            let e =
                h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = self.ctrl.atol + self.ctrl.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max(e.abs() / scale);
        }

        let factor = if err == 0.0 {
            MAX_FACTOR
        } else {
            (SAFETY * err.powf(-0.2)).clamp(MIN_FACTOR, MAX_FACTOR)
        };

        // err == 1 counts as a rejection
        if err < 1.0 {
            self.t += h;
            self.y = y_new;
            self.comp = comp_new;
            self.k1 = k7;
            self.stats.accepted += 1;
            self.stats.max_error_estimate = self.stats.max_error_estimate.max(err);
            self.h = (h * factor).min(self.ctrl.h_max);
            Ok(Attempt::Accepted)
        } else {
            self.stats.rejected += 1;
            self.h = h * factor;
            Ok(Attempt::Rejected)
        }
    }
}

/// Integrate from `(t0, y0)` to `t_end`, calling `on_sample` at `t0`, at every
/// `t0 + k·sample_dt` strictly before `t_end`, and at `t_end`.
///
/// Steps never cross a sample time, so samples are exact solver states.
pub fn integrate_sampled<S, const N: usize>(
    sys: &S,
    t0: f64,
    y0: [f64; N],
    t_end: f64,
    sample_dt: f64,
    ctrl: StepControl,
    mut on_sample: impl FnMut(f64, &[f64; N]),
) -> std::result::Result<Stats, (Failure<N>, Option<Error>)>
where
    S: OdeSystem<N>,
{
    let k1 = match sys.rhs(t0, &y0) {
        Ok(k) => k,
        Err(e) => {
            let domain = matches!(e, Error::Domain { .. });
            return Err((
                Failure {
                    t: t0,
                    y: y0,
                    h: ctrl.h_init,
                    domain,
                },
                if domain { None } else { Some(e) },
            ));
        }
    };
    let mut st = Stepper {
        sys,
        ctrl,
        t: t0,
        y: y0,
        comp: [0.0; N],
        k1,
        h: ctrl.h_init.min(ctrl.h_max),
        stats: Stats::default(),
    };
    on_sample(t0, &y0);

    let span = t_end - t0;
    let n_samples = if sample_dt > 0.0 {
        // last grid point strictly before t_end; t_end itself is always emitted
        let n = (span / sample_dt).ceil() as usize;
        n.max(1)
    } else {
        1
    };

    for k in 1..=n_samples {
        let target = if k == n_samples {
            t_end
        } else {
            t0 + k as f64 * sample_dt
        };
        if k < n_samples && target > t_end - 1e-9 * sample_dt {
            continue;
        }
        if target <= st.t {
            continue;
        }
        while st.t < target {
            let remaining = target - st.t;
            // land exactly on the target when the proposal nearly reaches it
            let h = if st.h >= remaining * (1.0 - 1e-12) {
                remaining
            } else {
                st.h
            };
            if h < ctrl.h_min && h < remaining {
                return Err((
                    Failure {
                        t: st.t,
                        y: st.y,
                        h,
                        domain: false,
                    },
                    None,
                ));
            }
            let proposal = st.h;
            match st.attempt(h) {
                Ok(Attempt::Accepted) => {
                    if h == remaining {
                        st.t = target;
                        // a step clipped to the sample grid says little about
                        // the attainable step size
                        st.h = st.h.max(proposal.min(ctrl.h_max));
                    }
                }
                Ok(Attempt::Rejected) => {
                    if st.h < ctrl.h_min {
                        return Err((
                            Failure {
                                t: st.t,
                                y: st.y,
                                h: st.h,
                                domain: false,
                            },
                            None,
                        ));
                    }
                }
                Ok(Attempt::Domain) => {
                    st.stats.rejected += 1;
                    st.h = h * 0.25;
                    if st.h < ctrl.h_min {
                        return Err((
                            Failure {
                                t: st.t,
                                y: st.y,
                                h: st.h,
                                domain: true,
                            },
                            None,
                        ));
                    }
                }
                Err(e) => {
                    return Err((
                        Failure {
                            t: st.t,
                            y: st.y,
                            h,
                            domain: false,
                        },
                        Some(e),
                    ))
                }
            }
        }
        on_sample(st.t, &st.y);
    }
    Ok(st.stats)
}
