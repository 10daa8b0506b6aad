//! Numerical laboratory for the symmetries, first integrals, canonical
//! transformations and conservation laws of the linearly damped particle
//! described by the Bateman-Caldirola-Kanai Lagrangian
//! `L = (½q̇² − V(q)) e^{2γt}`.

// `!(x <= tol)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod action;
pub mod canonical;
pub mod central3d;
pub mod dynamics;
pub mod error;
pub mod integrals;
pub mod jet;
pub mod lagrangian;
pub mod model;
pub mod ode;
pub mod par;
pub mod phase;
pub mod sampling;
pub mod suite;
pub mod symmetry;

pub use error::{Error, Result};
pub use model::{Params, Potential, State1D};
