//! Kinetic evolution of one-dimensional flow discontinuities.
//!
//! Three regimes are covered: collisionless free transport in closed form
//! ([`freemol`]), transitional flow by direct simulation Monte Carlo
//! ([`dsmc`]), and continuum finite-volume schemes ([`fvm`]) built on the
//! Godunov, kinetic flux-vector splitting and gas-kinetic interface fluxes
//! ([`riemann`], [`fluxes`]). [`diagnostics`] measures profile thickness,
//! overshoots and scaling laws.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod dsmc;
pub mod error;
pub mod fluxes;
pub mod freemol;
pub mod fvm;
pub mod gas;
pub mod quad;
pub mod riemann;

pub use error::{Error, Result};
pub use gas::{ConservedState, FluxVector, GasModel, GasState, HalfSpace, Maxwellian};
