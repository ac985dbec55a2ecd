//! Kinetic interface fluxes: collisionless KFVS, the equilibrium state formed
//! by colliding half-Maxwellians, and the relaxation-weighted GKS blend.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{ConservedState, FluxVector, GasModel, GasState, HalfSpace, Maxwellian};

/// Tuning of the gas-kinetic flux.
///
/// The physical part of the collision time uses the viscosity law of the
/// [`GasModel`] (`mu_ref (T / T_ref)^omega`); an inviscid model gives zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GksParams {
    /// Weight of the pressure-jump term of the collision time.
    pub c_jump: f64,
}

impl Default for GksParams {
    fn default() -> Self {
        GksParams { c_jump: 1.0 }
    }
}

impl GksParams {
    pub fn validate(&self) -> Result<()> {
        if self.c_jump >= 0.0 && self.c_jump.is_finite() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "c_jump must be a non-negative number, got {}",
                self.c_jump
            )))
        }
    }
}

/// Moments of the half-Maxwellians that cross the interface: `c > 0` from
/// the left state and `c < 0` from the right. Returns the number moments of
/// order 0..=3 and the thermal energy per unit mass carried by the
/// transverse degrees of freedom of each side.
fn crossing_moments(left: &GasState, right: &GasState, gm: &GasModel) -> [([f64; 4], f64); 2] {
    let half_e = 0.5 * gm.internal_dof() * gm.r;
    let l = Maxwellian::from_state(left, gm).half_moments_all(HalfSpace::Right);
    let r = Maxwellian::from_state(right, gm).half_moments_all(HalfSpace::Left);
    [(l, half_e * left.temperature), (r, half_e * right.temperature)]
}

/// Kinetic flux-vector splitting flux.
pub fn kfvs_flux(left: &GasState, right: &GasState, gm: &GasModel) -> FluxVector {
    let mut f = FluxVector::default();
    for (m, e_t) in crossing_moments(left, right, gm) {
        f.mass += gm.mass * m[1];
        f.momentum += gm.mass * m[2];
        f.energy += gm.mass * (0.5 * m[3] + e_t * m[1]);
    }
    f
}

/// Conserved variables of the composite distribution at the interface.
pub fn interface_conserved(left: &GasState, right: &GasState, gm: &GasModel) -> ConservedState {
    let mut w = ConservedState::default();
    for (m, e_t) in crossing_moments(left, right, gm) {
        w.rho += gm.mass * m[0];
        w.mom += gm.mass * m[1];
        w.energy += gm.mass * (0.5 * m[2] + e_t * m[0]);
    }
    w
}

/// Equilibrium state whose Maxwellian carries the conserved moments of the
/// colliding half-distributions.
pub fn interface_equilibrium(left: &GasState, right: &GasState, gm: &GasModel) -> Result<GasState> {
    left.validate()?;
    right.validate()?;
    GasState::from_conserved(&interface_conserved(left, right, gm), gm)
}

/// Collision time `mu(T0)/p0 + C_jump dt |pl - pr| / (pl + pr)`.
pub fn collision_time(w0: &GasState, p_left: f64, p_right: f64, dt: f64, params: &GksParams, gm: &GasModel) -> f64 {
    let physical = gm.viscosity(w0.temperature) / w0.pressure(gm);
    let jump = (p_left - p_right).abs() / (p_left + p_right);
    physical + params.c_jump * dt * jump
}

/// Step average of `exp(-t / tau)` over `[0, dt]`: `(tau/dt)(1 - exp(-dt/tau))`.
pub fn free_transport_weight(tau: f64, dt: f64) -> f64 {
    if tau <= 0.0 {
        return 0.0;
    }
    let x = dt / tau;
    if x == 0.0 {
        return 1.0;
    }
    -libm::expm1(-x) / x
}

/// Gas-kinetic flux `alpha F_kfvs + (1 - alpha) F_euler(W0)`.
pub fn gks_flux(left: &GasState, right: &GasState, dt: f64, params: &GksParams, gm: &GasModel) -> Result<FluxVector> {
    if !(dt > 0.0) {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    let w0 = interface_equilibrium(left, right, gm)?;
    let tau = collision_time(&w0, left.pressure(gm), right.pressure(gm), dt, params, gm);
    let alpha = free_transport_weight(tau, dt);
    let equilibrium = w0.euler_flux(gm);
    if alpha == 0.0 {
        return Ok(equilibrium);
    }
    Ok(kfvs_flux(left, right, gm) * alpha + equilibrium * (1.0 - alpha))
}
