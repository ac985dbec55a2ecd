//! Collisionless evolution of an initial jump between two Maxwellians.
//!
//! For `t > 0` the distribution at `(x, t)` is the left Maxwellian for
//! molecules with `c > x / t` and the right one for `c < x / t`, so every
//! macroscopic field depends on `xi = x / t` only. The closed forms below
//! are checked against [`moment_oracle`], which integrates the same
//! distribution numerically.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Profile, Source, Units};
use crate::error::{Error, Result};
use crate::gas::{GasModel, GasState, Maxwellian};
use crate::quad::integrate;

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Width of the truncated velocity support, in units of `1 / beta`.
const SUPPORT: f64 = 8.0;

/// Relative tolerance for the jump-condition checks on user-supplied pairs.
const JUMP_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum JumpKind {
    Contact,
    Shock,
    Generic,
}

/// Initial jump located at `x = 0`; `left` occupies `x < 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiscontinuityIC {
    pub left: GasState,
    pub right: GasState,
    pub kind: JumpKind,
}

impl DiscontinuityIC {
    /// Stationary contact with `T_right / T_left = temperature_ratio` at equal pressure.
    pub fn contact(rho_left: f64, t_left: f64, temperature_ratio: f64) -> Result<Self> {
        if !(temperature_ratio > 0.0 && temperature_ratio.is_finite()) {
            return Err(Error::Domain(format!(
                "contact temperature ratio must be positive, got {temperature_ratio}"
            )));
        }
        Ok(DiscontinuityIC {
            left: GasState::new(rho_left, 0.0, t_left)?,
            right: GasState::new(rho_left / temperature_ratio, 0.0, t_left * temperature_ratio)?,
            kind: JumpKind::Contact,
        })
    }

    /// Stationary normal shock in its own frame, upstream on the left.
    pub fn shock(rho_left: f64, t_left: f64, mach: f64, gm: &GasModel) -> Result<Self> {
        let upstream = GasState::new(rho_left, 0.0, t_left)?;
        let pair = crate::riemann::rankine_hugoniot(mach, &upstream, gm)?;
        Ok(DiscontinuityIC {
            left: pair.upstream,
            right: pair.downstream,
            kind: JumpKind::Shock,
        })
    }

    pub fn generic(left: GasState, right: GasState) -> Result<Self> {
        left.validate()?;
        right.validate()?;
        Ok(DiscontinuityIC {
            left,
            right,
            kind: JumpKind::Generic,
        })
    }

    /// `T_right / T_left`.
    pub fn temperature_ratio(&self) -> f64 {
        self.right.temperature / self.left.temperature
    }

    pub fn validate(&self, gm: &GasModel) -> Result<()> {
        self.left.validate()?;
        self.right.validate()?;
        match self.kind {
            JumpKind::Generic => Ok(()),
            JumpKind::Contact => {
                if self.left.u != 0.0 || self.right.u != 0.0 {
                    return Err(Error::Precondition("contact jump must be at rest on both sides".into()));
                }
                let (pl, pr) = (self.left.pressure(gm), self.right.pressure(gm));
                if (pl - pr).abs() > JUMP_TOL * pl.max(pr) {
                    return Err(Error::Precondition(format!(
                        "contact pressures differ: {pl:e} vs {pr:e}"
                    )));
                }
                Ok(())
            }
            JumpKind::Shock => {
                let fl = self.left.euler_flux(gm).to_array();
                let fr = self.right.euler_flux(gm).to_array();
                let scale = [fl[0].abs(), fl[1].abs(), fl[2].abs()];
                for k in 0..3 {
                    if (fl[k] - fr[k]).abs() > JUMP_TOL * scale[k].max(f64::MIN_POSITIVE) {
                        return Err(Error::Precondition(format!(
                            "shock pair violates the jump conditions (flux component {k}: {:e} vs {:e})",
                            fl[k], fr[k]
                        )));
                    }
                }
                if !(self.left.u > 0.0 && self.right.rho > self.left.rho) {
                    return Err(Error::Precondition(
                        "shock pair must be compressive with upstream flow from the left".into(),
                    ));
                }
                Ok(())
            }
        }
    }
}

/// Macroscopic state with separate x and transverse temperatures.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PointState {
    pub rho: f64,
    pub u: f64,
    /// Temperature of the two transverse components.
    pub tn: f64,
    /// Temperature of the x component.
    pub tx: f64,
}

impl PointState {
    pub fn total_temperature(&self) -> f64 {
        (self.tx + 2.0 * self.tn) / 3.0
    }
}

fn check_time(t: f64) -> Result<()> {
    if t > 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("time must be positive, got {t}")))
    }
}

/// Value of the collisionless distribution at x-velocity `c`.
pub fn distribution_eval(ic: &DiscontinuityIC, gm: &GasModel, c: f64, x: f64, t: f64) -> Result<f64> {
    check_time(t)?;
    let left = Maxwellian::from_state(&ic.left, gm);
    let right = Maxwellian::from_state(&ic.right, gm);
    let arg = x - c * t;
    Ok(if arg < 0.0 {
        left.eval(c)
    } else if arg > 0.0 {
        right.eval(c)
    } else {
        0.5 * (left.eval(c) + right.eval(c))
    })
}

/// Closed-form contact profile.
///
/// Density, velocity and transverse temperature follow from the half-range
/// moments of two resting Maxwellians with `n_2 = n_1 T_1 / T_2`. The x
/// temperature is the central second moment `Tn + U (xi - U) / R`.
pub fn contact_profile(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<PointState> {
    check_time(t)?;
    if ic.kind != JumpKind::Contact {
        return Err(Error::Precondition("contact_profile needs a contact jump".into()));
    }
    let rho1 = ic.left.rho;
    let t1 = ic.left.temperature;
    let r = t1 / ic.right.temperature;
    let sr = r.sqrt();
    let beta1 = 1.0 / (2.0 * gm.r * t1).sqrt();
    let xi = x / t;
    let z = beta1 * xi;

    let rho_rel = 0.5 * libm::erfc(z) + 0.5 * r * libm::erfc(-sr * z);
    let u = (1.0 / rho_rel) / (2.0 * SQRT_PI * beta1) * ((-z * z).exp() - sr * (-r * z * z).exp());
    let tn = 0.5 * t1 / rho_rel * (libm::erfc(z) + libm::erfc(-sr * z));
    let tx = tn + u * (xi - u) / gm.r;
    Ok(PointState {
        rho: rho1 * rho_rel,
        u,
        tn,
        tx,
    })
}

/// The additive x-temperature form `Tn + U xi / R`, without the `-U^2 / R`
/// term of the central moment. Kept to quantify how far it sits from the
/// quadrature of the distribution.
pub fn contact_tx_additive(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<f64> {
    let p = contact_profile(ic, gm, x, t)?;
    Ok(p.tn + p.u * (x / t) / gm.r)
}

/// Closed-form profile for two drifting Maxwellians (shock or generic jump).
pub fn two_stream_profile(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<PointState> {
    check_time(t)?;
    let (s1, s2) = (&ic.left, &ic.right);
    let (t1, t2) = (s1.temperature, s2.temperature);
    let (u1, u2) = (s1.u, s2.u);
    let beta1 = 1.0 / (2.0 * gm.r * t1).sqrt();
    let beta2 = 1.0 / (2.0 * gm.r * t2).sqrt();
    let xi = x / t;
    let z1 = beta1 * (xi - u1);
    let z2 = beta2 * (xi - u2);
    // Fractions of each stream present at xi.
    let w1 = 0.5 * libm::erfc(z1);
    let w2 = 0.5 * libm::erfc(-z2);
    let g1 = (-z1 * z1).exp();
    let g2 = (-z2 * z2).exp();

    let rho = s1.rho * w1 + s2.rho * w2;
    let a1 = s1.rho / rho;
    let a2 = s2.rho / rho;
    let u = a1 / (2.0 * SQRT_PI * beta1) * g1 - a2 / (2.0 * SQRT_PI * beta2) * g2 + a1 * u1 * w1 + a2 * u2 * w2;
    let tn = t1 * a1 * w1 + t2 * a2 * w2;
    let tx = t1 / SQRT_PI * a1 * (z1 + 2.0 * beta1 * u1) * g1 - t2 / SQRT_PI * a2 * (z2 + 2.0 * beta2 * u2) * g2
        + t1 * a1 * (1.0 + 2.0 * beta1 * beta1 * u1 * u1) * w1
        + t2 * a2 * (1.0 + 2.0 * beta2 * beta2 * u2 * u2) * w2
        - u * u / gm.r;
    Ok(PointState { rho, u, tn, tx })
}

/// Closed-form shock profile; requires a pair satisfying the jump conditions.
pub fn shock_profile(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<PointState> {
    check_time(t)?;
    if ic.kind != JumpKind::Shock {
        return Err(Error::Precondition("shock_profile needs a shock jump".into()));
    }
    ic.validate(gm)?;
    two_stream_profile(ic, gm, x, t)
}

/// Closed-form profile for any jump kind.
pub fn profile(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<PointState> {
    match ic.kind {
        JumpKind::Contact => contact_profile(ic, gm, x, t),
        JumpKind::Shock | JumpKind::Generic => two_stream_profile(ic, gm, x, t),
    }
}

/// Profile at the points `x` and time `t`, given in units of `x_scale`
/// metres and `t_scale` seconds.
pub fn profile_on_grid(
    ic: &DiscontinuityIC,
    gm: &GasModel,
    x: &[f64],
    t: f64,
    (x_scale, t_scale): (f64, f64),
    units: Units,
) -> Result<Profile> {
    let pts = x
        .iter()
        .map(|&xi| profile(ic, gm, xi * x_scale, t * t_scale))
        .collect::<Result<Vec<_>>>()?;
    Profile::new(
        x.to_vec(),
        pts.iter().map(|p| p.rho).collect(),
        pts.iter().map(|p| p.u).collect(),
        pts.iter().map(|p| p.tn).collect(),
        pts.iter().map(|p| p.tx).collect(),
        t,
        units,
        Source::Freemol,
    )
}

/// Average over `[a, b]` in the sense a particle sample of that interval
/// would estimate it: density is the mean density, the other fields are
/// ratios of interval-integrated moments.
pub fn interval_average(ic: &DiscontinuityIC, gm: &GasModel, a: f64, b: f64, t: f64) -> Result<PointState> {
    check_time(t)?;
    if !(b > a) {
        return Err(Error::Domain(format!("empty interval [{a}, {b}]")));
    }
    let scale_rho = ic.left.rho.max(ic.right.rho) * (b - a);
    let speed =
        ic.left.u.abs().max(ic.right.u.abs()) + (2.0 * gm.r * ic.left.temperature.max(ic.right.temperature)).sqrt();
    let moment = |k: usize, tol: f64| {
        integrate(
            |x| {
                let p = profile(ic, gm, x, t).expect("t checked above");
                match k {
                    0 => p.rho,
                    1 => p.rho * p.u,
                    2 => p.rho * (gm.r * p.tx + p.u * p.u),
                    _ => p.rho * p.tn,
                }
            },
            a,
            b,
            tol,
        )
    };
    let m0 = moment(0, 1e-13 * scale_rho)?;
    let m1 = moment(1, 1e-13 * scale_rho * speed)?;
    let m2 = moment(2, 1e-13 * scale_rho * speed * speed)?;
    let m3 = moment(3, 1e-13 * scale_rho * speed * speed / gm.r)?;
    let u = m1 / m0;
    Ok(PointState {
        rho: m0 / (b - a),
        u,
        tn: m3 / m0,
        tx: (m2 / m0 - u * u) / gm.r,
    })
}

/// Moments of the collisionless distribution by adaptive quadrature.
///
/// Uses no closed forms: the x-velocity integrals run over each stream's
/// admitted half-line, and the transverse temperature comes from
/// integrating the transverse second moment of each stream.
pub fn moment_oracle(ic: &DiscontinuityIC, gm: &GasModel, x: f64, t: f64) -> Result<PointState> {
    check_time(t)?;
    let xi = x / t;
    let left = Maxwellian::from_state(&ic.left, gm);
    let right = Maxwellian::from_state(&ic.right, gm);

    // (lower, upper) of the velocity range each stream contributes at xi.
    let lrange = (xi.max(left.u - SUPPORT / left.beta), left.u + SUPPORT / left.beta);
    let rrange = (right.u - SUPPORT / right.beta, xi.min(right.u + SUPPORT / right.beta));

    let part = |mx: &Maxwellian, (lo, hi): (f64, f64), k: i32, shift: f64| -> Result<f64> {
        if lo >= hi {
            return Ok(0.0);
        }
        let scale = mx.n * (mx.u.abs() + shift.abs() + 1.0 / mx.beta).powi(k);
        integrate(|c| (c - shift).powi(k) * mx.eval(c), lo, hi, 1e-13 * scale)
    };

    let n_left = part(&left, lrange, 0, 0.0)?;
    let n_right = part(&right, rrange, 0, 0.0)?;
    let n = n_left + n_right;
    let flux = part(&left, lrange, 1, 0.0)? + part(&right, rrange, 1, 0.0)?;
    let u = flux / n;
    let central = part(&left, lrange, 2, u)? + part(&right, rrange, 2, u)?;

    let transverse = |mx: &Maxwellian| -> Result<f64> {
        let b = mx.beta;
        let w = SUPPORT / b;
        integrate(
            |v| v * v * b / PI.sqrt() * (-(b * v) * (b * v)).exp(),
            -w,
            w,
            1e-14 * 0.5 / (b * b),
        )
    };
    let vl = transverse(&left)?;
    let vr = transverse(&right)?;

    Ok(PointState {
        rho: n * gm.mass,
        u,
        tn: (n_left * vl + n_right * vr) / (n * gm.r),
        tx: central / (n * gm.r),
    })
}
