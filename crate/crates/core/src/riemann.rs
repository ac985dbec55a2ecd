//! Normal-shock jump relations and the exact Riemann solver for the Euler
//! equations of a calorically perfect gas.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gas::{ConservedState, FluxVector, GasModel, GasState};

const MAX_NEWTON: usize = 200;
const PRESSURE_TOL: f64 = 1e-15;

/// Upstream and downstream states of a stationary normal shock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockPair {
    pub mach: f64,
    pub upstream: GasState,
    pub downstream: GasState,
}

/// Jump conditions for a shock of upstream Mach number `mach` at rest.
///
/// The upstream density and temperature are taken from `upstream`; its
/// velocity is replaced by `mach` times the upstream sound speed. For a
/// monatomic gas this is `u1 = sqrt(5/6) Ma / beta1` and the ratios reduce
/// to `rho2/rho1 = 4 Ma^2 / (Ma^2 + 3)` and
/// `T2/T1 = (5 Ma^2 - 1)(Ma^2 + 3) / (16 Ma^2)`.
pub fn rankine_hugoniot(mach: f64, upstream: &GasState, gm: &GasModel) -> Result<ShockPair> {
    upstream.validate()?;
    if !(mach >= 1.0) || !mach.is_finite() {
        return Err(Error::Domain(format!(
            "shock Mach number must be at least 1, got {mach}"
        )));
    }
    let g = gm.gamma;
    let m2 = mach * mach;
    let u1 = mach * gm.sound_speed(upstream.temperature);
    let density_ratio = (g + 1.0) * m2 / ((g - 1.0) * m2 + 2.0);
    let temperature_ratio = (2.0 * g * m2 - (g - 1.0)) * ((g - 1.0) * m2 + 2.0) / ((g + 1.0) * (g + 1.0) * m2);
    let up = GasState { u: u1, ..*upstream };
    let down = GasState {
        rho: upstream.rho * density_ratio,
        u: u1 / density_ratio,
        temperature: upstream.temperature * temperature_ratio,
    };
    Ok(ShockPair {
        mach,
        upstream: up,
        downstream: down,
    })
}

/// Largest density ratio a single shock can produce, `(gamma + 1) / (gamma - 1)`.
pub fn limiting_density_ratio(gamma: f64) -> f64 {
    (gamma + 1.0) / (gamma - 1.0)
}

/// Upstream Mach number of a monatomic shock with `T2 / T1 = temperature_ratio`.
pub fn mach_from_temperature_ratio(temperature_ratio: f64) -> Result<f64> {
    mach_from_temperature_ratio_gamma(temperature_ratio, 5.0 / 3.0)
}

/// Inverts the temperature jump relation for general `gamma`.
///
/// With `y = Ma^2` the relation is the quadratic
/// `2 g (g-1) y^2 + (4 g - (g-1)^2 - r (g+1)^2) y - 2 (g-1) = 0`,
/// whose roots have opposite signs; the positive one is returned.
pub fn mach_from_temperature_ratio_gamma(temperature_ratio: f64, gamma: f64) -> Result<f64> {
    if !(temperature_ratio > 1.0) || !temperature_ratio.is_finite() {
        return Err(Error::Domain(format!(
            "shock temperature ratio must exceed 1, got {temperature_ratio}"
        )));
    }
    let g = gamma;
    let a = 2.0 * g * (g - 1.0);
    let b = 4.0 * g - (g - 1.0) * (g - 1.0) - temperature_ratio * (g + 1.0) * (g + 1.0);
    let c = -2.0 * (g - 1.0);
    let disc = (b * b - 4.0 * a * c).sqrt();
    // b < 0 for every ratio above 1, so this form avoids cancellation.
    let y = if b <= 0.0 {
        (-b + disc) / (2.0 * a)
    } else {
        2.0 * c / (-b - disc)
    };
    Ok(y.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Prim {
    rho: f64,
    u: f64,
    p: f64,
    a: f64,
}

impl Prim {
    fn from_state(s: &GasState, gm: &GasModel) -> Self {
        let p = s.pressure(gm);
        Prim {
            rho: s.rho,
            u: s.u,
            p,
            a: (gm.gamma * p / s.rho).sqrt(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WaveKind {
    None,
    Shock,
    Rarefaction,
}

/// One of the two nonlinear waves bounding the star region.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Wave {
    Shock {
        speed: f64,
        rho_star: f64,
    },
    /// Zero-width fans (`head == tail`) stand for the absence of a wave.
    Rarefaction {
        head: f64,
        tail: f64,
        rho_star: f64,
    },
}

impl Wave {
    pub fn rho_star(&self) -> f64 {
        match *self {
            Wave::Shock { rho_star, .. } | Wave::Rarefaction { rho_star, .. } => rho_star,
        }
    }
}

/// Self-similar solution of a Riemann problem.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannFan {
    pub p_star: f64,
    pub u_star: f64,
    pub left_wave: Wave,
    pub right_wave: Wave,
    left: Prim,
    right: Prim,
    gamma: f64,
    r: f64,
}

/// Pressure function of one side and its derivative.
fn side_function(p: f64, s: &Prim, g: f64) -> (f64, f64) {
    if p > s.p {
        let a = 2.0 / ((g + 1.0) * s.rho);
        let b = (g - 1.0) / (g + 1.0) * s.p;
        let q = (a / (p + b)).sqrt();
        ((p - s.p) * q, q * (1.0 - 0.5 * (p - s.p) / (b + p)))
    } else {
        let ratio = p / s.p;
        let f = 2.0 * s.a / (g - 1.0) * (ratio.powf((g - 1.0) / (2.0 * g)) - 1.0);
        let df = 1.0 / (s.rho * s.a) * ratio.powf(-(g + 1.0) / (2.0 * g));
        (f, df)
    }
}

/// Solves the Riemann problem between `left` and `right` exactly.
pub fn exact_riemann(left: &GasState, right: &GasState, gm: &GasModel) -> Result<RiemannFan> {
    left.validate()?;
    right.validate()?;
    let g = gm.gamma;
    let l = Prim::from_state(left, gm);
    let r = Prim::from_state(right, gm);
    let du = r.u - l.u;
    let limit = 2.0 * (l.a + r.a) / (g - 1.0);
    if du >= limit {
        return Err(Error::Vacuum { du, limit });
    }

    let total = |p: f64| {
        let (fl, dl) = side_function(p, &l, g);
        let (fr, dr) = side_function(p, &r, g);
        (fl + fr + du, dl + dr)
    };

    // Two-rarefaction estimate; exact when both waves are rarefactions.
    let z = (g - 1.0) / (2.0 * g);
    let guess = ((l.a + r.a - 0.5 * (g - 1.0) * du) / (l.a / l.p.powf(z) + r.a / r.p.powf(z))).powf(1.0 / z);

    // f is increasing with f(0) < 0 (no vacuum), so [lo, hi] brackets the root.
    let mut lo = 0.0;
    let mut hi = guess.max(l.p).max(r.p);
    while total(hi).0 < 0.0 {
        lo = hi;
        hi *= 2.0;
        if !hi.is_finite() {
            return Err(Error::Convergence {
                what: "star pressure bracketing",
                achieved: hi,
            });
        }
    }
    let mut p = if guess > lo && guess < hi {
        guess
    } else {
        0.5 * (lo + hi)
    };
    let mut converged = false;
    for _ in 0..MAX_NEWTON {
        let (f, df) = total(p);
        if f == 0.0 {
            converged = true;
            break;
        }
        if f < 0.0 {
            lo = lo.max(p);
        } else {
            hi = hi.min(p);
        }
        let mut next = p - f / df;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let change = (next - p).abs() / (0.5 * (next + p));
        p = next;
        if change < PRESSURE_TOL || hi - lo <= PRESSURE_TOL * p {
            converged = true;
            break;
        }
    }
    if !converged {
        return Err(Error::Convergence {
            what: "star pressure iteration",
            achieved: (hi - lo) / p,
        });
    }

    let (fl, _) = side_function(p, &l, g);
    let (fr, _) = side_function(p, &r, g);
    let u_star = 0.5 * (l.u + r.u) + 0.5 * (fr - fl);

    let gm1 = (g - 1.0) / (g + 1.0);
    let wave = |s: &Prim, sign: f64| -> Wave {
        if p > s.p {
            let ratio = p / s.p;
            let rho_star = s.rho * (ratio + gm1) / (gm1 * ratio + 1.0);
            let speed = s.u + sign * s.a * ((g + 1.0) / (2.0 * g) * ratio + (g - 1.0) / (2.0 * g)).sqrt();
            Wave::Shock { speed, rho_star }
        } else {
            let rho_star = s.rho * (p / s.p).powf(1.0 / g);
            let a_star = s.a * (p / s.p).powf(z);
            Wave::Rarefaction {
                head: s.u + sign * s.a,
                tail: u_star + sign * a_star,
                rho_star,
            }
        }
    };

    Ok(RiemannFan {
        p_star: p,
        u_star,
        left_wave: wave(&l, -1.0),
        right_wave: wave(&r, 1.0),
        left: l,
        right: r,
        gamma: g,
        r: gm.r,
    })
}

impl RiemannFan {
    fn kind(wave: &Wave, s: &Prim, p_star: f64) -> WaveKind {
        if (p_star - s.p).abs() <= 1e-12 * s.p {
            WaveKind::None
        } else {
            match wave {
                Wave::Shock { .. } => WaveKind::Shock,
                Wave::Rarefaction { .. } => WaveKind::Rarefaction,
            }
        }
    }

    pub fn left_kind(&self) -> WaveKind {
        Self::kind(&self.left_wave, &self.left, self.p_star)
    }

    pub fn right_kind(&self) -> WaveKind {
        Self::kind(&self.right_wave, &self.right, self.p_star)
    }

    fn to_state(&self, rho: f64, u: f64, p: f64) -> GasState {
        GasState {
            rho,
            u,
            temperature: p / (rho * self.r),
        }
    }

    /// State at `xi = x / t`.
    pub fn sample(&self, xi: f64) -> GasState {
        let g = self.gamma;
        let (s, wave, sign) = if xi <= self.u_star {
            (&self.left, &self.left_wave, -1.0)
        } else {
            (&self.right, &self.right_wave, 1.0)
        };
        // `sign * (xi - speed) > 0` means xi lies outside the wave, in the unperturbed state.
        match *wave {
            Wave::Shock { speed, rho_star } => {
                if sign * (xi - speed) > 0.0 {
                    self.to_state(s.rho, s.u, s.p)
                } else {
                    self.to_state(rho_star, self.u_star, self.p_star)
                }
            }
            Wave::Rarefaction { head, tail, rho_star } => {
                if sign * (xi - head) > 0.0 {
                    self.to_state(s.rho, s.u, s.p)
                } else if sign * (xi - tail) < 0.0 {
                    self.to_state(rho_star, self.u_star, self.p_star)
                } else {
                    // Inside the fan.
                    let c = 2.0 / (g + 1.0) - sign * (g - 1.0) / ((g + 1.0) * s.a) * (s.u - xi);
                    let rho = s.rho * c.powf(2.0 / (g - 1.0));
                    let u = 2.0 / (g + 1.0) * (-sign * s.a + 0.5 * (g - 1.0) * s.u + xi);
                    let p = s.p * c.powf(2.0 * g / (g - 1.0));
                    self.to_state(rho, u, p)
                }
            }
        }
    }
}

/// Godunov interface flux: the Euler flux of the exact solution at `x / t = 0`.
pub fn godunov_flux(left: &GasState, right: &GasState, gm: &GasModel) -> Result<FluxVector> {
    let fan = exact_riemann(left, right, gm)?;
    Ok(fan.sample(0.0).euler_flux(gm))
}

/// Density jump across one shock of a Riemann solution.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShockJump {
    pub speed: f64,
    pub pre_shock_rho: f64,
    pub post_shock_rho: f64,
}

impl ShockJump {
    pub fn ratio(&self) -> f64 {
        self.post_shock_rho / self.pre_shock_rho
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubProblem {
    pub p_star: f64,
    pub u_star: f64,
    pub left_kind: WaveKind,
    pub right_kind: WaveKind,
    pub shocks: Vec<ShockJump>,
}

impl SubProblem {
    fn from_fan(fan: &RiemannFan) -> Self {
        let mut shocks = Vec::new();
        let sides = [
            (fan.left_kind(), &fan.left_wave, fan.left.rho),
            (fan.right_kind(), &fan.right_wave, fan.right.rho),
        ];
        for (kind, wave, rho) in sides {
            if let (WaveKind::Shock, Wave::Shock { speed, rho_star }) = (kind, wave) {
                shocks.push(ShockJump {
                    speed: *speed,
                    pre_shock_rho: rho,
                    post_shock_rho: *rho_star,
                });
            }
        }
        SubProblem {
            p_star: fan.p_star,
            u_star: fan.u_star,
            left_kind: fan.left_kind(),
            right_kind: fan.right_kind(),
            shocks,
        }
    }

    pub fn has_shock(&self) -> bool {
        !self.shocks.is_empty()
    }

    /// Product of the density ratios across every shock of this problem.
    pub fn density_ratio(&self) -> f64 {
        self.shocks.iter().map(ShockJump::ratio).product()
    }
}

/// Result of splitting a shock pair with an intermediate cell state.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub first: SubProblem,
    pub second: SubProblem,
    /// Product of the shock density ratios of both sub-problems.
    pub combined_density_ratio: f64,
    /// Density ratio of the single shock between the outer states.
    pub single_density_ratio: f64,
}

/// Solves `(upstream, mid)` and `(mid, downstream)` and reports the shocks.
pub fn two_shock_split(
    upstream: &GasState,
    mid: &ConservedState,
    downstream: &GasState,
    gm: &GasModel,
) -> Result<SplitReport> {
    let mid = GasState::from_conserved(mid, gm)?;
    let first = SubProblem::from_fan(&exact_riemann(upstream, &mid, gm)?);
    let second = SubProblem::from_fan(&exact_riemann(&mid, downstream, gm)?);
    let combined = first.density_ratio() * second.density_ratio();
    Ok(SplitReport {
        first,
        second,
        combined_density_ratio: combined,
        single_density_ratio: downstream.rho / upstream.rho,
    })
}

/// Arithmetic mean of the conserved variables of two states.
pub fn conserved_average(a: &GasState, b: &GasState, gm: &GasModel) -> ConservedState {
    (a.conserved(gm) + b.conserved(gm)) * 0.5
}
