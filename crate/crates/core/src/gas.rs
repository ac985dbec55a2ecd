//! Gas model, macroscopic states and Maxwellian velocity moments.
//!
//! The x-velocity is the only kinetic variable treated explicitly. The
//! remaining thermal degrees of freedom (the two transverse translational
//! components for a monatomic gas, plus any internal modes implied by
//! `gamma`) carry `K = (3 - gamma) / (gamma - 1)` quadratic terms, each
//! holding `R T / 2` of energy per unit mass.

use std::f64::consts::PI;
use std::ops::{Add, Mul, Sub};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const SQRT_PI: f64 = 1.772_453_850_905_516;

/// Material constants of a single-species gas with a VHS collision model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasModel {
    /// Specific gas constant, J/(kg K).
    pub r: f64,
    pub gamma: f64,
    /// Molecular mass, kg.
    pub mass: f64,
    /// VHS reference diameter, m.
    pub d_ref: f64,
    /// VHS reference temperature, K.
    pub t_ref: f64,
    /// VHS viscosity-temperature exponent.
    pub omega: f64,
    /// Viscosity at `t_ref`, Pa s. Zero gives an inviscid model.
    pub mu_ref: f64,
}

impl GasModel {
    /// Monatomic argon with Bird's VHS data.
    pub fn argon() -> Self {
        let mut gm = GasModel {
            r: 208.13,
            gamma: 5.0 / 3.0,
            mass: 6.63e-26,
            d_ref: 4.17e-10,
            t_ref: 273.0,
            omega: 0.81,
            mu_ref: 0.0,
        };
        gm.mu_ref = gm.vhs_reference_viscosity();
        gm
    }

    /// Inviscid calorically perfect gas in arbitrary units (e.g. the Sod problem).
    ///
    /// The molecular constants are placeholders that satisfy the model
    /// invariants; they only matter for DSMC, which never uses this preset.
    pub fn ideal(gamma: f64, r: f64) -> Self {
        GasModel {
            r,
            gamma,
            mass: 1.0,
            d_ref: 1.0,
            t_ref: 1.0,
            omega: 0.5,
            mu_ref: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check = |ok: bool, msg: &str| {
            if ok {
                Ok(())
            } else {
                Err(Error::Precondition(format!("gas model: {msg}")))
            }
        };
        check(self.r > 0.0, "R must be positive")?;
        check(
            self.gamma > 1.0 && self.gamma <= 5.0 / 3.0 + 1e-12,
            "gamma must lie in (1, 5/3]",
        )?;
        check(self.mass > 0.0, "molecular mass must be positive")?;
        check(self.d_ref > 0.0, "reference diameter must be positive")?;
        check(self.t_ref > 0.0, "reference temperature must be positive")?;
        check((0.5..=1.0).contains(&self.omega), "omega must lie in [0.5, 1]")?;
        check(self.mu_ref >= 0.0, "reference viscosity must be non-negative")
    }

    /// Boltzmann constant consistent with `mass` and `r` (k = m R).
    pub fn boltzmann(&self) -> f64 {
        self.mass * self.r
    }

    /// Number of thermal quadratic terms besides the x-velocity.
    pub fn internal_dof(&self) -> f64 {
        (3.0 - self.gamma) / (self.gamma - 1.0)
    }

    pub fn sound_speed(&self, temperature: f64) -> f64 {
        (self.gamma * self.r * temperature).sqrt()
    }

    /// Power-law viscosity `mu_ref (T / T_ref)^omega`.
    pub fn viscosity(&self, temperature: f64) -> f64 {
        self.mu_ref * (temperature / self.t_ref).powf(self.omega)
    }

    /// Viscosity at `t_ref` implied by the VHS parameters (Bird, eq. 4.62).
    pub fn vhs_reference_viscosity(&self) -> f64 {
        let k = self.boltzmann();
        15.0 * (PI * self.mass * k * self.t_ref).sqrt()
            / (2.0 * (5.0 - 2.0 * self.omega) * (7.0 - 2.0 * self.omega) * PI * self.d_ref * self.d_ref)
    }

    /// Mean VHS total cross section at temperature `t`.
    pub fn cross_section(&self, temperature: f64) -> f64 {
        PI * self.d_ref * self.d_ref * (self.t_ref / temperature).powf(self.omega - 0.5)
    }

    /// Mean free path `1 / (sqrt(2) sigma n)`.
    pub fn mean_free_path(&self, number_density: f64, temperature: f64) -> f64 {
        1.0 / (std::f64::consts::SQRT_2 * self.cross_section(temperature) * number_density)
    }

    /// Mean molecular speed `sqrt(8 R T / pi)`.
    pub fn mean_speed(&self, temperature: f64) -> f64 {
        (8.0 * self.r * temperature / PI).sqrt()
    }

    /// Mean collision time `lambda / c_bar`.
    pub fn mean_collision_time(&self, number_density: f64, temperature: f64) -> f64 {
        self.mean_free_path(number_density, temperature) / self.mean_speed(temperature)
    }

    /// Equilibrium collision frequency per molecule for the VHS model.
    pub fn collision_frequency(&self, number_density: f64, temperature: f64) -> f64 {
        4.0 * self.d_ref
            * self.d_ref
            * number_density
            * (PI * self.boltzmann() * self.t_ref / self.mass).sqrt()
            * (temperature / self.t_ref).powf(1.0 - self.omega)
    }

    /// Prefactor `K` of `sigma_T c_r = K c_r^(2 - 2 omega)`.
    pub fn vhs_sigma_cr_coefficient(&self) -> f64 {
        let k = self.boltzmann();
        let reduced = 0.5 * self.mass;
        PI * self.d_ref * self.d_ref * (2.0 * k * self.t_ref / reduced).powf(self.omega - 0.5)
            / libm::tgamma(2.5 - self.omega)
    }
}

impl Default for GasModel {
    fn default() -> Self {
        GasModel::argon()
    }
}

/// Length and time scales of a reference state: the mean free path
/// `1 / (sqrt(2) sigma n)` and the mean collision time `lambda / c_bar`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceScales {
    pub number_density: f64,
    pub temperature: f64,
    pub mean_free_path: f64,
    pub collision_time: f64,
}

impl ReferenceScales {
    pub fn of(state: &GasState, gm: &GasModel) -> Self {
        let n = state.number_density(gm);
        ReferenceScales {
            number_density: n,
            temperature: state.temperature,
            mean_free_path: gm.mean_free_path(n, state.temperature),
            collision_time: gm.mean_collision_time(n, state.temperature),
        }
    }
}

/// Macroscopic state in primitive variables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GasState {
    pub rho: f64,
    pub u: f64,
    pub temperature: f64,
}

impl GasState {
    pub fn new(rho: f64, u: f64, temperature: f64) -> Result<Self> {
        let s = GasState { rho, u, temperature };
        s.validate()?;
        Ok(s)
    }

    /// Builds a state from density, velocity and pressure.
    pub fn from_pressure(rho: f64, u: f64, p: f64, gm: &GasModel) -> Result<Self> {
        GasState::new(rho, u, p / (rho * gm.r))
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rho > 0.0 && self.rho.is_finite()) {
            return Err(Error::positivity("rho", self.rho, "gas state"));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::positivity("temperature", self.temperature, "gas state"));
        }
        if !self.u.is_finite() {
            return Err(Error::Domain("velocity is not finite".into()));
        }
        Ok(())
    }

    pub fn pressure(&self, gm: &GasModel) -> f64 {
        self.rho * gm.r * self.temperature
    }

    pub fn number_density(&self, gm: &GasModel) -> f64 {
        self.rho / gm.mass
    }

    pub fn sound_speed(&self, gm: &GasModel) -> f64 {
        gm.sound_speed(self.temperature)
    }

    pub fn conserved(&self, gm: &GasModel) -> ConservedState {
        let e_int = self.rho * gm.r * self.temperature / (gm.gamma - 1.0);
        ConservedState {
            rho: self.rho,
            mom: self.rho * self.u,
            energy: 0.5 * self.rho * self.u * self.u + e_int,
        }
    }

    /// Inverse of [`GasState::conserved`].
    pub fn from_conserved(w: &ConservedState, gm: &GasModel) -> Result<Self> {
        if !(w.rho > 0.0) || !w.rho.is_finite() {
            return Err(Error::positivity("rho", w.rho, "conserved state"));
        }
        let u = w.mom / w.rho;
        let e_int = w.energy - 0.5 * w.mom * u;
        if !(e_int > 0.0) || !e_int.is_finite() {
            return Err(Error::positivity("internal energy", e_int, "conserved state"));
        }
        Ok(GasState {
            rho: w.rho,
            u,
            temperature: e_int * (gm.gamma - 1.0) / (w.rho * gm.r),
        })
    }

    /// Inviscid flux `(rho u, rho u^2 + p, u (E + p))`.
    pub fn euler_flux(&self, gm: &GasModel) -> FluxVector {
        let p = self.pressure(gm);
        let e = self.conserved(gm).energy;
        FluxVector {
            mass: self.rho * self.u,
            momentum: self.rho * self.u * self.u + p,
            energy: self.u * (e + p),
        }
    }
}

/// Conserved variables per unit volume.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct ConservedState {
    pub rho: f64,
    pub mom: f64,
    pub energy: f64,
}

impl ConservedState {
    pub fn internal_energy(&self) -> f64 {
        self.energy - 0.5 * self.mom * self.mom / self.rho
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.rho, self.mom, self.energy]
    }

    pub fn from_array(a: [f64; 3]) -> Self {
        ConservedState {
            rho: a[0],
            mom: a[1],
            energy: a[2],
        }
    }
}

impl Add for ConservedState {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        ConservedState {
            rho: self.rho + o.rho,
            mom: self.mom + o.mom,
            energy: self.energy + o.energy,
        }
    }
}

impl Sub for ConservedState {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        ConservedState {
            rho: self.rho - o.rho,
            mom: self.mom - o.mom,
            energy: self.energy - o.energy,
        }
    }
}

impl Mul<f64> for ConservedState {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        ConservedState {
            rho: self.rho * k,
            mom: self.mom * k,
            energy: self.energy * k,
        }
    }
}

/// Mass, momentum and energy flux through a unit interface.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FluxVector {
    pub mass: f64,
    pub momentum: f64,
    pub energy: f64,
}

impl FluxVector {
    pub fn is_finite(&self) -> bool {
        self.mass.is_finite() && self.momentum.is_finite() && self.energy.is_finite()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.mass, self.momentum, self.energy]
    }

    /// Change of conserved state produced by this flux over `dt / dx`.
    pub fn as_conserved(self) -> ConservedState {
        ConservedState {
            rho: self.mass,
            mom: self.momentum,
            energy: self.energy,
        }
    }
}

impl Add for FluxVector {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        FluxVector {
            mass: self.mass + o.mass,
            momentum: self.momentum + o.momentum,
            energy: self.energy + o.energy,
        }
    }
}

impl Sub for FluxVector {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        FluxVector {
            mass: self.mass - o.mass,
            momentum: self.momentum - o.momentum,
            energy: self.energy - o.energy,
        }
    }
}

impl Mul<f64> for FluxVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        FluxVector {
            mass: self.mass * k,
            momentum: self.momentum * k,
            energy: self.energy * k,
        }
    }
}

/// One-dimensional Maxwellian `n (beta / sqrt(pi)) exp(-beta^2 (c - u)^2)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Maxwellian {
    /// Number density, 1/m^3.
    pub n: f64,
    pub u: f64,
    /// Inverse of the most probable thermal speed, `1 / sqrt(2 R T)`.
    pub beta: f64,
}

/// Half of velocity space selected by the sign of `c`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HalfSpace {
    /// `c < 0`
    Left,
    /// `c > 0`
    Right,
}

impl Maxwellian {
    pub fn from_state(s: &GasState, gm: &GasModel) -> Self {
        Maxwellian {
            n: s.rho / gm.mass,
            u: s.u,
            beta: 1.0 / (2.0 * gm.r * s.temperature).sqrt(),
        }
    }

    pub fn temperature(&self, gm: &GasModel) -> f64 {
        1.0 / (2.0 * gm.r * self.beta * self.beta)
    }

    pub fn state(&self, gm: &GasModel) -> GasState {
        GasState {
            rho: self.n * gm.mass,
            u: self.u,
            temperature: self.temperature(gm),
        }
    }

    /// Value of the distribution at x-velocity `c`.
    pub fn eval(&self, c: f64) -> f64 {
        let z = self.beta * (c - self.u);
        self.n * self.beta / SQRT_PI * (-z * z).exp()
    }

    /// Conserved moments of the full distribution.
    pub fn moments_full(&self, gm: &GasModel) -> ConservedState {
        self.state(gm).conserved(gm)
    }

    /// Full-space moments `int c^k f dc` for k = 0..=3.
    pub fn full_moments(&self) -> [f64; 4] {
        let u = self.u;
        let h = 0.5 / (self.beta * self.beta);
        [
            self.n,
            self.n * u,
            self.n * (u * u + h),
            self.n * (u * u * u + 3.0 * u * h),
        ]
    }

    /// Half-space moments `int c^k f dc` over `side` for k = 0..=3.
    pub fn half_moments_all(&self, side: HalfSpace) -> [f64; 4] {
        let s = self.beta * self.u;
        let h = 0.5 / (self.beta * self.beta);
        let edge = self.n * (-s * s).exp() / (2.0 * self.beta * SQRT_PI);
        let (m0, m1) = match side {
            HalfSpace::Right => {
                let m0 = 0.5 * self.n * libm::erfc(-s);
                (m0, self.u * m0 + edge)
            }
            HalfSpace::Left => {
                let m0 = 0.5 * self.n * libm::erfc(s);
                (m0, self.u * m0 - edge)
            }
        };
        let m2 = self.u * m1 + h * m0;
        let m3 = self.u * m2 + 2.0 * h * m1;
        [m0, m1, m2, m3]
    }

    /// Half-space moment of a single order `k <= 3`.
    pub fn half_moment(&self, side: HalfSpace, order: usize) -> Result<f64> {
        if order > 3 {
            return Err(Error::Domain(format!(
                "half moments are available up to order 3, got {order}"
            )));
        }
        Ok(self.half_moments_all(side)[order])
    }
}
