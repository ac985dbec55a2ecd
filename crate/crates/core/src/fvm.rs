//! One-dimensional finite-volume solver for the Euler equations with a
//! choice of interface flux and MUSCL reconstruction.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{Profile, Source, Units};
use crate::error::{Error, Result};
use crate::fluxes::{gks_flux, kfvs_flux, GksParams};
use crate::gas::{ConservedState, FluxVector, GasModel, GasState};
use crate::riemann::godunov_flux;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FluxKind {
    Godunov,
    Kfvs,
    Gks,
}

impl FluxKind {
    pub fn name(self) -> &'static str {
        match self {
            FluxKind::Godunov => "godunov",
            FluxKind::Kfvs => "kfvs",
            FluxKind::Gks => "gks",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Limiter {
    None,
    Minmod,
    Vanleer,
}

impl Limiter {
    fn apply(self, a: f64, b: f64) -> f64 {
        match self {
            Limiter::None => 0.0,
            Limiter::Minmod => {
                if a * b <= 0.0 {
                    0.0
                } else if a.abs() < b.abs() {
                    a
                } else {
                    b
                }
            }
            Limiter::Vanleer => {
                if a * b <= 0.0 {
                    0.0
                } else {
                    2.0 * a * b / (a + b)
                }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchemeConfig {
    pub flux: FluxKind,
    pub limiter: Limiter,
    pub cfl: f64,
    #[serde(default)]
    pub gks: GksParams,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        SchemeConfig {
            flux: FluxKind::Godunov,
            limiter: Limiter::None,
            cfl: 0.5,
            gks: GksParams::default(),
        }
    }
}

impl SchemeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::Precondition(format!(
                "cfl must lie in (0, 0.9], got {}",
                self.cfl
            )));
        }
        self.gks.validate()
    }

    fn label(&self) -> String {
        format!("{} flux, {:?} limiter", self.flux.name(), self.limiter).to_lowercase()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Ghost cells hold a fixed far-field state.
    Fixed(GasState),
    /// Ghost cells copy the adjacent interior cell.
    ZeroGradient,
}

/// Uniform grid of cell averages.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    pub x_min: f64,
    pub x_max: f64,
    pub cells: Vec<ConservedState>,
    pub left: Boundary,
    pub right: Boundary,
    pub time: f64,
}

impl Grid1D {
    /// Grid whose cells hold `init` evaluated at the cell centres.
    pub fn from_fn(
        n: usize,
        x_min: f64,
        x_max: f64,
        left: Boundary,
        right: Boundary,
        gm: &GasModel,
        init: impl Fn(f64) -> GasState,
    ) -> Result<Self> {
        if n < 4 {
            return Err(Error::Precondition(format!("grid needs at least 4 cells, got {n}")));
        }
        if !(x_max > x_min) {
            return Err(Error::Precondition(format!("grid extent [{x_min}, {x_max}] is empty")));
        }
        let dx = (x_max - x_min) / n as f64;
        let cells = (0..n)
            .map(|i| {
                let s = init(x_min + (i as f64 + 0.5) * dx);
                s.validate().map(|_| s.conserved(gm))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Grid1D {
            x_min,
            x_max,
            cells,
            left,
            right,
            time: 0.0,
        })
    }

    /// Two constant states separated at `x0`.
    pub fn riemann(
        n: usize,
        x_min: f64,
        x_max: f64,
        x0: f64,
        left_state: GasState,
        right_state: GasState,
        boundaries: (Boundary, Boundary),
        gm: &GasModel,
    ) -> Result<Self> {
        Self::from_fn(n, x_min, x_max, boundaries.0, boundaries.1, gm, |x| {
            if x < x0 {
                left_state
            } else {
                right_state
            }
        })
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.len() as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        let dx = self.dx();
        (0..self.len()).map(|i| self.x_min + (i as f64 + 0.5) * dx).collect()
    }

    pub fn primitives(&self, gm: &GasModel) -> Result<Vec<GasState>> {
        primitives(&self.cells, gm, "grid state")
    }

    /// Sum of the conserved variables times the cell width.
    pub fn totals(&self) -> [f64; 3] {
        let dx = self.dx();
        let mut t = [0.0; 3];
        for c in &self.cells {
            let a = c.to_array();
            for k in 0..3 {
                t[k] += a[k] * dx;
            }
        }
        t
    }

    pub fn profile(&self, gm: &GasModel, units: Units) -> Result<Profile> {
        let prim = self.primitives(gm)?;
        let t: Vec<f64> = prim.iter().map(|s| s.temperature).collect();
        Profile::new(
            self.centres(),
            prim.iter().map(|s| s.rho).collect(),
            prim.iter().map(|s| s.u).collect(),
            t.clone(),
            t,
            self.time,
            units,
            Source::Fvm,
        )
    }
}

fn primitives(cells: &[ConservedState], gm: &GasModel, context: &str) -> Result<Vec<GasState>> {
    cells
        .iter()
        .enumerate()
        .map(|(i, w)| {
            GasState::from_conserved(w, gm).map_err(|e| match e {
                Error::Positivity { field, value, .. } => {
                    Error::positivity(field, value, format!("cell {i}, {context}"))
                }
                other => other,
            })
        })
        .collect()
}

/// Primitive states padded with two ghost cells per side.
fn padded(prim: &[GasState], grid: &Grid1D) -> Vec<GasState> {
    let n = prim.len();
    let ghost = |b: &Boundary, edge: GasState| match b {
        Boundary::Fixed(s) => *s,
        Boundary::ZeroGradient => edge,
    };
    let l = ghost(&grid.left, prim[0]);
    let r = ghost(&grid.right, prim[n - 1]);
    let mut out = Vec::with_capacity(n + 4);
    out.extend([l, l]);
    out.extend_from_slice(prim);
    out.extend([r, r]);
    out
}

/// Left and right states at each of the `N + 1` interfaces.
///
/// Slopes of `(rho, u, p)` are limited cell by cell; a slope that would make
/// an extrapolated density or pressure non-positive is set to zero.
pub fn reconstruct(grid: &Grid1D, limiter: Limiter, gm: &GasModel) -> Result<Vec<(GasState, GasState)>> {
    reconstruct_cells(grid, &grid.primitives(gm)?, limiter, gm)
}

fn reconstruct_cells(
    grid: &Grid1D,
    prim: &[GasState],
    limiter: Limiter,
    gm: &GasModel,
) -> Result<Vec<(GasState, GasState)>> {
    let q = padded(prim, grid);
    let n = prim.len();
    let vars = |s: &GasState| [s.rho, s.u, s.pressure(gm)];
    // Face values of padded cells 1..=n+2 (every cell adjacent to an interface).
    let mut faces: Vec<(GasState, GasState)> = Vec::with_capacity(n + 2);
    for i in 1..=n + 2 {
        let c = vars(&q[i]);
        if limiter == Limiter::None {
            faces.push((q[i], q[i]));
            continue;
        }
        let (m, p) = (vars(&q[i - 1]), vars(&q[i + 1]));
        let mut slope = [0.0; 3];
        for k in 0..3 {
            slope[k] = limiter.apply(c[k] - m[k], p[k] - c[k]);
        }
        let lo = [c[0] - 0.5 * slope[0], c[1] - 0.5 * slope[1], c[2] - 0.5 * slope[2]];
        let hi = [c[0] + 0.5 * slope[0], c[1] + 0.5 * slope[1], c[2] + 0.5 * slope[2]];
        if lo[0] > 0.0 && lo[2] > 0.0 && hi[0] > 0.0 && hi[2] > 0.0 {
            let mk = |v: [f64; 3]| GasState {
                rho: v[0],
                u: v[1],
                temperature: v[2] / (v[0] * gm.r),
            };
            faces.push((mk(lo), mk(hi)));
        } else {
            faces.push((q[i], q[i]));
        }
    }
    // Interface j (0..=n) lies between padded cells j + 1 and j + 2.
    Ok((0..=n).map(|j| (faces[j].1, faces[j + 1].0)).collect())
}

/// Largest stable step `cfl dx / max(|u| + a)`.
pub fn cfl_dt(grid: &Grid1D, cfl: f64, gm: &GasModel) -> Result<f64> {
    let prim = grid.primitives(gm)?;
    let smax = prim
        .iter()
        .map(|s| s.u.abs() + s.sound_speed(gm))
        .fold(0.0f64, f64::max);
    Ok(cfl * grid.dx() / smax)
}

fn interface_flux(l: &GasState, r: &GasState, dt: f64, scheme: &SchemeConfig, gm: &GasModel) -> Result<FluxVector> {
    match scheme.flux {
        FluxKind::Godunov => godunov_flux(l, r, gm),
        FluxKind::Kfvs => Ok(kfvs_flux(l, r, gm)),
        FluxKind::Gks => gks_flux(l, r, dt, &scheme.gks, gm),
    }
}

fn fluxes(
    grid: &Grid1D,
    cells: &[ConservedState],
    dt: f64,
    scheme: &SchemeConfig,
    gm: &GasModel,
    stage: &str,
) -> Result<Vec<FluxVector>> {
    let context = format!("{}, {stage}", scheme.label());
    let prim = primitives(cells, gm, &context)?;
    reconstruct_cells(grid, &prim, scheme.limiter, gm)?
        .iter()
        .map(|(l, r)| interface_flux(l, r, dt, scheme, gm))
        .collect()
}

fn update(cells: &[ConservedState], f: &[FluxVector], ratio: f64) -> Vec<ConservedState> {
    cells
        .iter()
        .enumerate()
        .map(|(i, w)| *w - (f[i + 1] - f[i]).as_conserved() * ratio)
        .collect()
}

/// Outcome of one time step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepReport {
    pub dt: f64,
    /// Time integral of the net boundary inflow `F_left - F_right` per unit area.
    pub boundary_inflow: [f64; 3],
}

/// Advances the grid by one step of at most `dt_max`.
///
/// Without a limiter this is forward Euler; with one, Heun's two-stage
/// scheme. Every cell is checked for positive density and internal energy.
pub fn step(grid: &mut Grid1D, scheme: &SchemeConfig, gm: &GasModel, dt_max: f64) -> Result<StepReport> {
    scheme.validate()?;
    let dt = cfl_dt(grid, scheme.cfl, gm)?.min(dt_max);
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("invalid time step {dt}")));
    }
    let ratio = dt / grid.dx();
    let n = grid.len();
    let f0 = fluxes(grid, &grid.cells, dt, scheme, gm, "stage 1")?;
    let (cells, net) = if scheme.limiter == Limiter::None {
        (update(&grid.cells, &f0, ratio), f0[0] - f0[n])
    } else {
        let w1 = update(&grid.cells, &f0, ratio);
        let f1 = fluxes(grid, &w1, dt, scheme, gm, "stage 2")?;
        let w2 = update(&w1, &f1, ratio);
        let cells = grid.cells.iter().zip(&w2).map(|(a, b)| (*a + *b) * 0.5).collect();
        (cells, (f0[0] - f0[n] + f1[0] - f1[n]) * 0.5)
    };
    primitives(&cells, gm, &format!("{}, after update", scheme.label()))?;
    grid.cells = cells;
    grid.time += dt;
    let net = net.to_array();
    Ok(StepReport {
        dt,
        boundary_inflow: [net[0] * dt, net[1] * dt, net[2] * dt],
    })
}

/// Steps to each requested time and returns the profiles there.
pub fn run(
    grid: &mut Grid1D,
    scheme: &SchemeConfig,
    gm: &GasModel,
    sample_times: &[f64],
    units: Units,
    max_steps: usize,
) -> Result<Vec<Profile>> {
    if sample_times.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Precondition("sample times must increase strictly".into()));
    }
    let mut out = Vec::with_capacity(sample_times.len());
    let mut steps = 0usize;
    for &t in sample_times {
        if t < grid.time {
            return Err(Error::Precondition(format!(
                "sample time {t} precedes the grid time {}",
                grid.time
            )));
        }
        while grid.time < t {
            // Land exactly on the sample time, avoiding a sliver step.
            let remaining = t - grid.time;
            if remaining <= 1e-14 * t.abs().max(1.0) {
                grid.time = t;
                break;
            }
            step(grid, scheme, gm, remaining)?;
            steps += 1;
            if steps > max_steps {
                return Err(Error::Convergence {
                    what: "time stepping within the step budget",
                    achieved: grid.time,
                });
            }
        }
        out.push(grid.profile(gm, units)?);
    }
    Ok(out)
}
