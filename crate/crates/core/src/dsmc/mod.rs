//! Unsteady one-dimensional DSMC for a monatomic VHS gas.
//!
//! Each replica is an independent [`ParticleEnsemble`] on `[-L, L]` with
//! Maxwellian reservoirs at both ends. A step is free flight, removal of
//! particles that left the domain, flux-consistent injection from the
//! reservoirs, sorting into collision cells and NTC collisions. Unsteady
//! profiles are ensemble averages over replicas taken at fixed times.

mod checkpoint;
mod sampling;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::Profile;
use crate::error::{Error, Result};
use crate::freemol::DiscontinuityIC;
use crate::gas::{GasModel, GasState, HalfSpace, Maxwellian, ReferenceScales};

pub use sampling::{sample_profile, BinGrid, BinSpec, Tally};

/// Unit cross-sectional area of the simulated column, m^2.
const AREA: f64 = 1.0;

/// Settings of an unsteady run. Lengths are in units of the left-state mean
/// free path and times in units of its mean collision time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DsmcConfig {
    pub ic: DiscontinuityIC,
    pub half_length: f64,
    pub cells_per_lambda: f64,
    /// Target particles per collision cell on the lower-density side.
    pub particles_per_cell: f64,
    pub dt: f64,
    pub replicas: usize,
    pub sample_times: Vec<f64>,
    pub seed: u64,
    #[serde(default = "default_true")]
    pub collisions: bool,
    #[serde(default)]
    pub bins: BinSpec,
}

fn default_true() -> bool {
    true
}

impl DsmcConfig {
    /// Defaults: cells of a third of a mean free path, a tenth of a
    /// collision time per step, 100 particles per cell.
    pub fn new(ic: DiscontinuityIC, sample_times: Vec<f64>) -> Self {
        DsmcConfig {
            ic,
            half_length: 60.0,
            cells_per_lambda: 3.0,
            particles_per_cell: 100.0,
            dt: 0.1,
            replicas: 16,
            sample_times,
            seed: 1,
            collisions: true,
            bins: BinSpec::default(),
        }
    }

    pub fn validate(&self, gm: &GasModel) -> Result<()> {
        gm.validate()?;
        self.ic.validate(gm)?;
        let fail = |msg: String| Err(Error::Precondition(format!("dsmc config: {msg}")));
        if (gm.gamma - 5.0 / 3.0).abs() > 1e-12 {
            return fail(format!(
                "particles carry no internal energy; gamma must be 5/3, got {}",
                gm.gamma
            ));
        }
        if !(self.dt > 0.0 && self.dt <= 0.2 + 1e-12) {
            return fail(format!("dt must lie in (0, 0.2] collision times, got {}", self.dt));
        }
        if !(self.cells_per_lambda >= 2.0 - 1e-12) || !self.cells_per_lambda.is_finite() {
            return fail(format!(
                "cells must be at most half a mean free path (cells_per_lambda >= 2), got {}",
                self.cells_per_lambda
            ));
        }
        if self.replicas < 1 {
            return fail("at least one replica is required".into());
        }
        if !(self.particles_per_cell >= 1.0) {
            return fail(format!(
                "particles_per_cell must be at least 1, got {}",
                self.particles_per_cell
            ));
        }
        if !(self.half_length > 0.0) || !self.half_length.is_finite() {
            return fail(format!("half_length must be positive, got {}", self.half_length));
        }
        if self.sample_times.is_empty() {
            return fail("no sample times".into());
        }
        if self.sample_times[0] <= 0.0 || self.sample_times.windows(2).any(|w| !(w[1] > w[0])) {
            return fail("sample times must be positive and strictly increasing".into());
        }
        self.bins.validate()
    }

    /// Scales of the left state, which define the output units.
    pub fn scales(&self, gm: &GasModel) -> ReferenceScales {
        ReferenceScales::of(&self.ic.left, gm)
    }
}

/// Particles of one replica together with its cell grid and generator.
#[derive(Debug, Clone, PartialEq)]
pub struct ParticleEnsemble {
    pub x: Vec<f64>,
    pub v: Vec<[f64; 3]>,
    /// Real molecules per simulated particle.
    pub weight: f64,
    pub x_min: f64,
    pub x_max: f64,
    pub n_cells: usize,
    pub time: f64,
    pub left_reservoir: GasState,
    pub right_reservoir: GasState,
    /// Accepted collisions since initialisation.
    pub collisions: u64,
    rng: ChaCha8Rng,
    sigma_cr_max: Vec<f64>,
    pair_remainder: Vec<f64>,
    inject_carry: [f64; 2],
    cell_start: Vec<usize>,
}

impl ParticleEnsemble {
    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn cell_dx(&self) -> f64 {
        (self.x_max - self.x_min) / self.n_cells as f64
    }

    fn cell_of(&self, x: f64) -> usize {
        let i = ((x - self.x_min) / self.cell_dx()) as usize;
        i.min(self.n_cells - 1)
    }

    /// Stream and position of the replica's generator.
    pub fn rng_state(&self) -> (u64, u128) {
        (self.rng.get_stream(), self.rng.get_word_pos())
    }
}

/// Generator of replica `index`: one ChaCha stream per replica under a common seed.
pub fn replica_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn normal(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(StandardNormal)
}

/// Uniform on `(0, 1]`.
fn open_unit(rng: &mut ChaCha8Rng) -> f64 {
    1.0 - rng.random::<f64>()
}

/// Draws `z > 0` with density proportional to `z exp(-(z - s)^2)`.
///
/// This is the normal speed (in units of the most probable speed) of
/// molecules crossing a plane out of a Maxwellian drifting at `s` towards it.
pub fn sample_flux_speed(rng: &mut ChaCha8Rng, s: f64) -> f64 {
    if s < 0.0 {
        // Tail of the Rayleigh density |y| exp(-y^2) beyond y = -s, accepted
        // with probability z / y.
        loop {
            let y = (s * s - open_unit(rng).ln()).sqrt();
            let z = y + s;
            if rng.random::<f64>() * y < z {
                return z;
            }
        }
    }
    // Proposal (|y| + s) exp(-y^2) with y = z - s, accepted with z / (|y| + s).
    let w_rayleigh = 1.0;
    let w_gauss = s * std::f64::consts::PI.sqrt();
    loop {
        let y = if rng.random::<f64>() * (w_rayleigh + w_gauss) < w_rayleigh {
            let r = (-open_unit(rng).ln()).sqrt();
            if rng.random::<bool>() {
                r
            } else {
                -r
            }
        } else {
            normal(rng) * std::f64::consts::FRAC_1_SQRT_2
        };
        let z = y + s;
        if z > 0.0 && rng.random::<f64>() * (y.abs() + s) < z {
            return z;
        }
    }
}

fn thermal_velocity(rng: &mut ChaCha8Rng, state: &GasState, gm: &GasModel) -> [f64; 3] {
    let sd = (gm.r * state.temperature).sqrt();
    [state.u + sd * normal(rng), sd * normal(rng), sd * normal(rng)]
}

/// Initial `(sigma_T c_r)_max` of a cell: the value at a relative speed well
/// into the tail of the hotter reservoir.
fn initial_sigma_cr(gm: &GasModel, t_max: f64) -> f64 {
    let cr = 3.0 * (4.0 * gm.r * t_max).sqrt();
    gm.vhs_sigma_cr_coefficient() * cr.powf(2.0 - 2.0 * gm.omega)
}

/// Builds replica `index` with particles drawn from the two initial states.
pub fn init_ensemble(cfg: &DsmcConfig, gm: &GasModel, index: u64) -> Result<ParticleEnsemble> {
    cfg.validate(gm)?;
    let scales = cfg.scales(gm);
    let lambda = scales.mean_free_path;
    let dx = lambda / cfg.cells_per_lambda;
    let per_side = (cfg.half_length * cfg.cells_per_lambda).ceil() as usize;
    let n_cells = 2 * per_side;
    let x_min = -(per_side as f64) * dx;
    let x_max = per_side as f64 * dx;

    let (left, right) = (cfg.ic.left, cfg.ic.right);
    let weight = particle_weight(cfg, gm);

    let mut rng = replica_rng(cfg.seed, index);
    let expected: f64 = [left, right]
        .iter()
        .map(|s| s.number_density(gm) * dx * AREA / weight * per_side as f64)
        .sum();
    let mut x = Vec::with_capacity((expected * 1.1) as usize + 16);
    let mut v = Vec::with_capacity(x.capacity());
    for cell in 0..n_cells {
        let state = if cell < per_side { &left } else { &right };
        let mean = state.number_density(gm) * dx * AREA / weight;
        let count = (mean + rng.random::<f64>()).floor() as usize;
        let lo = x_min + cell as f64 * dx;
        for _ in 0..count {
            x.push(lo + rng.random::<f64>() * dx);
            v.push(thermal_velocity(&mut rng, state, gm));
        }
    }
    let sigma0 = initial_sigma_cr(gm, left.temperature.max(right.temperature));
    let mut ens = ParticleEnsemble {
        x,
        v,
        weight,
        x_min,
        x_max,
        n_cells,
        time: 0.0,
        left_reservoir: left,
        right_reservoir: right,
        collisions: 0,
        rng,
        sigma_cr_max: vec![sigma0; n_cells],
        pair_remainder: vec![0.0; n_cells],
        inject_carry: [0.0; 2],
        cell_start: vec![0; n_cells + 1],
    };
    sort_into_cells(&mut ens);
    Ok(ens)
}

/// Reorders particles so that each collision cell is contiguous.
fn sort_into_cells(ens: &mut ParticleEnsemble) {
    let n = ens.n_cells;
    let cells: Vec<usize> = ens.x.iter().map(|&x| ens.cell_of(x)).collect();
    let mut start = vec![0usize; n + 1];
    for &c in &cells {
        start[c + 1] += 1;
    }
    for i in 0..n {
        start[i + 1] += start[i];
    }
    let mut next = start.clone();
    let mut x = vec![0.0; ens.x.len()];
    let mut v = vec![[0.0; 3]; ens.v.len()];
    for (k, &c) in cells.iter().enumerate() {
        let slot = next[c];
        next[c] += 1;
        x[slot] = ens.x[k];
        v[slot] = ens.v[k];
    }
    ens.x = x;
    ens.v = v;
    ens.cell_start = start;
}

/// Number flux into the domain from a reservoir, per unit area and time.
fn inflow_flux(state: &GasState, gm: &GasModel, from_left: bool) -> f64 {
    let mx = Maxwellian::from_state(state, gm);
    if from_left {
        mx.half_moment(HalfSpace::Right, 1).expect("order 1")
    } else {
        -mx.half_moment(HalfSpace::Left, 1).expect("order 1")
    }
}

fn inject(ens: &mut ParticleEnsemble, gm: &GasModel, dt: f64) {
    for (side, from_left) in [(0usize, true), (1usize, false)] {
        let state = if from_left {
            ens.left_reservoir
        } else {
            ens.right_reservoir
        };
        let expected = inflow_flux(&state, gm, from_left) * AREA * dt / ens.weight + ens.inject_carry[side];
        let count = expected.floor();
        ens.inject_carry[side] = expected - count;
        let beta = 1.0 / (2.0 * gm.r * state.temperature).sqrt();
        let sd = (gm.r * state.temperature).sqrt();
        // Drift towards the domain, in units of the most probable speed.
        let s = if from_left { beta * state.u } else { -beta * state.u };
        for _ in 0..count as usize {
            let speed = sample_flux_speed(&mut ens.rng, s) / beta;
            let cx = if from_left { speed } else { -speed };
            // Entered at a uniformly distributed instant within the step.
            let travel = cx * dt * ens.rng.random::<f64>();
            let x = if from_left {
                ens.x_min + travel
            } else {
                ens.x_max + travel
            };
            let vy = sd * normal(&mut ens.rng);
            let vz = sd * normal(&mut ens.rng);
            if x >= ens.x_min && x < ens.x_max {
                ens.x.push(x);
                ens.v.push([cx, vy, vz]);
            }
        }
    }
}

fn collide_cells(ens: &mut ParticleEnsemble, gm: &GasModel, dt: f64) {
    let k = gm.vhs_sigma_cr_coefficient();
    let exponent = 2.0 - 2.0 * gm.omega;
    let volume = ens.cell_dx() * AREA;
    for cell in 0..ens.n_cells {
        let (lo, hi) = (ens.cell_start[cell], ens.cell_start[cell + 1]);
        let n = hi - lo;
        if n < 2 {
            continue;
        }
        let nf = n as f64;
        let expected =
            0.5 * nf * (nf - 1.0) * ens.weight * ens.sigma_cr_max[cell] * dt / volume + ens.pair_remainder[cell];
        let pairs = expected.floor();
        ens.pair_remainder[cell] = expected - pairs;
        for _ in 0..pairs as usize {
            let i = lo + ens.rng.random_range(0..n);
            let mut j = lo + ens.rng.random_range(0..n - 1);
            if j >= i {
                j += 1;
            }
            let (a, b) = (ens.v[i], ens.v[j]);
            let rel = [a[0] - b[0], a[1] - b[1], a[2] - b[2]];
            let cr = (rel[0] * rel[0] + rel[1] * rel[1] + rel[2] * rel[2]).sqrt();
            let sigma_cr = k * cr.powf(exponent);
            if sigma_cr > ens.sigma_cr_max[cell] {
                ens.sigma_cr_max[cell] = sigma_cr;
            }
            if ens.rng.random::<f64>() * ens.sigma_cr_max[cell] >= sigma_cr {
                continue;
            }
            let cos = 2.0 * ens.rng.random::<f64>() - 1.0;
            let sin = (1.0 - cos * cos).sqrt();
            let phi = std::f64::consts::TAU * ens.rng.random::<f64>();
            let post = [cr * cos, cr * sin * phi.cos(), cr * sin * phi.sin()];
            let mut na = [0.0; 3];
            let mut nb = [0.0; 3];
            for d in 0..3 {
                let cm = 0.5 * (a[d] + b[d]);
                na[d] = cm + 0.5 * post[d];
                nb[d] = cm - 0.5 * post[d];
            }
            debug_assert!(pair_conserves(&a, &b, &na, &nb), "collision broke conservation");
            ens.v[i] = na;
            ens.v[j] = nb;
            ens.collisions += 1;
        }
    }
}

fn pair_conserves(a: &[f64; 3], b: &[f64; 3], na: &[f64; 3], nb: &[f64; 3]) -> bool {
    let e = |v: &[f64; 3]| v[0] * v[0] + v[1] * v[1] + v[2] * v[2];
    let (e0, e1) = (e(a) + e(b), e(na) + e(nb));
    let scale = e0.sqrt();
    let momentum_ok = (0..3).all(|d| ((a[d] + b[d]) - (na[d] + nb[d])).abs() <= 1e-12 * scale);
    momentum_ok && (e0 - e1).abs() <= 1e-12 * e0
}

/// Advances one replica by `dt` seconds.
pub fn advance(ens: &mut ParticleEnsemble, gm: &GasModel, dt: f64, collisions: bool) -> Result<()> {
    if !(dt > 0.0) || !dt.is_finite() {
        return Err(Error::Domain(format!("time step must be positive, got {dt}")));
    }
    for (x, v) in ens.x.iter_mut().zip(&ens.v) {
        *x += v[0] * dt;
    }
    if let Some(bad) = ens.x.iter().find(|x| !x.is_finite()) {
        return Err(Error::Domain(format!("particle position became {bad}")));
    }
    // Particles past either end are absorbed by the reservoirs.
    let (lo, hi) = (ens.x_min, ens.x_max);
    let mut keep = 0;
    for k in 0..ens.x.len() {
        let x = ens.x[k];
        if x >= lo && x < hi {
            ens.x[keep] = x;
            ens.v[keep] = ens.v[k];
            keep += 1;
        }
    }
    ens.x.truncate(keep);
    ens.v.truncate(keep);
    inject(ens, gm, dt);
    sort_into_cells(ens);
    if collisions {
        collide_cells(ens, gm, dt);
    }
    ens.time += dt;
    Ok(())
}

/// Profiles and bookkeeping of an unsteady run.
#[derive(Debug, Clone, PartialEq)]
pub struct UnsteadyRun {
    /// One profile per sample time, `x` in mean free paths and `t` in
    /// collision times of the left state.
    pub profiles: Vec<Profile>,
    pub scales: ReferenceScales,
    pub weight: f64,
    pub collisions: u64,
    /// Mean particle count per replica at the last sample time.
    pub mean_particles: f64,
}

struct ReplicaResult {
    tallies: Vec<Vec<Tally>>,
    collisions: u64,
    particles: usize,
}

fn run_replica(cfg: &DsmcConfig, gm: &GasModel, grids: &[BinGrid], index: u64) -> Result<ReplicaResult> {
    let mut ens = init_ensemble(cfg, gm, index)?;
    let tau = cfg.scales(gm).collision_time;
    let dt = cfg.dt * tau;
    let mut tallies = Vec::with_capacity(grids.len());
    for (grid, &t_ref) in grids.iter().zip(&cfg.sample_times) {
        let target = t_ref * tau;
        while target - ens.time > 1e-9 * dt {
            let step = dt.min(target - ens.time);
            advance(&mut ens, gm, step, cfg.collisions)?;
        }
        tallies.push(grid.tally(&ens));
    }
    Ok(ReplicaResult {
        tallies,
        collisions: ens.collisions,
        particles: ens.len(),
    })
}

/// Runs every replica and returns ensemble-averaged profiles at the sample
/// times. Results depend only on the configuration, not on the number of
/// threads: each replica owns its generator stream and the reduction runs
/// in replica order.
pub fn run_unsteady(cfg: &DsmcConfig, gm: &GasModel) -> Result<UnsteadyRun> {
    cfg.validate(gm)?;
    let scales = cfg.scales(gm);
    let grids: Vec<BinGrid> = cfg
        .sample_times
        .iter()
        .map(|&t| BinGrid::for_time(&cfg.bins, cfg.half_length, t, &scales))
        .collect::<Result<_>>()?;

    let chunk = rayon::current_num_threads().max(1);
    let mut totals: Vec<Vec<Tally>> = grids.iter().map(|g| vec![Tally::default(); g.len()]).collect();
    let mut collisions = 0u64;
    let mut particles = 0usize;
    let indices: Vec<u64> = (0..cfg.replicas as u64).collect();
    for batch in indices.chunks(chunk) {
        let results: Vec<Result<ReplicaResult>> = batch.par_iter().map(|&i| run_replica(cfg, gm, &grids, i)).collect();
        for r in results {
            let r = r?;
            for (total, replica) in totals.iter_mut().zip(&r.tallies) {
                for (a, b) in total.iter_mut().zip(replica) {
                    a.merge(b);
                }
            }
            collisions += r.collisions;
            particles += r.particles;
        }
    }
    let weight = particle_weight(cfg, gm);
    let profiles = grids
        .iter()
        .zip(&totals)
        .zip(&cfg.sample_times)
        .map(|((g, t), &time)| g.profile(t, cfg.replicas, weight, gm, time))
        .collect::<Result<Vec<_>>>()?;
    Ok(UnsteadyRun {
        profiles,
        scales,
        weight,
        collisions,
        mean_particles: particles as f64 / cfg.replicas as f64,
    })
}

/// Real molecules per simulated particle.
pub fn particle_weight(cfg: &DsmcConfig, gm: &GasModel) -> f64 {
    let scales = cfg.scales(gm);
    let dx = scales.mean_free_path / cfg.cells_per_lambda;
    let n_low = cfg.ic.left.number_density(gm).min(cfg.ic.right.number_density(gm));
    n_low * dx * AREA / cfg.particles_per_cell
}
