//! Sampling bins and the moment tallies accumulated in them.

use serde::{Deserialize, Serialize};

use super::{ParticleEnsemble, AREA};
use crate::diagnostics::{Profile, SampleStats, Source, Units};
use crate::error::{Error, Result};
use crate::gas::{GasModel, ReferenceScales};

/// Width of the sampling bins, in left-state mean free paths.
///
/// At time `t` (in collision times) the width is
/// `max(width, growth * sqrt(t))`, so bins widen with a diffusing layer.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BinSpec {
    pub width: f64,
    #[serde(default)]
    pub growth: f64,
}

impl Default for BinSpec {
    fn default() -> Self {
        BinSpec {
            width: 1.0,
            growth: 0.0,
        }
    }
}

impl BinSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.width > 0.0) || !self.width.is_finite() {
            return Err(Error::Precondition(format!(
                "bin width must be positive, got {}",
                self.width
            )));
        }
        if !(self.growth >= 0.0) || !self.growth.is_finite() {
            return Err(Error::Precondition(format!(
                "bin growth must be non-negative, got {}",
                self.growth
            )));
        }
        Ok(())
    }

    pub fn width_at(&self, t: f64) -> f64 {
        self.width.max(self.growth * t.max(0.0).sqrt())
    }
}

/// Bins of equal width placed symmetrically about `x = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinGrid {
    /// Bins on each side of the origin.
    pub per_side: usize,
    /// Width in metres.
    pub width: f64,
    pub scales: ReferenceScales,
}

impl BinGrid {
    /// Grid for a sample at `t` collision times in a domain of half-length
    /// `half_length` mean free paths.
    pub fn for_time(spec: &BinSpec, half_length: f64, t: f64, scales: &ReferenceScales) -> Result<Self> {
        spec.validate()?;
        let w = spec.width_at(t);
        let per_side = (half_length / w + 1e-9).floor() as usize;
        if per_side == 0 {
            return Err(Error::Precondition(format!(
                "bin width {w} exceeds the half-length {half_length}"
            )));
        }
        Ok(BinGrid {
            per_side,
            width: w * scales.mean_free_path,
            scales: *scales,
        })
    }

    pub fn len(&self) -> usize {
        2 * self.per_side
    }

    pub fn is_empty(&self) -> bool {
        self.per_side == 0
    }

    /// Bin centres in mean free paths.
    pub fn centres(&self) -> Vec<f64> {
        let w = self.width / self.scales.mean_free_path;
        (0..self.len())
            .map(|k| (k as f64 - self.per_side as f64 + 0.5) * w)
            .collect()
    }

    fn bin_of(&self, x: f64) -> Option<usize> {
        let k = (x / self.width).floor() + self.per_side as f64;
        (k >= 0.0 && k < self.len() as f64).then_some(k as usize)
    }

    /// Moment sums of one replica.
    pub fn tally(&self, ens: &ParticleEnsemble) -> Vec<Tally> {
        let mut out = vec![Tally::default(); self.len()];
        for (x, v) in ens.x.iter().zip(&ens.v) {
            if let Some(b) = self.bin_of(*x) {
                out[b].add(v);
            }
        }
        out
    }

    /// Turns summed tallies over `replicas` replicas into a profile.
    pub fn profile(&self, tallies: &[Tally], replicas: usize, weight: f64, gm: &GasModel, t: f64) -> Result<Profile> {
        if tallies.len() != self.len() {
            return Err(Error::Precondition(format!(
                "{} tallies for {} bins",
                tallies.len(),
                self.len()
            )));
        }
        let volume = self.width * AREA * replicas as f64;
        let n = tallies.len();
        let mut rho = Vec::with_capacity(n);
        let mut u = Vec::with_capacity(n);
        let mut tn = Vec::with_capacity(n);
        let mut tx = Vec::with_capacity(n);
        let mut stats = SampleStats {
            samples: Vec::with_capacity(n),
            rho_se: Vec::with_capacity(n),
            u_se: Vec::with_capacity(n),
            tn_se: Vec::with_capacity(n),
            tx_se: Vec::with_capacity(n),
        };
        for tl in tallies {
            let m = tl.moments(gm.r);
            let d = gm.mass * weight * tl.count() / volume;
            stats.samples.push(tl.count());
            match m {
                Some(m) => {
                    rho.push(d);
                    u.push(m.u);
                    tn.push(m.tn);
                    tx.push(m.tx);
                    stats.rho_se.push(d / tl.count().sqrt());
                    stats.u_se.push(m.u_se);
                    stats.tn_se.push(m.tn_se);
                    stats.tx_se.push(m.tx_se);
                }
                None => {
                    rho.push(if tl.count() > 0.0 { d } else { f64::NAN });
                    for f in [&mut u, &mut tn, &mut tx] {
                        f.push(f64::NAN);
                    }
                    for f in [&mut stats.rho_se, &mut stats.u_se, &mut stats.tn_se, &mut stats.tx_se] {
                        f.push(f64::NAN);
                    }
                }
            }
        }
        let mut p = Profile::new(self.centres(), rho, u, tn, tx, t, Units::Reference, Source::Dsmc)?;
        p.stats = Some(stats);
        Ok(p)
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
struct CompensatedSum {
    sum: f64,
    comp: f64,
}

impl CompensatedSum {
    fn add(&mut self, v: f64) {
        let t = self.sum + v;
        if self.sum.abs() >= v.abs() {
            self.comp += (self.sum - t) + v;
        } else {
            self.comp += (v - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.comp
    }
}

const N_SUMS: usize = 9;

/// Velocity moment sums of the particles in one bin.
///
/// Entries: count, `sum cx^k` for k = 1..=4, `sum cy`, `sum cz`, `sum q`
/// and `sum q^2` with `q = cy^2 + cz^2`.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Tally {
    sums: [CompensatedSum; N_SUMS],
}

/// Per-bin estimates and their standard errors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BinMoments {
    pub u: f64,
    pub tx: f64,
    pub tn: f64,
    pub u_se: f64,
    pub tx_se: f64,
    pub tn_se: f64,
}

impl Tally {
    pub fn add(&mut self, v: &[f64; 3]) {
        let (cx, cy, cz) = (v[0], v[1], v[2]);
        let q = cy * cy + cz * cz;
        let cx2 = cx * cx;
        let vals = [1.0, cx, cx2, cx2 * cx, cx2 * cx2, cy, cz, q, q * q];
        for (s, v) in self.sums.iter_mut().zip(vals) {
            s.add(v);
        }
    }

    /// Adds another tally's sums into this one.
    pub fn merge(&mut self, other: &Tally) {
        for (s, o) in self.sums.iter_mut().zip(&other.sums) {
            s.add(o.sum);
            s.add(o.comp);
        }
    }

    pub fn count(&self) -> f64 {
        self.sums[0].value()
    }

    /// Mean velocity and temperatures; `None` with fewer than two samples.
    pub fn moments(&self, r: f64) -> Option<BinMoments> {
        let n = self.count();
        if n < 2.0 {
            return None;
        }
        let s: [f64; N_SUMS] = std::array::from_fn(|k| self.sums[k].value() / n);
        let mean = s[1];
        let var = (s[2] - mean * mean).max(0.0);
        let mu4 = s[4] - 4.0 * mean * s[3] + 6.0 * mean * mean * s[2] - 3.0 * mean.powi(4);
        let unbias = n / (n - 1.0);
        let q_mean = s[7] - s[5] * s[5] - s[6] * s[6];
        let q_var = (s[8] - s[7] * s[7]).max(0.0);
        Some(BinMoments {
            u: mean,
            tx: unbias * var / r,
            tn: unbias * q_mean / (2.0 * r),
            u_se: (var / n).sqrt(),
            tx_se: ((mu4 - var * var).max(0.0) / n).sqrt() / r,
            tn_se: (q_var / n).sqrt() / (2.0 * r),
        })
    }
}

/// Ensemble profile of replicas that have all reached the same time.
pub fn sample_profile(replicas: &[ParticleEnsemble], grid: &BinGrid, gm: &GasModel) -> Result<Profile> {
    let first = replicas
        .first()
        .ok_or_else(|| Error::Precondition("no replicas to sample".into()))?;
    let time = first.time;
    if replicas
        .iter()
        .any(|e| (e.time - time).abs() > 1e-9 * time.abs().max(f64::MIN_POSITIVE))
    {
        return Err(Error::Precondition("replicas are at different times".into()));
    }
    let mut total = vec![Tally::default(); grid.len()];
    for e in replicas {
        for (a, b) in total.iter_mut().zip(grid.tally(e)) {
            a.merge(&b);
        }
    }
    grid.profile(
        &total,
        replicas.len(),
        first.weight,
        gm,
        time / grid.scales.collision_time,
    )
}
