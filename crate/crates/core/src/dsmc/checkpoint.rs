//! Binary snapshot of a replica, restorable bit for bit.
//!
//! Layout: the 8-byte magic, then little-endian fields in declaration order.
//! Vectors are prefixed by their length as `u64`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::ParticleEnsemble;
use crate::error::{Error, Result};
use crate::gas::GasState;

const MAGIC: &[u8; 8] = b"KFDSMC01";

struct Writer(Vec<u8>);

impl Writer {
    fn f64(&mut self, v: f64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn u64(&mut self, v: u64) {
        self.0.extend_from_slice(&v.to_le_bytes());
    }
    fn f64s(&mut self, v: &[f64]) {
        self.u64(v.len() as u64);
        v.iter().for_each(|&x| self.f64(x));
    }
    fn state(&mut self, s: &GasState) {
        self.f64(s.rho);
        self.f64(s.u);
        self.f64(s.temperature);
    }
}

struct Reader<'a> {
    buf: &'a [u8],
    pos: usize,
}

impl Reader<'_> {
    fn take<const N: usize>(&mut self) -> Result<[u8; N]> {
        let end = self.pos + N;
        let bytes = self
            .buf
            .get(self.pos..end)
            .ok_or_else(|| Error::Checkpoint(format!("truncated at byte {}", self.pos)))?;
        self.pos = end;
        Ok(bytes.try_into().expect("slice length"))
    }
    fn f64(&mut self) -> Result<f64> {
        Ok(f64::from_le_bytes(self.take()?))
    }
    fn u64(&mut self) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take()?))
    }
    fn len(&mut self, item: usize) -> Result<usize> {
        let n = self.u64()? as usize;
        if n.saturating_mul(item) > self.buf.len() - self.pos {
            return Err(Error::Checkpoint(format!("length {n} exceeds remaining data")));
        }
        Ok(n)
    }
    fn f64s(&mut self) -> Result<Vec<f64>> {
        let n = self.len(8)?;
        (0..n).map(|_| self.f64()).collect()
    }
    fn state(&mut self) -> Result<GasState> {
        let (rho, u, t) = (self.f64()?, self.f64()?, self.f64()?);
        GasState::new(rho, u, t).map_err(|e| Error::Checkpoint(format!("reservoir state: {e}")))
    }
}

impl ParticleEnsemble {
    pub fn to_checkpoint(&self) -> Vec<u8> {
        let mut w = Writer(Vec::with_capacity(64 + 32 * self.x.len()));
        w.0.extend_from_slice(MAGIC);
        w.0.extend_from_slice(&self.rng.get_seed());
        w.u64(self.rng.get_stream());
        w.0.extend_from_slice(&self.rng.get_word_pos().to_le_bytes());
        w.f64(self.weight);
        w.f64(self.x_min);
        w.f64(self.x_max);
        w.u64(self.n_cells as u64);
        w.f64(self.time);
        w.state(&self.left_reservoir);
        w.state(&self.right_reservoir);
        w.u64(self.collisions);
        w.f64(self.inject_carry[0]);
        w.f64(self.inject_carry[1]);
        w.f64s(&self.sigma_cr_max);
        w.f64s(&self.pair_remainder);
        w.f64s(&self.x);
        w.u64(self.v.len() as u64);
        for v in &self.v {
            v.iter().for_each(|&c| w.f64(c));
        }
        w.0
    }

    pub fn from_checkpoint(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader { buf: bytes, pos: 0 };
        if &r.take::<8>()? != MAGIC {
            return Err(Error::Checkpoint("unrecognised header".into()));
        }
        let seed: [u8; 32] = r.take()?;
        let stream = r.u64()?;
        let word_pos = u128::from_le_bytes(r.take()?);
        let mut rng = ChaCha8Rng::from_seed(seed);
        rng.set_stream(stream);
        rng.set_word_pos(word_pos);
        let weight = r.f64()?;
        let x_min = r.f64()?;
        let x_max = r.f64()?;
        let n_cells = r.u64()? as usize;
        let time = r.f64()?;
        let left_reservoir = r.state()?;
        let right_reservoir = r.state()?;
        let collisions = r.u64()?;
        let inject_carry = [r.f64()?, r.f64()?];
        let sigma_cr_max = r.f64s()?;
        let pair_remainder = r.f64s()?;
        let x = r.f64s()?;
        let nv = r.len(24)?;
        let v = (0..nv)
            .map(|_| Ok([r.f64()?, r.f64()?, r.f64()?]))
            .collect::<Result<Vec<_>>>()?;
        if r.pos != bytes.len() {
            return Err(Error::Checkpoint(format!("{} trailing bytes", bytes.len() - r.pos)));
        }
        if n_cells == 0 || sigma_cr_max.len() != n_cells || pair_remainder.len() != n_cells {
            return Err(Error::Checkpoint("cell arrays do not match the cell count".into()));
        }
        if x.len() != v.len() {
            return Err(Error::Checkpoint("position and velocity counts differ".into()));
        }
        if !(weight > 0.0) || !(x_max > x_min) {
            return Err(Error::Checkpoint("invalid weight or domain".into()));
        }
        let mut ens = ParticleEnsemble {
            x,
            v,
            weight,
            x_min,
            x_max,
            n_cells,
            time,
            left_reservoir,
            right_reservoir,
            collisions,
            rng,
            sigma_cr_max,
            pair_remainder,
            inject_carry,
            cell_start: Vec::new(),
        };
        if ens.x.iter().any(|&x| !(x >= x_min && x < x_max)) {
            return Err(Error::Checkpoint("particle outside the domain".into()));
        }
        super::sort_into_cells(&mut ens);
        Ok(ens)
    }
}
