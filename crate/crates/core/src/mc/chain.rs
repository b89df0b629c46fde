//! Single-bond heat-bath chain for the Dobrushin measure conditioned on the
//! absence of an upper-to-lower crossing.

use std::io::{Read, Write};
use std::path::Path;
use std::sync::Arc;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::connectivity::{reference_status, EdgeStatus, Searcher};
use crate::error::{Error, Result};
use crate::lattice::{BoxGeometry, EdgeConfiguration};

const MAGIC: &[u8; 4] = b"RCIC";
const VERSION: u32 = 1;

/// Which connectivity routine drives the chain. Both must produce identical
/// trajectories.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Connectivity {
    Bidirectional,
    Reference,
}

#[derive(Clone, Debug)]
pub struct Chain {
    geom: Arc<BoxGeometry>,
    omega: EdgeConfiguration,
    p: f64,
    q: f64,
    seed: u64,
    sweeps: u64,
    searcher: Searcher,
    connectivity: Connectivity,
}

/// Uniform on `[0, 1)` from the top 53 bits.
#[inline]
fn unit(x: u64) -> f64 {
    (x >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl Chain {
    pub fn new(
        omega: EdgeConfiguration,
        p: f64,
        q: f64,
        seed: u64,
    ) -> Result<Chain> {
        if !(0.0..=1.0).contains(&p) || q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidModel(format!("parameters p={p}, q={q}")));
        }
        if omega.crossing_exists() {
            return Err(Error::CrossingPresent);
        }
        let geom = omega.geometry().clone();
        Ok(Chain {
            searcher: Searcher::new(&geom),
            geom,
            omega,
            p,
            q,
            seed,
            sweeps: 0,
            connectivity: Connectivity::Bidirectional,
        })
    }

    /// Chain started from the flat interface configuration.
    pub fn from_flat(geom: &Arc<BoxGeometry>, p: f64, q: f64, seed: u64) -> Result<Chain> {
        Self::new(EdgeConfiguration::flat(geom), p, q, seed)
    }

    pub fn with_connectivity(mut self, c: Connectivity) -> Chain {
        self.connectivity = c;
        self
    }

    pub fn state(&self) -> &EdgeConfiguration {
        &self.omega
    }

    pub fn geometry(&self) -> &Arc<BoxGeometry> {
        &self.geom
    }

    pub fn sweeps(&self) -> u64 {
        self.sweeps
    }

    pub fn params(&self) -> (f64, f64) {
        (self.p, self.q)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn status(&mut self, e: usize) -> EdgeStatus {
        match self.connectivity {
            Connectivity::Bidirectional => self.searcher.status(&self.omega, e),
            Connectivity::Reference => reference_status(&self.omega, e),
        }
    }

    /// Conditional probability that edge `e` is open given all other edges.
    pub fn open_probability(&mut self, e: usize) -> f64 {
        match self.status(e) {
            EdgeStatus::Connected => self.p,
            EdgeStatus::Separate { forbidden: true } => 0.0,
            EdgeStatus::Separate { forbidden: false } => {
                self.p / (self.p + (1.0 - self.p) * self.q)
            }
        }
    }

    /// Resamples edge `e` using the uniform variate `u`.
    pub fn heat_bath_step(&mut self, e: usize, u: f64) {
        let open = u < self.open_probability(e);
        self.omega.set(e, open);
    }

    /// One update of every edge in index order. The variates come from a
    /// ChaCha8 stream selected by the sweep number, one word pair per edge,
    /// so the randomness is a function of (seed, sweep, edge).
    pub fn sweep(&mut self) {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.sweeps);
        for e in 0..self.geom.num_edges() {
            let u = unit(rng.next_u64());
            self.heat_bath_step(e, u);
        }
        self.sweeps += 1;
    }

    pub fn run(&mut self, sweeps: u64) {
        for _ in 0..sweeps {
            self.sweep();
        }
    }

    /// Little-endian checkpoint: magic, version, L, M, p, q, seed, sweep
    /// count, edge count, then the configuration packed eight edges per
    /// byte (edge `i` is bit `i % 8` of byte `i / 8`).
    pub fn checkpoint_bytes(&self) -> Vec<u8> {
        let mut out = Vec::new();
        out.extend_from_slice(MAGIC);
        out.extend_from_slice(&VERSION.to_le_bytes());
        out.extend_from_slice(&(self.geom.l() as u32).to_le_bytes());
        out.extend_from_slice(&(self.geom.m() as u32).to_le_bytes());
        out.extend_from_slice(&self.p.to_le_bytes());
        out.extend_from_slice(&self.q.to_le_bytes());
        out.extend_from_slice(&self.seed.to_le_bytes());
        out.extend_from_slice(&self.sweeps.to_le_bytes());
        let n = self.geom.num_edges();
        out.extend_from_slice(&(n as u64).to_le_bytes());
        let mut bytes = vec![0u8; n.div_ceil(8)];
        for i in 0..n {
            if self.omega.get(i) {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        out.extend_from_slice(&bytes);
        out
    }

    pub fn from_checkpoint_bytes(data: &[u8]) -> Result<Chain> {
        let mut r = data;
        let mut take = |n: usize| -> Result<&[u8]> {
            if r.len() < n {
                return Err(Error::Checkpoint("truncated".into()));
            }
            let (a, b) = r.split_at(n);
            r = b;
            Ok(a)
        };
        if take(4)? != MAGIC {
            return Err(Error::Checkpoint("bad magic".into()));
        }
        let u32_at = |b: &[u8]| u32::from_le_bytes(b.try_into().unwrap());
        let u64_at = |b: &[u8]| u64::from_le_bytes(b.try_into().unwrap());
        let version = u32_at(take(4)?);
        if version != VERSION {
            return Err(Error::Checkpoint(format!("unsupported version {version}")));
        }
        let l = u32_at(take(4)?);
        let m = u32_at(take(4)?);
        let p = f64::from_le_bytes(take(8)?.try_into().unwrap());
        let q = f64::from_le_bytes(take(8)?.try_into().unwrap());
        let seed = u64_at(take(8)?);
        let sweeps = u64_at(take(8)?);
        let n = u64_at(take(8)?) as usize;
        let geom = BoxGeometry::new(l as i64, m as i64)?;
        if geom.num_edges() != n {
            return Err(Error::Checkpoint(format!(
                "edge count {n} does not match the box ({})",
                geom.num_edges()
            )));
        }
        let bytes = take(n.div_ceil(8))?;
        let omega = EdgeConfiguration::from_fn(&geom, |i, _| bytes[i / 8] >> (i % 8) & 1 == 1);
        let mut chain = Chain::new(omega, p, q, seed)?;
        chain.sweeps = sweeps;
        Ok(chain)
    }

    pub fn save_checkpoint(&self, path: &Path) -> Result<()> {
        std::fs::File::create(path)?.write_all(&self.checkpoint_bytes())?;
        Ok(())
    }

    pub fn load_checkpoint(path: &Path) -> Result<Chain> {
        let mut data = Vec::new();
        std::fs::File::open(path)?.read_to_end(&mut data)?;
        Self::from_checkpoint_bytes(&data)
    }
}

/// Parameters of a sampling run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerConfig {
    pub l: i64,
    pub m: i64,
    pub p: f64,
    pub q: f64,
    pub seed: u64,
    pub burn_in: u64,
    pub interval: u64,
    pub samples: u64,
}

/// One emitted configuration.
#[derive(Clone, Debug)]
pub struct Sample {
    pub sweep: u64,
    pub omega: EdgeConfiguration,
}

/// Iterator over the configurations emitted after burn-in, one every
/// `interval` sweeps.
pub struct SampleStream {
    chain: Chain,
    config: SamplerConfig,
    emitted: u64,
}

impl Iterator for SampleStream {
    type Item = Sample;

    fn next(&mut self) -> Option<Sample> {
        if self.emitted >= self.config.samples {
            return None;
        }
        let step = if self.emitted == 0 {
            self.config.burn_in + self.config.interval.max(1)
        } else {
            self.config.interval.max(1)
        };
        self.chain.run(step);
        self.emitted += 1;
        Some(Sample {
            sweep: self.chain.sweeps(),
            omega: self.chain.state().clone(),
        })
    }
}

impl SampleStream {
    pub fn chain(&self) -> &Chain {
        &self.chain
    }
}

pub fn sample(config: &SamplerConfig) -> Result<SampleStream> {
    if !(config.p > 0.0 && config.p < 1.0) {
        return Err(Error::InvalidModel(format!("sampling needs 0 < p < 1, got {}", config.p)));
    }
    let geom = BoxGeometry::new(config.l, config.m)?;
    let chain = Chain::from_flat(&geom, config.p, config.q, config.seed)?;
    Ok(SampleStream {
        chain,
        config: config.clone(),
        emitted: 0,
    })
}
