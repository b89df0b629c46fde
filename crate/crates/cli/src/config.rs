//! Experiment specifications, read from a single JSON document.

use std::path::Path;

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Rigidity,
    Displacement,
    WallStats,
    Verify,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Rigidity => "rigidity",
            Kind::Displacement => "displacement",
            Kind::WallStats => "wall-stats",
            Kind::Verify => "verify",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SamplerSettings {
    pub burn_in: u64,
    /// Sweeps between recorded samples.
    pub interval: u64,
    /// Samples per replica.
    pub samples: u64,
    /// Independent chains per parameter point.
    pub replicas: u64,
}

impl Default for SamplerSettings {
    fn default() -> Self {
        SamplerSettings {
            burn_in: 500,
            interval: 1,
            samples: 10_000,
            replicas: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    pub kind: Kind,
    pub p: Vec<f64>,
    pub q: Vec<f64>,
    pub l: Vec<i64>,
    /// Box heights as multiples of `L`.
    pub m_factors: Vec<i64>,
    pub sampler: SamplerSettings,
    /// Largest displacement tabulated.
    pub d_max: i32,
    /// Points of a tail or histogram with fewer expected events are left
    /// out of the fitted slope.
    pub min_fit_events: f64,
    pub seed: u64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec::defaults(Kind::Rigidity)
    }
}

impl ExperimentSpec {
    pub fn defaults(kind: Kind) -> Self {
        let p = match kind {
            Kind::Rigidity => vec![0.5, 0.8, 0.9, 0.95, 0.98],
            Kind::Displacement => vec![0.9, 0.95, 0.98],
            Kind::WallStats => vec![0.9, 0.95, 0.98],
            Kind::Verify => Vec::new(),
        };
        ExperimentSpec {
            kind,
            p,
            q: vec![1.0],
            l: vec![8],
            m_factors: vec![1, 2],
            sampler: SamplerSettings::default(),
            d_max: 6,
            min_fit_events: 10.0,
            seed: 1,
        }
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let spec: ExperimentSpec = serde_json::from_str(s).context("parsing experiment config")?;
        spec.validate()?;
        Ok(spec)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let s = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&s)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("spec serializes")
    }

    pub fn validate(&self) -> Result<()> {
        if self.kind == Kind::Verify {
            return Ok(());
        }
        if self.p.is_empty() || self.q.is_empty() || self.l.is_empty() || self.m_factors.is_empty() {
            bail!("empty parameter grid");
        }
        for &p in &self.p {
            if !(p > 0.0 && p < 1.0) {
                bail!("p = {p} outside (0, 1)");
            }
        }
        for &q in &self.q {
            if !(q >= 1.0) {
                bail!("q = {q} below 1");
            }
        }
        for &l in &self.l {
            if l < 1 {
                bail!("L = {l} below 1");
            }
        }
        for &f in &self.m_factors {
            if f < 1 {
                bail!("M must be at least L (factor {f})");
            }
        }
        if self.sampler.samples == 0 || self.sampler.replicas == 0 {
            bail!("no samples requested");
        }
        if self.d_max < 1 {
            bail!("d_max = {} below 1", self.d_max);
        }
        Ok(())
    }

    /// Parameter points `(p, q, L, M)` in sorted order.
    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::new();
        for &p in &self.p {
            for &q in &self.q {
                for &l in &self.l {
                    for &f in &self.m_factors {
                        out.push(Point { p, q, l, m: f * l });
                    }
                }
            }
        }
        out.sort_by(|a, b| a.key().partial_cmp(&b.key()).unwrap());
        out.dedup();
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Point {
    pub p: f64,
    pub q: f64,
    pub l: i64,
    pub m: i64,
}

impl Point {
    pub fn key(&self) -> (f64, f64, i64, i64) {
        (self.p, self.q, self.l, self.m)
    }

    /// Chain seed derived from the base seed, the point and the replica, so
    /// that results do not depend on grid order or scheduling.
    pub fn seed(&self, base: u64, replica: u64) -> u64 {
        let mut h = base ^ 0x9e37_79b9_7f4a_7c15;
        for w in [self.p.to_bits(), self.q.to_bits(), self.l as u64, self.m as u64, replica] {
            h = splitmix(h ^ w);
        }
        h
    }
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
