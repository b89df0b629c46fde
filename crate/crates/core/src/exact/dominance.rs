//! Stochastic domination between two measures on `{0,1}^E`, certified by a
//! monotone coupling found as a maximum flow.
//!
//! Mass of the lower measure enters at each configuration, may move upward
//! along single-edge openings (which generate the partial order), and must
//! leave through the upper measure's mass. A coupling with `ω1 ≤ ω2` exists
//! exactly when the flow saturates the source.

use std::collections::VecDeque;

use rand::Rng;

use super::enumerate::measure;
use super::model::FiniteModel;
use crate::error::{Error, Result};

pub const DOMINANCE_CAP: usize = 12;
const FLOW_SLACK: f64 = 1e-9;
const EPS: f64 = 1e-15;

struct FlowGraph {
    head: Vec<usize>,
    to: Vec<usize>,
    cap: Vec<f64>,
    next: Vec<usize>,
}

impl FlowGraph {
    fn new(n: usize) -> Self {
        FlowGraph {
            head: vec![usize::MAX; n],
            to: Vec::new(),
            cap: Vec::new(),
            next: Vec::new(),
        }
    }

    fn add(&mut self, u: usize, v: usize, c: f64) {
        for (a, b, c) in [(u, v, c), (v, u, 0.0)] {
            self.to.push(b);
            self.cap.push(c);
            self.next.push(self.head[a]);
            self.head[a] = self.to.len() - 1;
        }
    }

    fn levels(&self, s: usize) -> Vec<u32> {
        let mut level = vec![u32::MAX; self.head.len()];
        level[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            let mut a = self.head[u];
            while a != usize::MAX {
                let v = self.to[a];
                if self.cap[a] > EPS && level[v] == u32::MAX {
                    level[v] = level[u] + 1;
                    queue.push_back(v);
                }
                a = self.next[a];
            }
        }
        level
    }

    fn augment(&mut self, u: usize, t: usize, f: f64, level: &[u32], it: &mut [usize]) -> f64 {
        if u == t {
            return f;
        }
        while it[u] != usize::MAX {
            let a = it[u];
            let v = self.to[a];
            if self.cap[a] > EPS && level[v] == level[u] + 1 {
                let d = self.augment(v, t, f.min(self.cap[a]), level, it);
                if d > EPS {
                    self.cap[a] -= d;
                    self.cap[a ^ 1] += d;
                    return d;
                }
            }
            it[u] = self.next[a];
        }
        0.0
    }

    fn max_flow(&mut self, s: usize, t: usize) -> f64 {
        let mut total = 0.0;
        loop {
            let level = self.levels(s);
            if level[t] == u32::MAX {
                return total;
            }
            let mut it = self.head.clone();
            loop {
                let f = self.augment(s, t, f64::INFINITY, &level, &mut it);
                if f <= EPS {
                    break;
                }
                total += f;
            }
        }
    }
}

/// Maximum mass of `lower` that can be transported upward onto `upper`.
pub fn coupling_mass(lower: &[f64], upper: &[f64], n_edges: usize) -> f64 {
    let n = 1usize << n_edges;
    let (s, t) = (n, n + 1);
    let mut g = FlowGraph::new(n + 2);
    for w in 0..n {
        if lower[w] > 0.0 {
            g.add(s, w, lower[w]);
        }
        if upper[w] > 0.0 {
            g.add(w, t, upper[w]);
        }
        for e in 0..n_edges {
            if w >> e & 1 == 0 {
                g.add(w, w | 1 << e, f64::INFINITY);
            }
        }
    }
    g.max_flow(s, t)
}

/// Whether the measure of `lower` is stochastically dominated by that of
/// `upper` (both unconditioned, same edges and boundary).
pub fn check_dominance(lower: &FiniteModel, upper: &FiniteModel) -> Result<bool> {
    if lower.edges() != upper.edges() || lower.boundary() != upper.boundary() {
        return Err(Error::InvalidModel(
            "dominance requires the same edges and boundary condition".into(),
        ));
    }
    if lower.num_edges() > DOMINANCE_CAP {
        return Err(Error::CapExceeded {
            edges: lower.num_edges(),
            cap: DOMINANCE_CAP,
        });
    }
    let a = measure(lower, false)?;
    let b = measure(upper, false)?;
    Ok(coupling_mass(&a.probs, &b.probs, lower.num_edges()) >= 1.0 - FLOW_SLACK)
}

/// A random increasing function `Σ c_i 1[ω ≥ m_i]` with positive `c_i`.
pub fn random_increasing(n_edges: usize, rng: &mut impl Rng) -> Vec<(u64, f64)> {
    let terms = rng.random_range(1..=4);
    (0..terms)
        .map(|_| {
            let mut m = 0u64;
            for e in 0..n_edges {
                if rng.random_bool(0.3) {
                    m |= 1 << e;
                }
            }
            (m, rng.random_range(0.1..1.0))
        })
        .collect()
}

pub fn eval_increasing(f: &[(u64, f64)], w: u64) -> f64 {
    f.iter()
        .filter(|(m, _)| w & m == *m)
        .map(|(_, c)| c)
        .sum()
}
