//! Exact checks of the interface probability formula and its decomposition
//! into per-edge f-terms, on boxes small enough to enumerate.

use std::collections::{HashMap, HashSet};
use std::sync::Arc;

use super::enumerate::{g_all, partition_function, Enumeration};
use super::model::{Boundary, FiniteModel};
use crate::error::{Error, Result};
use crate::interface::Interface;
use crate::lattice::{Axis, BoxGeometry, Edge, EdgeConfiguration, Vertex};

/// Largest box (in edges) whose configurations are enumerated one by one.
pub const BOX_ENUMERATION_CAP: usize = 20;

#[derive(Clone, Debug)]
pub struct InterfaceProbability {
    /// Probability of the interface, summed over all box configurations
    /// whose extracted interface it is.
    pub enumerated: f64,
    /// The closed form: wired partition function of the free edges times
    /// the forced-edge weights and `q^(K-1)`, over the box partition function.
    pub formula: f64,
    /// Probability of the conditioning event (no crossing).
    pub no_crossing: f64,
    pub k_delta: usize,
    /// Box plaquettes in the interface.
    pub closed: usize,
    /// Box plaquettes in the extended interface but not the interface.
    pub fringe: usize,
    /// Box edges off the extended interface.
    pub free: usize,
}

impl InterfaceProbability {
    pub fn relative_error(&self) -> f64 {
        (self.enumerated - self.formula).abs() / self.formula
    }
}

/// Weights of every configuration of a small box, grouped by interface.
#[derive(Clone, Debug)]
pub struct BoxInterfaces {
    pub p: f64,
    pub q: f64,
    /// Box partition function.
    pub z: f64,
    /// Total weight of configurations without a crossing.
    pub no_crossing: f64,
    /// Weight per interface, keyed by the sorted box edges dual to it.
    pub weights: HashMap<Vec<usize>, f64>,
}

impl BoxInterfaces {
    pub fn new(geom: &Arc<BoxGeometry>, p: f64, q: f64) -> Result<BoxInterfaces> {
        let n = geom.num_edges();
        if n > BOX_ENUMERATION_CAP {
            return Err(Error::CapExceeded {
                edges: n,
                cap: BOX_ENUMERATION_CAP,
            });
        }
        let mut out = BoxInterfaces {
            p,
            q,
            z: 0.0,
            no_crossing: 0.0,
            weights: HashMap::new(),
        };
        for mask in 0u64..(1 << n) {
            let omega = EdgeConfiguration::from_words(geom, vec![mask])?;
            let open = mask.count_ones() as i32;
            let w = p.powi(open)
                * (1.0 - p).powi(n as i32 - open)
                * q.powi(omega.cluster_count() as i32);
            out.z += w;
            if let Ok(d) = Interface::extract(&omega) {
                out.no_crossing += w;
                *out.weights.entry(d.box_edges()).or_insert(0.0) += w;
            }
        }
        Ok(out)
    }

    /// Probability that the extracted interface is `delta`.
    pub fn probability(&self, delta: &Interface) -> f64 {
        self.weights.get(&delta.box_edges()).copied().unwrap_or(0.0) / self.z
    }
}

/// Wired partition function on the given edges. The wired boundary is
/// itself one cluster, so an empty edge set has partition function `q`.
fn wired_z(edges: Vec<Edge>, p: f64, q: f64) -> Result<f64> {
    if edges.is_empty() {
        return Ok(q);
    }
    partition_function(&FiniteModel::wired(edges, p, q)?)
}

pub fn interface_probability_check(delta: &Interface, p: f64, q: f64) -> Result<InterfaceProbability> {
    let all = BoxInterfaces::new(delta.geometry(), p, q)?;
    interface_probability_with(&all, delta)
}

/// As [`interface_probability_check`], reusing one enumeration of the box.
pub fn interface_probability_with(all: &BoxInterfaces, delta: &Interface) -> Result<InterfaceProbability> {
    let geom = delta.geometry();
    let (p, q) = (all.p, all.q);
    let free: Vec<Edge> = delta.free_edges().iter().map(|&i| geom.edge(i)).collect();
    let closed = delta.box_edges().len();
    let fringe = delta.fringe_edges().len();
    let k_delta = delta.k_delta();
    let z1 = wired_z(free.clone(), p, q)?;
    let formula = z1
        * p.powi(fringe as i32)
        * (1.0 - p).powi(closed as i32)
        * q.powi(k_delta as i32 - 1)
        / all.z;
    Ok(InterfaceProbability {
        enumerated: all.probability(delta),
        formula,
        no_crossing: all.no_crossing / all.z,
        k_delta,
        closed,
        fringe,
        free: free.len(),
    })
}

/// Among `targets`, the edge nearest to `f` in sup norm of centres, ties
/// broken by the lexicographically smallest centre.
pub fn nu(f: &Edge, targets: &[Edge]) -> Option<Edge> {
    let c = f.centre2();
    targets.iter().copied().min_by_key(|t| {
        let d = t.centre2();
        let dist = (0..3).map(|i| (d[i] - c[i]).abs()).max().unwrap();
        (dist, d)
    })
}

#[derive(Clone, Debug)]
pub struct FDecomposition {
    /// `f(e)` for each box edge dual to the interface.
    pub terms: Vec<(Edge, f64)>,
    pub sum: f64,
    /// `log(Z¹(free edges) / Z¹(box))`.
    pub log_ratio: f64,
}

impl FDecomposition {
    pub fn residual(&self) -> f64 {
        (self.sum - self.log_ratio).abs()
    }
}

/// Splits `log(Z¹(W) / Z¹(E))` into per-edge terms: every box edge `f` is
/// charged to its nearest interface edge, contributing the change of its
/// wired g-function if it is free and minus its box g-function otherwise.
pub fn compute_f(delta: &Interface, p: f64, q: f64) -> Result<FDecomposition> {
    let geom = delta.geometry();
    let all: Vec<Edge> = geom.edges().to_vec();
    let free_idx: HashSet<usize> = delta.free_edges().into_iter().collect();
    let free: Vec<Edge> = (0..all.len()).filter(|i| free_idx.contains(i)).map(|i| all[i]).collect();
    let targets: Vec<Edge> = delta.box_edges().iter().map(|&i| all[i]).collect();

    let box_model = FiniteModel::wired(all.clone(), p, q)?;
    let g_box = g_all(&box_model)?;
    let g_free = if free.is_empty() {
        Vec::new()
    } else {
        g_all(&FiniteModel::wired(free.clone(), p, q)?)?
    };
    let mut terms: Vec<(Edge, f64)> = targets.iter().map(|e| (*e, 0.0)).collect();
    let mut fi = 0;
    for (i, f) in all.iter().enumerate() {
        let e = nu(f, &targets).expect("interface meets the box");
        let slot = targets.iter().position(|t| *t == e).unwrap();
        if free_idx.contains(&i) {
            terms[slot].1 += g_free[fi] - g_box[i];
            fi += 1;
        } else {
            terms[slot].1 -= g_box[i];
        }
    }
    let sum = terms.iter().map(|t| t.1).sum();
    let log_ratio = wired_z(free, p, q)?.ln() - partition_function(&box_model)?.ln();
    Ok(FDecomposition {
        terms,
        sum,
        log_ratio,
    })
}

/// Edges of `edges` whose centres lie within sup distance `n` of the centre
/// of `e`.
pub fn local_edges(e: &Edge, edges: &[Edge], n: i32) -> Vec<Edge> {
    let c = e.centre2();
    edges
        .iter()
        .copied()
        .filter(|f| {
            let d = f.centre2();
            (0..3).all(|i| (d[i] - c[i]).abs() <= 2 * n)
        })
        .collect()
}

/// For each `n`, the difference between the g-function of `e` in the full
/// edge set and in its restriction to the sup-ball of radius `n` around `e`.
/// The two models agree on that ball.
pub fn g_locality_table(
    e: &Edge,
    edges: &[Edge],
    boundary: Boundary,
    p: f64,
    q: f64,
    schedule: &[i32],
) -> Result<Vec<(i32, f64)>> {
    let g_in = |set: Vec<Edge>| -> Result<f64> {
        let idx = set.iter().position(|f| f == e).ok_or_else(|| {
            Error::InvalidModel("edge is not in the model".into())
        })?;
        let model = FiniteModel::new(set, boundary.clone(), Vec::new(), p, q)?;
        Ok(Enumeration::new(&model)?.g(idx, p, q))
    };
    let full = g_in(edges.to_vec())?;
    schedule
        .iter()
        .map(|&n| Ok((n, (g_in(local_edges(e, edges, n))? - full).abs())))
        .collect()
}

/// Interface of the single-column box `L = 0, M = 1` in which the vertex
/// `(0,0,1)` is cut off from the top and hangs below the interface.
pub fn column_bump_interface() -> Interface {
    let g = BoxGeometry::new(0, 1).expect("valid box");
    let mut omega = EdgeConfiguration::flat(&g);
    for (_, e) in Vertex::new(0, 0, 1).neighbours() {
        omega.set(g.edge_index(&e).expect("column edge"), false);
    }
    omega.set(g.edge_index(&Edge::new(Vertex::new(0, 0, 0), Axis::Z)).expect("column edge"), true);
    Interface::extract(&omega).expect("no crossing")
}
