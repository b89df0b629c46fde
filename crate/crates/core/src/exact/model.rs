//! Finite random-cluster models: an edge set, the connectivity its boundary
//! condition induces between the touched vertices, and optional labels.

use std::collections::{BTreeMap, HashMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{mu, BoxGeometry, Edge, Vertex};
use crate::union_find::UnionFind;

pub const DEFAULT_CAP: usize = 24;

/// Boundary condition on the edges outside the model. Only the partition of
/// the touched vertices into classes joined off the model matters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Boundary {
    /// Every outside edge closed.
    Free,
    /// Every outside edge open.
    Wired,
    /// The Dobrushin condition.
    Dobrushin,
    /// Explicit classes of vertices joined off the model; unlisted vertices
    /// are joined to nothing.
    Classes(Vec<Vec<[i32; 3]>>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Label {
    pub vertex: [i32; 3],
    pub label: u32,
}

/// Serialized form of a [`FiniteModel`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub p: f64,
    pub q: f64,
    pub edges: Vec<[[i32; 3]; 2]>,
    pub boundary: Boundary,
    #[serde(default)]
    pub labels: Vec<Label>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cap: Option<usize>,
}

#[derive(Clone, Debug)]
pub struct FiniteModel {
    edges: Vec<Edge>,
    vertices: Vec<Vertex>,
    boundary: Boundary,
    labels: Vec<Label>,
    /// Class of each endpoint, per edge.
    ends: Vec<(u8, u8)>,
    n_classes: usize,
    class_label: Vec<Option<u32>>,
    pub p: f64,
    pub q: f64,
    pub cap: usize,
}

impl FiniteModel {
    pub fn new(
        edges: Vec<Edge>,
        boundary: Boundary,
        labels: Vec<Label>,
        p: f64,
        q: f64,
    ) -> Result<FiniteModel> {
        if !(0.0..=1.0).contains(&p) || q.is_nan() || q <= 0.0 {
            return Err(Error::InvalidModel(format!("parameters p={p}, q={q}")));
        }
        let mut seen = HashSet::new();
        for e in &edges {
            if !seen.insert(*e) {
                return Err(Error::InvalidModel(format!("duplicate edge {e:?}")));
            }
        }
        let mut vertices: Vec<Vertex> = edges.iter().flat_map(|e| [e.a, e.b()]).collect();
        vertices.sort();
        vertices.dedup();
        if vertices.len() > 255 {
            return Err(Error::InvalidModel("more than 255 vertices".into()));
        }
        let class_of = vertex_classes(&edges, &vertices, &boundary)?;
        let n_classes = class_of.iter().map(|&c| c + 1).max().unwrap_or(0);
        let vindex: HashMap<Vertex, usize> =
            vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
        let ends = edges
            .iter()
            .map(|e| {
                (
                    class_of[vindex[&e.a]] as u8,
                    class_of[vindex[&e.b()]] as u8,
                )
            })
            .collect();
        let mut class_label = vec![None; n_classes];
        for l in &labels {
            let Some(&i) = vindex.get(&Vertex(l.vertex)) else {
                return Err(Error::InvalidModel(format!(
                    "labelled vertex {:?} is not touched by the model",
                    l.vertex
                )));
            };
            let c = class_of[i];
            match class_label[c] {
                Some(old) if old != l.label => {
                    return Err(Error::InvalidModel(format!(
                        "vertex {:?} is joined off the model to a differently labelled vertex",
                        l.vertex
                    )))
                }
                _ => class_label[c] = Some(l.label),
            }
        }
        Ok(FiniteModel {
            edges,
            vertices,
            boundary,
            labels,
            ends,
            n_classes,
            class_label,
            p,
            q,
            cap: DEFAULT_CAP,
        })
    }

    pub fn free(edges: Vec<Edge>, p: f64, q: f64) -> Result<FiniteModel> {
        Self::new(edges, Boundary::Free, Vec::new(), p, q)
    }

    pub fn wired(edges: Vec<Edge>, p: f64, q: f64) -> Result<FiniteModel> {
        Self::new(edges, Boundary::Wired, Vec::new(), p, q)
    }

    /// The box model `E_{L,M}` with the Dobrushin condition; the upper and
    /// lower outside clusters carry labels 0 and 1.
    pub fn dobrushin_box(geom: &BoxGeometry, p: f64, q: f64) -> Result<FiniteModel> {
        let m = geom.m();
        let labels = vec![
            Label {
                vertex: [0, 0, m + 1],
                label: 0,
            },
            Label {
                vertex: [0, 0, -m - 1],
                label: 1,
            },
        ];
        Self::new(geom.edges().to_vec(), Boundary::Dobrushin, labels, p, q)
    }

    pub fn with_params(&self, p: f64, q: f64) -> FiniteModel {
        FiniteModel {
            p,
            q,
            ..self.clone()
        }
    }

    pub fn with_cap(mut self, cap: usize) -> FiniteModel {
        self.cap = cap;
        self
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    pub fn num_classes(&self) -> usize {
        self.n_classes
    }

    pub fn has_labels(&self) -> bool {
        self.class_label.iter().any(|l| l.is_some())
    }

    pub(crate) fn ends(&self) -> &[(u8, u8)] {
        &self.ends
    }

    pub(crate) fn class_labels(&self) -> &[Option<u32>] {
        &self.class_label
    }

    pub fn check_cap(&self) -> Result<()> {
        if self.edges.len() > self.cap || self.edges.len() > 40 {
            return Err(Error::CapExceeded {
                edges: self.edges.len(),
                cap: self.cap.min(40),
            });
        }
        Ok(())
    }

    /// `k_G(ω)` for the configuration whose open edges are the set bits of
    /// `mask` (bit `i` is edge `i`).
    pub fn cluster_count(&self, mask: u64) -> usize {
        let mut uf = UnionFind::new(self.n_classes);
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a as usize, b as usize);
            }
        }
        uf.count()
    }

    /// Whether no open path joins differently labelled classes.
    pub fn admissible(&self, mask: u64) -> bool {
        let mut uf = UnionFind::new(self.n_classes);
        for (i, &(a, b)) in self.ends.iter().enumerate() {
            if mask >> i & 1 == 1 {
                uf.union(a as usize, b as usize);
            }
        }
        labels_consistent(&mut uf, &self.class_label)
    }

    /// `k_G(ζ¹)`: clusters when every model edge is open.
    pub fn all_open_cluster_count(&self) -> usize {
        let mut uf = UnionFind::new(self.n_classes);
        for &(a, b) in &self.ends {
            uf.union(a as usize, b as usize);
        }
        uf.count()
    }

    pub fn index_of(&self, e: &Edge) -> Option<usize> {
        self.edges.iter().position(|f| f == e)
    }

    pub fn to_document(&self) -> ModelDocument {
        ModelDocument {
            p: self.p,
            q: self.q,
            edges: self.edges.iter().map(|e| [e.a.0, e.b().0]).collect(),
            boundary: self.boundary.clone(),
            labels: self.labels.clone(),
            cap: (self.cap != DEFAULT_CAP).then_some(self.cap),
        }
    }

    pub fn from_document(doc: &ModelDocument) -> Result<FiniteModel> {
        let edges = doc
            .edges
            .iter()
            .map(|[a, b]| {
                Edge::between(Vertex(*a), Vertex(*b)).ok_or_else(|| {
                    Error::InvalidModel(format!("{a:?} and {b:?} are not neighbours"))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        let m = Self::new(edges, doc.boundary.clone(), doc.labels.clone(), doc.p, doc.q)?;
        Ok(match doc.cap {
            Some(c) => m.with_cap(c),
            None => m,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_document())?)
    }

    pub fn from_json(s: &str) -> Result<FiniteModel> {
        Self::from_document(&serde_json::from_str(s)?)
    }
}

pub(crate) fn labels_consistent(uf: &mut UnionFind, labels: &[Option<u32>]) -> bool {
    let mut root_label: BTreeMap<usize, u32> = BTreeMap::new();
    for (c, l) in labels.iter().enumerate() {
        if let Some(l) = l {
            let r = uf.find(c);
            if let Some(&old) = root_label.get(&r) {
                if old != *l {
                    return false;
                }
            } else {
                root_label.insert(r, *l);
            }
        }
    }
    true
}

/// Class index of each touched vertex under the boundary condition.
///
/// For the lattice conditions the off-model edges are unioned inside a window
/// two units larger than the touched vertices; window-boundary vertices are
/// then attached to the infinite open clusters of the condition, which for
/// the wired and Dobrushin conditions reach every far-away vertex (one
/// cluster, respectively one above and one below height 1).
fn vertex_classes(edges: &[Edge], vertices: &[Vertex], boundary: &Boundary) -> Result<Vec<usize>> {
    let n = vertices.len();
    let vindex: HashMap<Vertex, usize> =
        vertices.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut uf;
    match boundary {
        Boundary::Free => uf = UnionFind::new(n),
        Boundary::Classes(classes) => {
            uf = UnionFind::new(n);
            for class in classes {
                let mut first = None;
                for v in class {
                    let Some(&i) = vindex.get(&Vertex(*v)) else {
                        return Err(Error::InvalidModel(format!(
                            "boundary class vertex {v:?} is not touched by the model"
                        )));
                    };
                    if let Some(f) = first {
                        uf.union(f, i);
                    } else {
                        first = Some(i);
                    }
                }
            }
        }
        Boundary::Wired | Boundary::Dobrushin => {
            let wired = *boundary == Boundary::Wired;
            let model: HashSet<Edge> = edges.iter().copied().collect();
            let mut lo = [i32::MAX; 3];
            let mut hi = [i32::MIN; 3];
            for v in vertices {
                for i in 0..3 {
                    lo[i] = lo[i].min(v.0[i] - 2);
                    hi[i] = hi[i].max(v.0[i] + 2);
                }
            }
            let inside = |v: &Vertex| (0..3).all(|i| v.0[i] >= lo[i] && v.0[i] <= hi[i]);
            let on_edge = |v: &Vertex| (0..3).any(|i| v.0[i] == lo[i] || v.0[i] == hi[i]);
            let dims = [0, 1, 2].map(|i| (hi[i] - lo[i] + 1) as usize);
            let idx = |v: &Vertex| {
                ((v.0[2] - lo[2]) as usize * dims[1] + (v.0[1] - lo[1]) as usize) * dims[0]
                    + (v.0[0] - lo[0]) as usize
            };
            let total = dims[0] * dims[1] * dims[2];
            let (upper, lower) = (total, total + 1);
            let mut w = UnionFind::new(total + 2);
            for z in lo[2]..=hi[2] {
                for y in lo[1]..=hi[1] {
                    for x in lo[0]..=hi[0] {
                        let v = Vertex::new(x, y, z);
                        if on_edge(&v) {
                            let shell = if wired || z >= 1 { upper } else { lower };
                            w.union(idx(&v), shell);
                        }
                        for (u, e) in v.neighbours() {
                            if u > v
                                && inside(&u)
                                && !model.contains(&e)
                                && (wired || mu(&e))
                            {
                                w.union(idx(&v), idx(&u));
                            }
                        }
                    }
                }
            }
            uf = UnionFind::new(n);
            let mut rep: HashMap<usize, usize> = HashMap::new();
            for (i, v) in vertices.iter().enumerate() {
                let r = w.find(idx(v));
                match rep.get(&r) {
                    Some(&j) => {
                        uf.union(i, j);
                    }
                    None => {
                        rep.insert(r, i);
                    }
                }
            }
        }
    }
    let mut ids: HashMap<usize, usize> = HashMap::new();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let r = uf.find(i);
        let next = ids.len();
        out.push(*ids.entry(r).or_insert(next));
    }
    Ok(out)
}
