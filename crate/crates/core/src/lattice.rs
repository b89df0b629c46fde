//! The cubic lattice, finite boxes `[-L,L]^2 x [-M,M]`, the Dobrushin boundary
//! condition and edge configurations.
//!
//! Outside the box the boundary condition opens every edge except the vertical
//! edges joining heights 0 and 1. The outside therefore splits into exactly two
//! open clusters, everything with `x3 >= 1` and everything with `x3 <= 0`. Both
//! are contracted to the supernodes [`BoxGeometry::TOP`] and
//! [`BoxGeometry::BOTTOM`], which makes every connectivity question about the
//! infinite configuration a question about a finite graph.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Vertex(pub [i32; 3]);

impl Vertex {
    pub const fn new(x1: i32, x2: i32, x3: i32) -> Self {
        Vertex([x1, x2, x3])
    }

    pub fn x(&self) -> i32 {
        self.0[0]
    }

    pub fn y(&self) -> i32 {
        self.0[1]
    }

    pub fn z(&self) -> i32 {
        self.0[2]
    }

    pub fn offset(&self, axis: Axis, d: i32) -> Vertex {
        let mut v = self.0;
        v[axis.index()] += d;
        Vertex(v)
    }

    /// L1 distance.
    pub fn l1(&self, other: &Vertex) -> i32 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).sum()
    }

    /// L-infinity distance.
    pub fn linf(&self, other: &Vertex) -> i32 {
        (0..3).map(|i| (self.0[i] - other.0[i]).abs()).max().unwrap()
    }

    pub fn neighbours(&self) -> impl Iterator<Item = (Vertex, Edge)> + '_ {
        Axis::ALL.into_iter().flat_map(move |axis| {
            let up = self.offset(axis, 1);
            let down = self.offset(axis, -1);
            [
                (up, Edge { a: *self, axis }),
                (down, Edge { a: down, axis }),
            ]
        })
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{})", self.0[0], self.0[1], self.0[2])
    }
}

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Axis {
        Axis::ALL[i]
    }

    pub fn unit(self) -> [i32; 3] {
        let mut u = [0; 3];
        u[self.index()] = 1;
        u
    }
}

/// A nearest-neighbour edge, stored by its lexicographically smaller endpoint
/// `a` and the axis along which `b = a + e_axis` lies.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Edge {
    pub a: Vertex,
    pub axis: Axis,
}

impl Edge {
    pub fn new(a: Vertex, axis: Axis) -> Self {
        Edge { a, axis }
    }

    /// The edge joining `x` and `y`, or `None` if they are not neighbours.
    pub fn between(x: Vertex, y: Vertex) -> Option<Edge> {
        if x.l1(&y) != 1 {
            return None;
        }
        let (a, b) = if x < y { (x, y) } else { (y, x) };
        let axis = (0..3).find(|&i| a.0[i] != b.0[i]).map(Axis::from_index)?;
        Some(Edge { a, axis })
    }

    pub fn b(&self) -> Vertex {
        self.a.offset(self.axis, 1)
    }

    pub fn endpoints(&self) -> (Vertex, Vertex) {
        (self.a, self.b())
    }

    /// Centre with all coordinates doubled, so that it is integral.
    pub fn centre2(&self) -> [i32; 3] {
        let mut c = [2 * self.a.0[0], 2 * self.a.0[1], 2 * self.a.0[2]];
        c[self.axis.index()] += 1;
        c
    }

    pub fn from_centre2(c: [i32; 3]) -> Option<Edge> {
        let odd: Vec<usize> = (0..3).filter(|&i| c[i].rem_euclid(2) == 1).collect();
        if odd.len() != 1 {
            return None;
        }
        let axis = Axis::from_index(odd[0]);
        let mut a = [c[0].div_euclid(2), c[1].div_euclid(2), c[2].div_euclid(2)];
        a[axis.index()] = (c[axis.index()] - 1) / 2;
        Some(Edge { a: Vertex(a), axis })
    }

    pub fn translate(&self, d: [i32; 3]) -> Edge {
        let a = self.a.0;
        Edge {
            a: Vertex([a[0] + d[0], a[1] + d[1], a[2] + d[2]]),
            axis: self.axis,
        }
    }

    pub fn is_vertical(&self) -> bool {
        self.axis == Axis::Z
    }
}

impl fmt::Debug for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{:?},{:?}>", self.a, self.b())
    }
}

/// Dobrushin boundary condition: closed exactly on the vertical edges joining
/// heights 0 and 1.
pub fn mu(e: &Edge) -> bool {
    !(e.axis == Axis::Z && e.a.z() == 0)
}

#[derive(Clone, Copy, Debug)]
struct AxisBlock {
    lo: [i32; 3],
    dims: [i32; 3],
    offset: usize,
}

impl AxisBlock {
    fn len(&self) -> usize {
        (self.dims[0] * self.dims[1] * self.dims[2]) as usize
    }

    fn index(&self, a: &Vertex) -> Option<usize> {
        let mut r = [0i32; 3];
        for i in 0..3 {
            r[i] = a.0[i] - self.lo[i];
            if r[i] < 0 || r[i] >= self.dims[i] {
                return None;
            }
        }
        Some(self.offset + ((r[2] * self.dims[1] + r[1]) * self.dims[0] + r[0]) as usize)
    }
}

/// Geometry of the box `[-L,L]^2 x [-M,M]` and its edge set `E_{L,M}` (all
/// edges with at least one endpoint in the box).
///
/// Nodes `0..num_vertices()` are the box vertices; the two extra nodes
/// [`TOP`](Self::TOP)-relative indices contract the outside half-spaces.
#[derive(Debug)]
pub struct BoxGeometry {
    l: i32,
    m: i32,
    side: i32,
    height: i32,
    blocks: [AxisBlock; 3],
    edges: Vec<Edge>,
    edge_nodes: Vec<[u32; 2]>,
    adj_start: Vec<u32>,
    adj: Vec<(u32, u32)>,
}

impl BoxGeometry {
    /// Offset of the top supernode relative to `num_vertices()`.
    pub const TOP: usize = 0;
    /// Offset of the bottom supernode relative to `num_vertices()`.
    pub const BOTTOM: usize = 1;

    pub fn new(l: i64, m: i64) -> Result<Arc<BoxGeometry>> {
        if l < 0 || m < 1 || l > 4096 || m > 4096 {
            return Err(Error::InvalidDimensions { l, m });
        }
        let (l, m) = (l as i32, m as i32);
        let side = 2 * l + 1;
        let height = 2 * m + 1;
        let mut offset = 0;
        let mut blocks = [AxisBlock {
            lo: [0; 3],
            dims: [0; 3],
            offset: 0,
        }; 3];
        for axis in Axis::ALL {
            let mut lo = [-l, -l, -m];
            let mut dims = [side, side, height];
            lo[axis.index()] -= 1;
            dims[axis.index()] += 1;
            blocks[axis.index()] = AxisBlock { lo, dims, offset };
            offset += blocks[axis.index()].len();
        }
        let mut edges = Vec::with_capacity(offset);
        for axis in Axis::ALL {
            let b = blocks[axis.index()];
            for z in 0..b.dims[2] {
                for y in 0..b.dims[1] {
                    for x in 0..b.dims[0] {
                        let a = Vertex([b.lo[0] + x, b.lo[1] + y, b.lo[2] + z]);
                        edges.push(Edge { a, axis });
                    }
                }
            }
        }
        let mut geom = BoxGeometry {
            l,
            m,
            side,
            height,
            blocks,
            edges,
            edge_nodes: Vec::new(),
            adj_start: Vec::new(),
            adj: Vec::new(),
        };
        geom.edge_nodes = geom
            .edges
            .iter()
            .map(|e| [geom.node_of(&e.a) as u32, geom.node_of(&e.b()) as u32])
            .collect();
        let n_nodes = geom.num_nodes();
        let mut degree = vec![0u32; n_nodes + 1];
        for [u, v] in &geom.edge_nodes {
            degree[*u as usize] += 1;
            degree[*v as usize] += 1;
        }
        let mut start = vec![0u32; n_nodes + 1];
        for i in 0..n_nodes {
            start[i + 1] = start[i] + degree[i];
        }
        let mut fill = start.clone();
        let mut adj = vec![(0u32, 0u32); start[n_nodes] as usize];
        for (ei, [u, v]) in geom.edge_nodes.iter().enumerate() {
            adj[fill[*u as usize] as usize] = (*v, ei as u32);
            fill[*u as usize] += 1;
            adj[fill[*v as usize] as usize] = (*u, ei as u32);
            fill[*v as usize] += 1;
        }
        geom.adj_start = start;
        geom.adj = adj;
        Ok(Arc::new(geom))
    }

    pub fn l(&self) -> i32 {
        self.l
    }

    pub fn m(&self) -> i32 {
        self.m
    }

    pub fn num_vertices(&self) -> usize {
        (self.side * self.side * self.height) as usize
    }

    /// Box vertices plus the two supernodes.
    pub fn num_nodes(&self) -> usize {
        self.num_vertices() + 2
    }

    pub fn top_node(&self) -> usize {
        self.num_vertices() + Self::TOP
    }

    pub fn bottom_node(&self) -> usize {
        self.num_vertices() + Self::BOTTOM
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge(&self, i: usize) -> Edge {
        self.edges[i]
    }

    pub fn edge_index(&self, e: &Edge) -> Option<usize> {
        self.blocks[e.axis.index()].index(&e.a)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edge_index(e).is_some()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        v.x().abs() <= self.l && v.y().abs() <= self.l && v.z().abs() <= self.m
    }

    pub fn vertex_index(&self, v: &Vertex) -> Option<usize> {
        if !self.contains(v) {
            return None;
        }
        Some(
            (((v.z() + self.m) * self.side + (v.y() + self.l)) * self.side + (v.x() + self.l))
                as usize,
        )
    }

    pub fn vertex(&self, i: usize) -> Vertex {
        let i = i as i32;
        let x = i % self.side;
        let y = (i / self.side) % self.side;
        let z = i / (self.side * self.side);
        Vertex([x - self.l, y - self.l, z - self.m])
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.num_vertices()).map(|i| self.vertex(i))
    }

    /// Node id of any vertex: its box index, or the supernode of its half-space.
    pub fn node_of(&self, v: &Vertex) -> usize {
        match self.vertex_index(v) {
            Some(i) => i,
            None if v.z() >= 1 => self.top_node(),
            None => self.bottom_node(),
        }
    }

    pub fn edge_nodes(&self, i: usize) -> (usize, usize) {
        let [u, v] = self.edge_nodes[i];
        (u as usize, v as usize)
    }

    /// `(neighbour node, edge index)` pairs of a node.
    pub fn incident(&self, node: usize) -> &[(u32, u32)] {
        &self.adj[self.adj_start[node] as usize..self.adj_start[node + 1] as usize]
    }

    /// Returns `(upper, lower)` boundary vertex sets.
    pub fn boundary_partition(&self) -> (Vec<Vertex>, Vec<Vertex>) {
        let mut upper = Vec::new();
        let mut lower = Vec::new();
        let mut seen = std::collections::HashSet::new();
        for e in &self.edges {
            for v in [e.a, e.b()] {
                if !self.contains(&v) && seen.insert(v) {
                    if v.z() > 0 {
                        upper.push(v);
                    } else {
                        lower.push(v);
                    }
                }
            }
        }
        upper.sort();
        lower.sort();
        (upper, lower)
    }
}

/// A configuration on `E_{L,M}`; every edge outside the box takes the value
/// of the Dobrushin boundary condition and is never stored.
#[derive(Clone)]
pub struct EdgeConfiguration {
    geom: Arc<BoxGeometry>,
    words: Vec<u64>,
}

impl PartialEq for EdgeConfiguration {
    fn eq(&self, other: &Self) -> bool {
        self.geom.l == other.geom.l && self.geom.m == other.geom.m && self.words == other.words
    }
}

impl Eq for EdgeConfiguration {}

impl fmt::Debug for EdgeConfiguration {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "EdgeConfiguration(L={}, M={}, open={}/{})",
            self.geom.l,
            self.geom.m,
            self.count_open(),
            self.len()
        )
    }
}

impl EdgeConfiguration {
    pub fn all_closed(geom: &Arc<BoxGeometry>) -> Self {
        EdgeConfiguration {
            geom: geom.clone(),
            words: vec![0; geom.num_edges().div_ceil(64)],
        }
    }

    pub fn all_open(geom: &Arc<BoxGeometry>) -> Self {
        let mut c = Self::all_closed(geom);
        for i in 0..c.len() {
            c.set(i, true);
        }
        c
    }

    /// Everything open except the box verticals from height 0 to 1: the maximal
    /// configuration compatible with the flat interface.
    pub fn flat(geom: &Arc<BoxGeometry>) -> Self {
        let mut c = Self::all_open(geom);
        for (i, e) in geom.edges().iter().enumerate() {
            if !mu(e) {
                c.set(i, false);
            }
        }
        c
    }

    pub fn from_fn(geom: &Arc<BoxGeometry>, mut f: impl FnMut(usize, &Edge) -> bool) -> Self {
        let mut c = Self::all_closed(geom);
        for (i, e) in geom.edges().iter().enumerate() {
            if f(i, e) {
                c.set(i, true);
            }
        }
        c
    }

    pub fn from_words(geom: &Arc<BoxGeometry>, words: Vec<u64>) -> Result<Self> {
        let n = geom.num_edges();
        if words.len() != n.div_ceil(64) {
            return Err(Error::Checkpoint(format!(
                "expected {} words, got {}",
                n.div_ceil(64),
                words.len()
            )));
        }
        if n % 64 != 0 && words[words.len() - 1] >> (n % 64) != 0 {
            return Err(Error::Checkpoint("bits set beyond the edge count".into()));
        }
        Ok(EdgeConfiguration {
            geom: geom.clone(),
            words,
        })
    }

    pub fn geometry(&self) -> &Arc<BoxGeometry> {
        &self.geom
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.geom.num_edges()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        (self.words[i >> 6] >> (i & 63)) & 1 == 1
    }

    #[inline]
    pub fn set(&mut self, i: usize, open: bool) {
        let mask = 1u64 << (i & 63);
        if open {
            self.words[i >> 6] |= mask;
        } else {
            self.words[i >> 6] &= !mask;
        }
    }

    /// State of any edge of the lattice.
    pub fn value(&self, e: &Edge) -> bool {
        match self.geom.edge_index(e) {
            Some(i) => self.get(i),
            None => mu(e),
        }
    }

    pub fn count_open(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Edgewise `self <= other`.
    pub fn le(&self, other: &EdgeConfiguration) -> bool {
        self.words
            .iter()
            .zip(&other.words)
            .all(|(a, b)| a & !b == 0)
    }

    /// Union-find over box vertices plus the two supernodes, with every open
    /// edge merged.
    pub fn clusters(&self) -> UnionFind {
        let mut uf = UnionFind::new(self.geom.num_nodes());
        for i in 0..self.len() {
            if self.get(i) {
                let (u, v) = self.geom.edge_nodes(i);
                uf.union(u, v);
            }
        }
        uf
    }

    /// Whether an open path joins the upper boundary to the lower boundary,
    /// i.e. whether the configuration lies outside the conditioning event.
    pub fn crossing_exists(&self) -> bool {
        let mut uf = self.clusters();
        uf.connected(self.geom.top_node(), self.geom.bottom_node())
    }

    /// Number of open clusters of the infinite configuration that meet the
    /// box or its boundary (the two outside clusters count once each).
    pub fn cluster_count(&self) -> usize {
        self.clusters().count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::{HashSet, VecDeque};

    /// Direct enumeration: every edge touching the box, collected from the
    /// six edges at each box vertex.
    fn enumerate_edges(l: i32, m: i32) -> HashSet<Edge> {
        let mut out = HashSet::new();
        for x in -l..=l {
            for y in -l..=l {
                for z in -m..=m {
                    for (_, e) in Vertex::new(x, y, z).neighbours() {
                        out.insert(e);
                    }
                }
            }
        }
        out
    }

    #[test]
    fn box_sizes() {
        let g = BoxGeometry::new(1, 1).unwrap();
        assert_eq!(g.num_vertices(), 27);
        assert_eq!(g.num_edges(), 108);
        assert_eq!(enumerate_edges(1, 1).len(), 108);
        let g = BoxGeometry::new(2, 1).unwrap();
        assert_eq!(g.num_vertices(), 75);
        for (l, m) in [(0, 1), (1, 2), (2, 1), (3, 2)] {
            let g = BoxGeometry::new(l, m).unwrap();
            let set = enumerate_edges(l as i32, m as i32);
            assert_eq!(g.num_edges(), set.len());
            for e in g.edges() {
                assert!(set.contains(e));
            }
        }
    }

    #[test]
    fn rejects_bad_dimensions() {
        assert!(BoxGeometry::new(-1, 1).is_err());
        assert!(BoxGeometry::new(1, 0).is_err());
        assert!(BoxGeometry::new(0, 1).is_ok());
    }

    #[test]
    fn dense_indices_are_stable_and_ordered() {
        let g = BoxGeometry::new(2, 2).unwrap();
        for (i, e) in g.edges().iter().enumerate() {
            assert_eq!(g.edge_index(e), Some(i));
        }
        for w in g.edges().windows(2) {
            let key = |e: &Edge| (e.axis, e.a.z(), e.a.y(), e.a.x());
            assert!(key(&w[0]) < key(&w[1]));
        }
        for i in 0..g.num_vertices() {
            assert_eq!(g.vertex_index(&g.vertex(i)), Some(i));
        }
    }

    #[test]
    fn dobrushin_values() {
        let o = Vertex::new(0, 0, 0);
        assert!(!mu(&Edge::between(o, Vertex::new(0, 0, 1)).unwrap()));
        assert!(mu(&Edge::between(o, Vertex::new(1, 0, 0)).unwrap()));
        assert!(mu(
            &Edge::between(Vertex::new(5, -3, 7), Vertex::new(5, -3, 8)).unwrap()
        ));
        assert!(mu(
            &Edge::between(Vertex::new(0, 0, -1), o).unwrap()
        ));
    }

    #[test]
    fn boundary_partition_examples() {
        let (l, m) = (2, 3);
        let g = BoxGeometry::new(l, m).unwrap();
        let (up, down) = g.boundary_partition();
        assert!(up.contains(&Vertex::new(0, 0, m as i32 + 1)));
        assert!(down.contains(&Vertex::new(l as i32 + 1, 0, 0)));
        assert!(down.contains(&Vertex::new(0, 0, -(m as i32) - 1)));
        let up: HashSet<_> = up.into_iter().collect();
        for v in &down {
            assert!(!up.contains(v));
        }
        for v in up.iter().chain(&down) {
            assert!(!g.contains(v));
            assert!(v.neighbours().any(|(w, _)| g.contains(&w)));
        }
    }

    #[test]
    fn edge_canonicalisation_idempotent() {
        let x = Vertex::new(3, -1, 2);
        for (y, e) in x.neighbours() {
            assert_eq!(Edge::between(x, y), Some(e));
            assert_eq!(Edge::between(y, x), Some(e));
            let (a, b) = e.endpoints();
            assert_eq!(Edge::between(a, b), Some(e));
            assert_eq!(Edge::from_centre2(e.centre2()), Some(e));
        }
        assert_eq!(Edge::between(x, x), None);
        assert_eq!(Edge::between(x, Vertex::new(4, 0, 2)), None);
    }

    /// Breadth-first search on an explicit padded window of the infinite
    /// configuration, with the boundary condition written out edge by edge.
    pub(crate) fn crossing_oracle(c: &EdgeConfiguration) -> bool {
        let g = c.geometry();
        let r = g.l() + g.m() + 3;
        let inside = |v: &Vertex| v.0.iter().all(|x| x.abs() <= r);
        let (up, down) = g.boundary_partition();
        let targets: HashSet<Vertex> = down.into_iter().collect();
        let mut seen: HashSet<Vertex> = up.iter().copied().collect();
        let mut queue: VecDeque<Vertex> = up.into_iter().collect();
        while let Some(v) = queue.pop_front() {
            if targets.contains(&v) {
                return true;
            }
            for (w, e) in v.neighbours() {
                if inside(&w) && c.value(&e) && seen.insert(w) {
                    queue.push_back(w);
                }
            }
        }
        false
    }

    #[test]
    fn crossing_examples() {
        let g = BoxGeometry::new(2, 2).unwrap();
        assert!(!EdgeConfiguration::all_closed(&g).crossing_exists());
        assert!(EdgeConfiguration::all_open(&g).crossing_exists());
        let flat = EdgeConfiguration::flat(&g);
        assert!(!flat.crossing_exists());
        assert!(!crossing_oracle(&flat));
    }

    #[test]
    fn crossing_matches_padded_search() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for trial in 0..100 {
            let l = 1 + trial % 3;
            let m = 1 + (trial / 3) % 3;
            let g = BoxGeometry::new(l, m).unwrap();
            let p = rng.random_range(0.2..0.9);
            let c = EdgeConfiguration::from_fn(&g, |_, _| rng.random_bool(p));
            assert_eq!(c.crossing_exists(), crossing_oracle(&c), "trial {trial}");
        }
    }

    #[test]
    fn crossing_is_monotone() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = BoxGeometry::new(2, 2).unwrap();
        for _ in 0..200 {
            let low = EdgeConfiguration::from_fn(&g, |_, _| rng.random_bool(0.4));
            let mut high = low.clone();
            for i in 0..high.len() {
                if rng.random_bool(0.3) {
                    high.set(i, true);
                }
            }
            assert!(low.le(&high));
            if low.crossing_exists() {
                assert!(high.crossing_exists());
            }
        }
    }

    #[test]
    fn words_round_trip() {
        let g = BoxGeometry::new(1, 2).unwrap();
        let c = EdgeConfiguration::from_fn(&g, |i, _| i % 3 == 0);
        let d = EdgeConfiguration::from_words(&g, c.words().to_vec()).unwrap();
        assert_eq!(c, d);
        let mut bad = c.words().to_vec();
        *bad.last_mut().unwrap() |= 1 << 63;
        assert!(EdgeConfiguration::from_words(&g, bad).is_err());
    }
}
