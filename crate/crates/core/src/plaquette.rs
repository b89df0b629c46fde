//! Plaquettes of the dual lattice, their adjacency, projections onto the
//! regular interface, inside/outside labelling of plaquette surfaces,
//! splitting sets and boundary graphs.
//!
//! Geometry is done in doubled coordinates throughout: a plaquette's centre is
//! the doubled centre of its dual edge, its corners are all-odd triples.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{Axis, Edge, Vertex};
use crate::union_find::UnionFind;

#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub enum Orientation {
    Horizontal,
    /// Dual to an edge along the first axis.
    VerticalX,
    /// Dual to an edge along the second axis.
    VerticalY,
}

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum Adjacency {
    None,
    /// Intersection is a single point.
    Zero,
    /// Intersection is a unit segment.
    One,
}

/// The unit square of the dual lattice pierced by one edge, identified with
/// that edge.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Plaquette(pub Edge);

impl std::fmt::Debug for Plaquette {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let c = self.centre2();
        let half = |x: i32| {
            if x % 2 == 0 {
                format!("{}", x / 2)
            } else {
                format!("{}/2", x)
            }
        };
        write!(f, "h({},{},{})", half(c[0]), half(c[1]), half(c[2]))
    }
}

pub fn dual(e: Edge) -> Plaquette {
    Plaquette(e)
}

pub fn edge_of(h: Plaquette) -> Edge {
    h.0
}

impl Plaquette {
    pub fn edge(&self) -> Edge {
        self.0
    }

    pub fn orientation(&self) -> Orientation {
        match self.0.axis {
            Axis::Z => Orientation::Horizontal,
            Axis::X => Orientation::VerticalX,
            Axis::Y => Orientation::VerticalY,
        }
    }

    pub fn is_horizontal(&self) -> bool {
        self.0.axis == Axis::Z
    }

    pub fn centre2(&self) -> [i32; 3] {
        self.0.centre2()
    }

    pub fn from_centre2(c: [i32; 3]) -> Option<Plaquette> {
        Edge::from_centre2(c).map(Plaquette)
    }

    /// Horizontal plaquette over cell `(x1, x2)` in the plane `z + 1/2`.
    pub fn horizontal(x1: i32, x2: i32, z: i32) -> Plaquette {
        Plaquette(Edge::new(Vertex::new(x1, x2, z), Axis::Z))
    }

    /// Height of a horizontal plaquette: the `z` with the plaquette in the
    /// plane `z + 1/2`.
    pub fn z(&self) -> i32 {
        self.0.a.z()
    }

    pub fn corners2(&self) -> [[i32; 3]; 4] {
        let c = self.centre2();
        let k = self.0.axis.index();
        let (i, j) = ((k + 1) % 3, (k + 2) % 3);
        let mut out = [[0; 3]; 4];
        for (n, (si, sj)) in [(-1, -1), (-1, 1), (1, -1), (1, 1)].into_iter().enumerate() {
            let mut p = c;
            p[i] += si;
            p[j] += sj;
            out[n] = p;
        }
        out
    }

    pub fn translate(&self, d: [i32; 3]) -> Plaquette {
        Plaquette(self.0.translate(d))
    }

    pub fn project(&self) -> Projection {
        let c = self.centre2();
        Projection([c[0], c[1]])
    }

    /// Plaquettes sharing a unit segment with this one.
    pub fn one_neighbours(&self) -> impl Iterator<Item = Plaquette> + '_ {
        NEIGHBOURS[self.0.axis.index()]
            .iter()
            .filter(|n| n.shared == 2)
            .map(move |n| self.shifted(n))
    }

    /// Plaquettes sharing at least one point with this one.
    pub fn zero_neighbours(&self) -> impl Iterator<Item = Plaquette> + '_ {
        NEIGHBOURS[self.0.axis.index()]
            .iter()
            .map(move |n| self.shifted(n))
    }

    fn shifted(&self, n: &NeighbourOffset) -> Plaquette {
        let a = self.0.a.0;
        Plaquette(Edge::new(
            Vertex([a[0] + n.da[0], a[1] + n.da[1], a[2] + n.da[2]]),
            n.axis,
        ))
    }
}

pub fn adjacency(h1: &Plaquette, h2: &Plaquette) -> Adjacency {
    let c1 = h1.corners2();
    let c2 = h2.corners2();
    let shared = c1.iter().filter(|p| c2.contains(p)).count();
    match shared {
        0 => Adjacency::None,
        1 => Adjacency::Zero,
        _ => Adjacency::One,
    }
}

struct NeighbourOffset {
    da: [i32; 3],
    axis: Axis,
    shared: usize,
}

static NEIGHBOURS: LazyLock<[Vec<NeighbourOffset>; 3]> = LazyLock::new(|| {
    Axis::ALL.map(|axis| {
        let base = Plaquette(Edge::new(Vertex::new(0, 0, 0), axis));
        let bc = base.corners2();
        let mut out = Vec::new();
        for other in Axis::ALL {
            for x in -2..=2 {
                for y in -2..=2 {
                    for z in -2..=2 {
                        let h = Plaquette(Edge::new(Vertex::new(x, y, z), other));
                        if h == base {
                            continue;
                        }
                        let shared = h.corners2().iter().filter(|p| bc.contains(p)).count();
                        if shared > 0 {
                            out.push(NeighbourOffset {
                                da: [x, y, z],
                                axis: other,
                                shared,
                            });
                        }
                    }
                }
            }
        }
        out
    })
});

/// Projection onto the regular interface, in doubled planar coordinates: a
/// cell `(x1, x2)` is `(2x1, 2x2)`, a unit segment between two cells is the
/// (odd, even) or (even, odd) midpoint between them.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug, Serialize, Deserialize)]
pub struct Projection(pub [i32; 2]);

impl Projection {
    pub fn cell(x1: i32, x2: i32) -> Projection {
        Projection([2 * x1, 2 * x2])
    }

    pub fn is_cell(&self) -> bool {
        self.0[0] % 2 == 0 && self.0[1] % 2 == 0
    }

    /// Cell coordinates, if this is a cell.
    pub fn as_cell(&self) -> Option<(i32, i32)> {
        self.is_cell().then(|| (self.0[0] / 2, self.0[1] / 2))
    }

    /// For a segment, the two cells it separates; for a cell, itself twice.
    pub fn cells(&self) -> [(i32, i32); 2] {
        let [a, b] = self.0;
        if a % 2 != 0 {
            [((a - 1) / 2, b / 2), ((a + 1) / 2, b / 2)]
        } else if b % 2 != 0 {
            [(a / 2, (b - 1) / 2), (a / 2, (b + 1) / 2)]
        } else {
            [(a / 2, b / 2), (a / 2, b / 2)]
        }
    }

    /// Doubled planar corner points (all odd).
    pub fn corners2(&self) -> Vec<[i32; 2]> {
        let [a, b] = self.0;
        match (a.rem_euclid(2), b.rem_euclid(2)) {
            (0, 0) => vec![[a - 1, b - 1], [a - 1, b + 1], [a + 1, b - 1], [a + 1, b + 1]],
            (1, 0) => vec![[a, b - 1], [a, b + 1]],
            _ => vec![[a - 1, b], [a + 1, b]],
        }
    }

    /// Whether this projection lies inside the union of the given closed cells.
    pub fn covered_by(&self, cells: &HashSet<(i32, i32)>) -> bool {
        let [c1, c2] = self.cells();
        cells.contains(&c1) || cells.contains(&c2)
    }

    pub fn touches(&self, other: &Projection) -> bool {
        let a = self.corners2();
        other.corners2().iter().any(|p| a.contains(p))
    }
}

/// Finite set of plaquettes with deterministic iteration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaquetteSet {
    set: BTreeSet<Plaquette>,
}

impl FromIterator<Plaquette> for PlaquetteSet {
    fn from_iter<I: IntoIterator<Item = Plaquette>>(iter: I) -> Self {
        PlaquetteSet {
            set: iter.into_iter().collect(),
        }
    }
}

impl PlaquetteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, h: Plaquette) -> bool {
        self.set.insert(h)
    }

    pub fn remove(&mut self, h: &Plaquette) -> bool {
        self.set.remove(h)
    }

    pub fn contains(&self, h: &Plaquette) -> bool {
        self.set.contains(h)
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Plaquette> {
        self.set.iter()
    }

    pub fn dual_edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.set.iter().map(|h| h.0)
    }

    /// All plaquettes of the set together with every plaquette 1-connected to
    /// one of them.
    pub fn extended(&self) -> PlaquetteSet {
        let mut out = self.clone();
        for h in &self.set {
            for n in h.one_neighbours() {
                out.insert(n);
            }
        }
        out
    }

    /// Components under 1-adjacency (`one = true`) or 0-adjacency.
    pub fn components(&self, one: bool) -> Vec<PlaquetteSet> {
        let items: Vec<Plaquette> = self.set.iter().copied().collect();
        let index: HashMap<Plaquette, usize> =
            items.iter().enumerate().map(|(i, h)| (*h, i)).collect();
        let mut uf = UnionFind::new(items.len());
        for (i, h) in items.iter().enumerate() {
            let nbrs: Vec<Plaquette> = if one {
                h.one_neighbours().collect()
            } else {
                h.zero_neighbours().collect()
            };
            for n in nbrs {
                if let Some(&j) = index.get(&n) {
                    uf.union(i, j);
                }
            }
        }
        let mut groups: HashMap<usize, PlaquetteSet> = HashMap::new();
        for (i, h) in items.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().insert(*h);
        }
        let mut out: Vec<PlaquetteSet> = groups.into_values().collect();
        out.sort_by(|a, b| a.set.first().cmp(&b.set.first()));
        out
    }

    pub fn is_one_connected(&self) -> bool {
        self.components(true).len() <= 1
    }

    /// Smallest vertex box containing both endpoints of every dual edge.
    pub fn vertex_bounds(&self) -> Option<([i32; 3], [i32; 3])> {
        let mut lo = [i32::MAX; 3];
        let mut hi = [i32::MIN; 3];
        for h in &self.set {
            for v in [h.0.a, h.0.b()] {
                for i in 0..3 {
                    lo[i] = lo[i].min(v.0[i]);
                    hi[i] = hi[i].max(v.0[i]);
                }
            }
        }
        (!self.set.is_empty()).then_some((lo, hi))
    }
}

/// Axis-aligned box of lattice vertices, inclusive bounds.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub lo: [i32; 3],
    pub hi: [i32; 3],
}

impl Window {
    pub fn new(lo: [i32; 3], hi: [i32; 3]) -> Self {
        Window { lo, hi }
    }

    /// The vertex bounds of `h` padded by `margin` on every side.
    pub fn around(h: &PlaquetteSet, margin: i32) -> Window {
        let (lo, hi) = h.vertex_bounds().unwrap_or(([0; 3], [0; 3]));
        Window {
            lo: lo.map(|x| x - margin),
            hi: hi.map(|x| x + margin),
        }
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        (0..3).all(|i| v.0[i] >= self.lo[i] && v.0[i] <= self.hi[i])
    }

    fn strictly_contains(&self, v: &Vertex) -> bool {
        (0..3).all(|i| v.0[i] > self.lo[i] && v.0[i] < self.hi[i])
    }

    fn dims(&self) -> [i32; 3] {
        [0, 1, 2].map(|i| self.hi[i] - self.lo[i] + 1)
    }

    fn len(&self) -> usize {
        self.dims().iter().map(|&d| d.max(0) as usize).product()
    }

    fn index(&self, v: &Vertex) -> usize {
        let d = self.dims();
        (((v.0[2] - self.lo[2]) * d[1] + (v.0[1] - self.lo[1])) * d[0] + (v.0[0] - self.lo[0]))
            as usize
    }

    fn vertex(&self, i: usize) -> Vertex {
        let d = self.dims();
        let i = i as i32;
        Vertex([
            self.lo[0] + i % d[0],
            self.lo[1] + (i / d[0]) % d[1],
            self.lo[2] + i / (d[0] * d[1]),
        ])
    }

    fn on_boundary(&self, v: &Vertex) -> bool {
        (0..3).any(|i| v.0[i] == self.lo[i] || v.0[i] == self.hi[i])
    }
}

/// Inside/outside labelling of the unit cubes centred at the vertices of a
/// window, for the surface `[H]`.
#[derive(Clone, Debug)]
pub struct InsideOutside {
    window: Window,
    inside: Vec<bool>,
}

impl InsideOutside {
    /// Whether the cube centred at `v` lies in a bounded component of the
    /// complement of `[H]`. Vertices outside the window are outside.
    pub fn is_inside(&self, v: &Vertex) -> bool {
        self.window.contains(v) && self.inside[self.window.index(v)]
    }

    pub fn inside_vertices(&self) -> Vec<Vertex> {
        (0..self.inside.len())
            .filter(|&i| self.inside[i])
            .map(|i| self.window.vertex(i))
            .collect()
    }

    pub fn inside_count(&self) -> usize {
        self.inside.iter().filter(|&&b| b).count()
    }

    pub fn window(&self) -> Window {
        self.window
    }
}

/// Flood fill of the cube graph: two face-adjacent cubes communicate unless
/// their shared face, the plaquette dual to the edge joining their centres,
/// belongs to `h`.
pub fn inside_outside(h: &PlaquetteSet, window: Option<Window>) -> Result<InsideOutside> {
    let window = window.unwrap_or_else(|| Window::around(h, 1));
    for p in h.iter() {
        if !window.strictly_contains(&p.0.a) || !window.strictly_contains(&p.0.b()) {
            return Err(Error::WindowTooSmall);
        }
    }
    let blocked: HashSet<Edge> = h.dual_edges().collect();
    let n = window.len();
    let mut reached = vec![false; n];
    let mut queue = VecDeque::new();
    for i in 0..n {
        if window.on_boundary(&window.vertex(i)) {
            reached[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let v = window.vertex(i);
        for (w, e) in v.neighbours() {
            if window.contains(&w) && !blocked.contains(&e) {
                let j = window.index(&w);
                if !reached[j] {
                    reached[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    Ok(InsideOutside {
        window,
        inside: reached.into_iter().map(|r| !r).collect(),
    })
}

/// Plaquettes dual to the edges with exactly one endpoint in `v`.
pub fn edge_boundary(v: &HashSet<Vertex>) -> PlaquetteSet {
    let mut out = PlaquetteSet::new();
    for x in v {
        for (y, e) in x.neighbours() {
            if !v.contains(&y) {
                out.insert(Plaquette(e));
            }
        }
    }
    out
}

fn is_connected_vertex_set(v: &HashSet<Vertex>) -> bool {
    let Some(start) = v.iter().next() else {
        return false;
    };
    let mut seen = HashSet::from([*start]);
    let mut queue = VecDeque::from([*start]);
    while let Some(x) = queue.pop_front() {
        for (y, _) in x.neighbours() {
            if v.contains(&y) && seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    seen.len() == v.len()
}

/// A 1-connected part of the edge boundary of `v` whose inside contains `v`;
/// the innermost such part when several qualify.
pub fn splitting_set(v: &HashSet<Vertex>) -> Result<PlaquetteSet> {
    if v.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    if !is_connected_vertex_set(v) {
        return Err(Error::DisconnectedVertexSet);
    }
    let boundary = edge_boundary(v);
    let window = Window::around(&boundary, 1);
    let mut best: Option<(usize, PlaquetteSet)> = None;
    for q in boundary.components(true) {
        let io = inside_outside(&q, Some(window))?;
        if v.iter().all(|x| io.is_inside(x)) {
            let size = io.inside_count();
            if best.as_ref().is_none_or(|(s, _)| size < *s) {
                best = Some((size, q));
            }
        }
    }
    best.map(|(_, q)| q)
        .ok_or_else(|| Error::InvalidInterface("no boundary component encloses the set".into()))
}

/// Result of checking the three postconditions of a splitting set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplittingCheck {
    pub subset_of_boundary: bool,
    pub one_connected: bool,
    pub encloses: bool,
    pub exterior_outside: bool,
}

impl SplittingCheck {
    pub fn ok(&self) -> bool {
        self.subset_of_boundary && self.one_connected && self.encloses && self.exterior_outside
    }
}

/// Independent verification of a candidate splitting set `q` for `v`: every
/// vertex joined to infinity by a path avoiding `v` must be outside `[q]`.
pub fn check_splitting_set(v: &HashSet<Vertex>, q: &PlaquetteSet) -> Result<SplittingCheck> {
    let boundary = edge_boundary(v);
    let window = Window::around(&boundary, 2);
    let io = inside_outside(q, Some(window))?;
    let mut exterior = vec![false; window.len()];
    let mut queue = VecDeque::new();
    for i in 0..window.len() {
        let x = window.vertex(i);
        if window.on_boundary(&x) && !v.contains(&x) {
            exterior[i] = true;
            queue.push_back(x);
        }
    }
    while let Some(x) = queue.pop_front() {
        for (y, _) in x.neighbours() {
            if window.contains(&y) && !v.contains(&y) {
                let j = window.index(&y);
                if !exterior[j] {
                    exterior[j] = true;
                    queue.push_back(y);
                }
            }
        }
    }
    Ok(SplittingCheck {
        subset_of_boundary: q.iter().all(|h| boundary.contains(h)),
        one_connected: !q.is_empty() && q.is_one_connected(),
        encloses: v.iter().all(|x| io.is_inside(x)),
        exterior_outside: (0..window.len())
            .filter(|&i| exterior[i])
            .all(|i| !io.is_inside(&window.vertex(i))),
    })
}

/// The graph with vertices `Δ_v C` and edges `Δ_e C` attached to a component
/// `C` of the lattice with the dual edges of `δ` removed.
#[derive(Clone, Debug)]
pub struct BoundaryGraph {
    pub vertices: BTreeSet<Vertex>,
    pub edges: BTreeSet<Edge>,
    pub connected: bool,
}

/// Builds the boundary graph of `c`. The component check is strict unless a
/// `domain` is given, in which case `c` only has to be a component of the
/// graph induced on `domain`.
pub fn boundary_graph(
    c: &HashSet<Vertex>,
    delta_bar: &PlaquetteSet,
    delta: &PlaquetteSet,
    domain: Option<&dyn Fn(&Vertex) -> bool>,
) -> Result<BoundaryGraph> {
    if c.is_empty() {
        return Err(Error::EmptyVertexSet);
    }
    let d: HashSet<Edge> = delta.dual_edges().collect();
    let in_domain = |v: &Vertex| domain.is_none_or(|f| f(v));
    let start = *c.iter().min().unwrap();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(x) = queue.pop_front() {
        for (y, e) in x.neighbours() {
            if d.contains(&e) || !in_domain(&y) {
                continue;
            }
            if !c.contains(&y) {
                return Err(Error::NotAComponent);
            }
            if seen.insert(y) {
                queue.push_back(y);
            }
        }
    }
    if seen.len() != c.len() {
        return Err(Error::NotAComponent);
    }

    let mut vertices = BTreeSet::new();
    let mut edges = BTreeSet::new();
    for x in c {
        for (y, e) in x.neighbours() {
            let h = Plaquette(e);
            if delta_bar.contains(&h) {
                vertices.insert(*x);
                if c.contains(&y) && !delta.contains(&h) {
                    edges.insert(e);
                }
            }
        }
    }
    let connected = match vertices.first() {
        None => true,
        Some(&s) => {
            let mut seen = HashSet::from([s]);
            let mut queue = VecDeque::from([s]);
            while let Some(x) = queue.pop_front() {
                for (y, e) in x.neighbours() {
                    if edges.contains(&e) && seen.insert(y) {
                        queue.push_back(y);
                    }
                }
            }
            seen.len() == vertices.len()
        }
    };
    Ok(BoundaryGraph {
        vertices,
        edges,
        connected,
    })
}

/// Finite components of the lattice with the dual edges of `delta` removed.
pub fn finite_components(delta: &PlaquetteSet) -> Vec<HashSet<Vertex>> {
    if delta.is_empty() {
        return Vec::new();
    }
    let io = inside_outside(delta, None).expect("default window is always valid");
    let blocked: HashSet<Edge> = delta.dual_edges().collect();
    let mut done = HashSet::new();
    let mut out = Vec::new();
    for v in io.inside_vertices() {
        if done.contains(&v) {
            continue;
        }
        let mut comp = HashSet::from([v]);
        let mut queue = VecDeque::from([v]);
        while let Some(x) = queue.pop_front() {
            for (y, e) in x.neighbours() {
                if !blocked.contains(&e) && comp.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        done.extend(comp.iter().copied());
        out.push(comp);
    }
    out
}

/// Enumerates every connected induced subgraph with at most `max_size`
/// nodes of a graph on at most 128 nodes, each exactly once (Redelmeier's
/// method). The callback receives the node mask and the size.
pub fn connected_subsets(adj: &[Vec<usize>], max_size: usize, mut f: impl FnMut(u128, usize)) {
    for root in 0..adj.len() {
        connected_subsets_rooted(adj, root, max_size, &mut f);
    }
}

/// The part of [`connected_subsets`] whose smallest node is `root`.
pub fn connected_subsets_rooted(
    adj: &[Vec<usize>],
    root: usize,
    max_size: usize,
    mut f: impl FnMut(u128, usize),
) {
    assert!(adj.len() <= 128);
    fn rec(
        adj: &[Vec<usize>],
        untried: &mut Vec<usize>,
        seen: u128,
        set: u128,
        size: usize,
        max_size: usize,
        f: &mut dyn FnMut(u128, usize),
    ) {
        while let Some(v) = untried.pop() {
            let set2 = set | (1u128 << v);
            f(set2, size + 1);
            if size + 1 < max_size {
                let mut next = untried.clone();
                let mut seen2 = seen;
                for &w in &adj[v] {
                    if seen2 & (1u128 << w) == 0 {
                        seen2 |= 1u128 << w;
                        next.push(w);
                    }
                }
                rec(adj, &mut next, seen2, set2, size + 1, max_size, f);
            }
        }
    }
    let below = if root == 0 { 0 } else { (1u128 << root) - 1 };
    let mut untried = vec![root];
    rec(adj, &mut untried, below | (1u128 << root), 0, 0, max_size, &mut f);
}

/// The 108 plaquettes whose corners lie in the dual window of 4x4x4 dual
/// vertices around the cubes centred at `{1,2,3}^3`, and their 1-adjacency.
pub fn dual_window_plaquettes() -> (Vec<Plaquette>, Vec<Vec<usize>>) {
    let mut list = Vec::new();
    for axis in Axis::ALL {
        for x in 0..=4 {
            for y in 0..=4 {
                for z in 0..=4 {
                    let h = Plaquette(Edge::new(Vertex::new(x, y, z), axis));
                    if h.corners2().iter().all(|c| c.iter().all(|&t| (1..=7).contains(&t))) {
                        list.push(h);
                    }
                }
            }
        }
    }
    let index: HashMap<Plaquette, usize> = list.iter().enumerate().map(|(i, h)| (*h, i)).collect();
    let adj = list
        .iter()
        .map(|h| h.one_neighbours().filter_map(|n| index.get(&n).copied()).collect())
        .collect();
    (list, adj)
}
