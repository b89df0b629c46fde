//! Connectivity queries for the heat-bath step: are the endpoints of an edge
//! joined without it, and would opening it join the two outside clusters?

use std::collections::VecDeque;

use crate::lattice::{Axis, BoxGeometry, Edge, EdgeConfiguration};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EdgeStatus {
    /// Endpoints joined by an open path avoiding the edge.
    Connected,
    /// Endpoints in different clusters; `forbidden` when one holds the upper
    /// outside cluster and the other the lower.
    Separate { forbidden: bool },
}

/// Bidirectional breadth-first search with generation-stamped marks.
///
/// The two supernodes are treated as sinks: a side that reaches one stops,
/// since its cluster is then known to be that outside cluster. A side that
/// runs out of nodes has found a finite cluster.
#[derive(Clone, Debug)]
pub struct Searcher {
    /// Per edge, the box edges of the three-step detours around it through
    /// its four plaquette neighbours; checked before any search.
    detours: Vec<Vec<[u32; 3]>>,
    mark: Vec<u32>,
    generation: u32,
    queues: [VecDeque<u32>; 2],
}

const SIDE_BIT: u32 = 1 << 31;

impl Searcher {
    pub fn new(geom: &BoxGeometry) -> Self {
        let detours = geom
            .edges()
            .iter()
            .map(|e| {
                let (a, b) = e.endpoints();
                let mut out = Vec::new();
                for axis in Axis::ALL {
                    if axis == e.axis {
                        continue;
                    }
                    for d in [-1, 1] {
                        let (a2, b2) = (a.offset(axis, d), b.offset(axis, d));
                        let path = [
                            Edge::between(a, a2),
                            Edge::between(a2, b2),
                            Edge::between(b2, b),
                        ]
                        .map(|f| f.and_then(|f| geom.edge_index(&f)));
                        if path.iter().all(|i| i.is_some()) {
                            out.push(path.map(|i| i.unwrap() as u32));
                        }
                    }
                }
                out
            })
            .collect();
        Searcher {
            detours,
            mark: vec![0; geom.num_nodes()],
            generation: 0,
            queues: [VecDeque::new(), VecDeque::new()],
        }
    }

    fn next_generation(&mut self) {
        self.generation += 1;
        if self.generation >= SIDE_BIT {
            self.mark.fill(0);
            self.generation = 1;
        }
    }

    pub fn status(&mut self, omega: &EdgeConfiguration, e: usize) -> EdgeStatus {
        let geom = omega.geometry();
        let (u, v) = geom.edge_nodes(e);
        let top = geom.top_node();
        let bottom = geom.bottom_node();
        let is_super = |x: usize| x == top || x == bottom;
        if self.detours[e]
            .iter()
            .any(|path| path.iter().all(|&i| omega.get(i as usize)))
        {
            return EdgeStatus::Connected;
        }
        self.next_generation();
        let g = self.generation;
        let tag = [g, g | SIDE_BIT];
        self.queues[0].clear();
        self.queues[1].clear();
        let mut reached: [Option<usize>; 2] = [None, None];
        let mut done = [false, false];
        for (side, x) in [(0, u), (1, v)] {
            self.mark[x] = tag[side];
            if is_super(x) {
                reached[side] = Some(x);
                done[side] = true;
            } else {
                self.queues[side].push_back(x as u32);
            }
        }
        let mut side = 0;
        loop {
            if let (Some(a), Some(b)) = (reached[0], reached[1]) {
                return if a == b {
                    EdgeStatus::Connected
                } else {
                    EdgeStatus::Separate { forbidden: true }
                };
            }
            for s in 0..2 {
                if done[s] && reached[s].is_none() {
                    return EdgeStatus::Separate { forbidden: false };
                }
            }
            if done[side] {
                side ^= 1;
            }
            let Some(x) = self.queues[side].pop_front() else {
                done[side] = true;
                continue;
            };
            for &(y, ei) in geom.incident(x as usize) {
                let (y, ei) = (y as usize, ei as usize);
                if ei == e || !omega.get(ei) {
                    continue;
                }
                let m = self.mark[y];
                if m == tag[side ^ 1] {
                    return EdgeStatus::Connected;
                }
                if m == tag[side] {
                    continue;
                }
                self.mark[y] = tag[side];
                if is_super(y) {
                    reached[side] = Some(y);
                    done[side] = true;
                    break;
                }
                self.queues[side].push_back(y as u32);
            }
            if !done[side ^ 1] {
                side ^= 1;
            }
        }
    }
}

/// Plain breadth-first search over the whole graph, supernodes included.
pub fn reference_status(omega: &EdgeConfiguration, e: usize) -> EdgeStatus {
    let geom = omega.geometry();
    let (u, v) = geom.edge_nodes(e);
    let cluster = |start: usize| {
        let mut seen = vec![false; geom.num_nodes()];
        seen[start] = true;
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for &(y, ei) in geom.incident(x) {
                if ei as usize != e && omega.get(ei as usize) && !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y as usize);
                }
            }
        }
        seen
    };
    let cu = cluster(u);
    if cu[v] {
        return EdgeStatus::Connected;
    }
    let cv = cluster(v);
    let (t, b) = (geom.top_node(), geom.bottom_node());
    EdgeStatus::Separate {
        forbidden: (cu[t] && cv[b]) || (cu[b] && cv[t]),
    }
}
