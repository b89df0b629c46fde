//! Ceilings and walls of a surface.
//!
//! A plaquette of the semi-extended set is a c-plaquette when it is
//! horizontal and the only member of that set above its cell; all other
//! members are w-plaquettes. Ceilings and walls are the 0-connected
//! components of the two kinds.

use std::collections::{BTreeSet, HashMap, HashSet};

use super::surface::{cell_of, four_neighbours, outer_cells, Cell, Surface};
use crate::plaquette::Plaquette;
use crate::union_find::UnionFind;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Ceiling {
    /// Stored c-plaquettes; for the infinite ceiling this omits the part
    /// outside the window.
    pub plaquettes: BTreeSet<Plaquette>,
    pub infinite: bool,
}

impl Ceiling {
    pub fn heights(&self) -> BTreeSet<i32> {
        let mut h: BTreeSet<i32> = self.plaquettes.iter().map(|p| p.z()).collect();
        if self.infinite {
            h.insert(0);
        }
        h
    }

    /// Common height of the plaquettes, if they lie in one plane.
    pub fn height(&self) -> Option<i32> {
        let h = self.heights();
        (h.len() == 1).then(|| *h.first().unwrap())
    }

    pub fn cells(&self) -> BTreeSet<Cell> {
        self.plaquettes.iter().map(cell_of).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Wall {
    pub plaquettes: BTreeSet<Plaquette>,
    /// Cells under the horizontal plaquettes.
    pub projection: BTreeSet<Cell>,
    /// Cells cut off from infinity by the projection, projection included.
    pub interior: BTreeSet<Cell>,
    /// Index of the base ceiling, when it is unique.
    pub base: Option<usize>,
    pub altitude: i32,
    /// Largest distance of the wall from the plane of its base.
    pub height: i32,
}

/// Vertical extent, in half-units above `z`, of a plaquette: a horizontal
/// one sits at `z + 1/2`, a vertical one spans `[z - 1/2, z + 1/2]`.
pub fn distance_from_plane(h: &Plaquette, s: i32) -> i32 {
    let z = h.edge().a.z();
    if h.is_horizontal() {
        (z - s).abs()
    } else {
        (z - 1 - s).abs().max((z - s).abs())
    }
}

#[derive(Clone, Debug)]
pub struct Analysis {
    pub star: Surface,
    pub c_plaquettes: HashSet<Plaquette>,
    /// The infinite ceiling is always first.
    pub ceilings: Vec<Ceiling>,
    pub walls: Vec<Wall>,
    pub ceiling_of: HashMap<Plaquette, usize>,
    pub wall_of: HashMap<Plaquette, usize>,
}

impl Analysis {
    pub fn is_c(&self, h: &Plaquette) -> bool {
        if self.star.is_explicit(h) {
            self.c_plaquettes.contains(h)
        } else {
            h.is_horizontal() && h.z() == 0
        }
    }

    fn ceiling_index(&self, h: &Plaquette) -> Option<usize> {
        if self.star.is_explicit(h) {
            self.ceiling_of.get(h).copied()
        } else {
            (h.is_horizontal() && h.z() == 0).then_some(0)
        }
    }

    /// Whether the plaquette above `c` at height 0 is a c-plaquette joined to
    /// a cell outside `[-l, l]^2` by a path of c-plaquettes at height 0 with
    /// consecutive cells sharing a side.
    pub fn connects_to_infinity(&self, c: Cell, l: i32) -> bool {
        let ok = |c: Cell| self.is_c(&Plaquette::horizontal(c.0, c.1, 0));
        if !ok(c) {
            return false;
        }
        let mut seen = HashSet::from([c]);
        let mut stack = vec![c];
        while let Some(c) = stack.pop() {
            if c.0.abs() > l || c.1.abs() > l {
                return true;
            }
            for n in four_neighbours(c) {
                if ok(n) && seen.insert(n) {
                    stack.push(n);
                }
            }
        }
        false
    }
}

fn components(members: &[Plaquette]) -> UnionFind {
    let index: HashMap<Plaquette, usize> =
        members.iter().enumerate().map(|(i, h)| (*h, i)).collect();
    let mut uf = UnionFind::new(members.len());
    for (i, h) in members.iter().enumerate() {
        for n in h.zero_neighbours() {
            if let Some(&j) = index.get(&n) {
                uf.union(i, j);
            }
        }
    }
    uf
}

pub fn analyse(delta: &Surface) -> Analysis {
    let star = delta.semi_extended();
    let r = star.radius();
    let columns = star.columns();
    let mut c_list: Vec<Plaquette> = Vec::new();
    let mut w_list: Vec<Plaquette> = Vec::new();
    for h in star.sorted() {
        if h.is_horizontal() && columns[&cell_of(&h)].len() == 1 {
            c_list.push(h);
        } else {
            w_list.push(h);
        }
    }

    // Ceilings: components of stored c-plaquettes, with every component that
    // reaches the implicit part merged into the infinite ceiling.
    let links_out = |h: &Plaquette| {
        h.zero_neighbours()
            .any(|n| !star.is_explicit(&n) && n.is_horizontal() && n.z() == 0)
    };
    let mut uf = components(&c_list);
    let mut root_id: HashMap<usize, usize> = HashMap::new();
    let mut ceilings = vec![Ceiling {
        plaquettes: BTreeSet::new(),
        infinite: true,
    }];
    let outward: Vec<usize> = (0..c_list.len()).filter(|&i| links_out(&c_list[i])).collect();
    for w in outward.windows(2) {
        uf.union(w[0], w[1]);
    }
    if let Some(&i) = outward.first() {
        root_id.insert(uf.find(i), 0);
    }
    let mut ceiling_of = HashMap::new();
    for (i, h) in c_list.iter().enumerate() {
        let root = uf.find(i);
        let id = *root_id.entry(root).or_insert_with(|| {
            ceilings.push(Ceiling {
                plaquettes: BTreeSet::new(),
                infinite: false,
            });
            ceilings.len() - 1
        });
        ceilings[id].plaquettes.insert(*h);
        ceiling_of.insert(*h, id);
    }

    let mut uf = components(&w_list);
    let mut groups: HashMap<usize, BTreeSet<Plaquette>> = HashMap::new();
    for (i, h) in w_list.iter().enumerate() {
        groups.entry(uf.find(i)).or_default().insert(*h);
    }
    let mut wall_sets: Vec<BTreeSet<Plaquette>> = groups.into_values().collect();
    wall_sets.sort();

    let c_plaquettes: HashSet<Plaquette> = c_list.into_iter().collect();
    let mut analysis = Analysis {
        star,
        c_plaquettes,
        ceilings,
        walls: Vec::new(),
        ceiling_of,
        wall_of: HashMap::new(),
    };
    for (k, plaquettes) in wall_sets.into_iter().enumerate() {
        for h in &plaquettes {
            analysis.wall_of.insert(*h, k);
        }
        let projection: BTreeSet<Cell> = plaquettes
            .iter()
            .filter(|h| h.is_horizontal())
            .map(cell_of)
            .collect();
        let outer = outer_cells(&projection, r + 1);
        let interior: BTreeSet<Cell> = (-r - 1..=r + 1)
            .flat_map(|x| (-r - 1..=r + 1).map(move |y| (x, y)))
            .filter(|c| !outer.contains(c))
            .collect();
        let bases: BTreeSet<usize> = plaquettes
            .iter()
            .flat_map(|h| h.zero_neighbours())
            .filter(|n| n.is_horizontal() && outer.contains(&cell_of(n)))
            .filter_map(|n| analysis.ceiling_index(&n))
            .collect();
        let base = (bases.len() == 1).then(|| *bases.first().unwrap());
        let altitude = base
            .and_then(|b| analysis.ceilings[b].height())
            .unwrap_or(0);
        let height = plaquettes
            .iter()
            .map(|h| distance_from_plane(h, altitude))
            .max()
            .unwrap_or(0);
        analysis.walls.push(Wall {
            plaquettes,
            projection,
            interior,
            base,
            altitude,
            height,
        });
    }
    analysis
}

/// A failed clause of the structural lemma on ceilings and walls.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub clause: &'static str,
    pub detail: String,
}

/// Checks clauses (i)-(vi), (viii) and (ix) of the structure lemma, and that
/// every wall has a unique base.
pub fn check_properties(delta: &Surface, a: &Analysis) -> Vec<Violation> {
    let mut out = Vec::new();
    let mut fail = |clause, detail: String| out.push(Violation { clause, detail });
    let star = &a.star;

    for h in &a.c_plaquettes {
        if !delta.contains(h) {
            fail("i", format!("c-plaquette {h:?} not in the interface"));
        }
    }

    for h in &a.c_plaquettes {
        for n in h.one_neighbours() {
            if star.contains(&n) && !(n.is_horizontal() && delta.contains(&n)) {
                fail("ii", format!("{n:?} next to c-plaquette {h:?}"));
            }
        }
        for n in h.zero_neighbours() {
            if n.is_horizontal() && n.z() == h.z() && !star.contains(&n) {
                fail("ii", format!("{n:?} touches c-plaquette {h:?} but is not in δ*"));
            }
        }
    }

    for (k, c) in a.ceilings.iter().enumerate() {
        if c.height().is_none() {
            fail("iii", format!("ceiling {k} spans heights {:?}", c.heights()));
        }
    }

    // (iv) and (v): the members projecting into a ceiling or wall are exactly
    // that ceiling or wall.
    let mut by_cell: HashMap<Cell, Vec<Plaquette>> = HashMap::new();
    for h in star.explicit() {
        for c in h.project().cells() {
            by_cell.entry(c).or_default().push(*h);
        }
    }
    let covered = |cells: &HashSet<Cell>| -> BTreeSet<Plaquette> {
        cells
            .iter()
            .flat_map(|c| by_cell.get(c).into_iter().flatten())
            .copied()
            .collect()
    };
    for (k, c) in a.ceilings.iter().enumerate() {
        let cells: HashSet<Cell> = c.cells().into_iter().collect();
        let got = covered(&cells);
        if got != c.plaquettes {
            fail("iv", format!("ceiling {k}: projecting members differ"));
        }
    }
    for (k, w) in a.walls.iter().enumerate() {
        let cells: HashSet<Cell> = w.projection.iter().copied().collect();
        let got = covered(&cells);
        if got != w.plaquettes {
            fail("v", format!("wall {k}: projecting members differ"));
        }
    }

    let r = star.radius() + 1;
    for (k, w) in a.walls.iter().enumerate() {
        // Components of the complement that meet the outer ring.
        let free: Vec<Cell> = (-r..=r)
            .flat_map(|x| (-r..=r).map(move |y| (x, y)))
            .filter(|c| !w.projection.contains(c))
            .collect();
        let index: HashMap<Cell, usize> = free.iter().enumerate().map(|(i, c)| (*c, i)).collect();
        let mut uf = UnionFind::new(free.len());
        for (i, c) in free.iter().enumerate() {
            for n in super::surface::eight_neighbours(*c) {
                if let Some(&j) = index.get(&n) {
                    uf.union(i, j);
                }
            }
        }
        let ring: BTreeSet<usize> = free
            .iter()
            .enumerate()
            .filter(|(_, c)| c.0.abs() == r || c.1.abs() == r)
            .map(|(i, _)| uf.find(i))
            .collect();
        if ring.len() != 1 {
            fail("vi", format!("wall {k}: {} unbounded complementary components", ring.len()));
        }
        if w.base.is_none() {
            fail("base", format!("wall {k} has no unique base ceiling"));
        }
        if w.projection.is_empty() {
            fail("ix", format!("wall {k} has empty projection"));
        }
    }

    for i in 0..a.walls.len() {
        for j in i + 1..a.walls.len() {
            let touching = a.walls[i].projection.iter().any(|c| {
                super::surface::eight_neighbours(*c)
                    .chain(std::iter::once(*c))
                    .any(|n| a.walls[j].projection.contains(&n))
            });
            if touching {
                fail("viii", format!("walls {i} and {j} have 0-connected projections"));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::extract::tests::{bump_config, bump_into};
    use crate::interface::Interface;
    use crate::lattice::{BoxGeometry, EdgeConfiguration};

    #[test]
    fn regular_interface_has_one_flat_ceiling() {
        let s = Surface::flat(4);
        let a = analyse(&s);
        assert_eq!(a.ceilings.len(), 1);
        assert_eq!(a.ceilings[0].height(), Some(0));
        assert_eq!(a.ceilings[0].plaquettes.len(), 81);
        assert!(a.walls.is_empty());
        assert!(check_properties(&s, &a).is_empty());
        assert!(a.connects_to_infinity((0, 0), 2));
    }

    #[test]
    fn bump_has_one_wall_of_fourteen() {
        let g = BoxGeometry::new(3, 3).unwrap();
        let d = Interface::extract(&bump_config(&g, (0, 0))).unwrap();
        let a = analyse(d.surface());
        assert!(check_properties(d.surface(), &a).is_empty());
        assert_eq!(a.walls.len(), 1);
        let w = &a.walls[0];
        assert_eq!(w.plaquettes.len(), 14);
        assert_eq!(w.plaquettes.iter().filter(|h| !h.is_horizontal()).count(), 4);
        let cross: BTreeSet<Cell> = [(0, 0), (1, 0), (-1, 0), (0, 1), (0, -1)].into();
        assert_eq!(w.projection, cross);
        assert_eq!(w.interior, cross);
        for c in &cross {
            let zs: BTreeSet<i32> = w
                .plaquettes
                .iter()
                .filter(|h| h.is_horizontal() && cell_of(h) == *c)
                .map(|h| h.z())
                .collect();
            assert_eq!(zs, [0, 1].into());
        }
        assert_eq!(a.ceilings.len(), 1);
        assert_eq!(a.ceilings[0].height(), Some(0));
        assert_eq!(w.base, Some(0));
        assert_eq!(w.altitude, 0);
        assert_eq!(w.height, 1);
        for x in -5..=5 {
            for y in -5..=5 {
                assert_eq!(a.connects_to_infinity((x, y), 3), !cross.contains(&(x, y)));
            }
        }
    }

    #[test]
    fn raised_plateau_is_a_finite_ceiling() {
        // Lift a 3x3 block of cells by one: the inner cell keeps a unique
        // plaquette and forms a ceiling at height 1.
        let g = BoxGeometry::new(4, 3).unwrap();
        let mut omega = EdgeConfiguration::flat(&g);
        for x in -1..=1 {
            for y in -1..=1 {
                bump_into(&mut omega, (x, y));
            }
        }
        // Reopen the horizontal edges inside the plateau layer.
        for i in 0..g.num_edges() {
            let e = g.edge(i);
            let (a, b) = e.endpoints();
            let inside = |v: &crate::lattice::Vertex| v.z() == 1 && v.x().abs() <= 1 && v.y().abs() <= 1;
            if !e.is_vertical() && inside(&a) && inside(&b) {
                omega.set(i, true);
            }
        }
        let d = Interface::extract(&omega).unwrap();
        let a = analyse(d.surface());
        assert!(check_properties(d.surface(), &a).is_empty(), "{:?}", check_properties(d.surface(), &a));
        assert_eq!(a.walls.len(), 1);
        assert_eq!(a.ceilings.len(), 2);
        assert_eq!(a.ceilings[1].height(), Some(1));
        assert_eq!(a.ceilings[1].cells(), [(0, 0)].into());
        assert_eq!(a.walls[0].projection.len(), 20);
        assert_eq!(a.walls[0].interior.len(), 21);
        assert_eq!(d.displacement((0, 0)), 1);
    }
}
