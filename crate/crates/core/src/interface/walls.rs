//! Standard walls, admissible wall families, and the correspondence between
//! families and interfaces.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::classify::{analyse, distance_from_plane, Analysis};
use super::surface::{
    cell_of, cell_radius, eight_neighbours, four_neighbours, linf, outer_cells, Cell, Surface,
};
use crate::error::{Error, Result};
use crate::lattice::{mu, Edge};
use crate::plaquette::Plaquette;

/// Total order on cells used to pick origins.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CellOrder {
    /// By `(x1, x2)`.
    #[default]
    Lexicographic,
    /// By distance from the given cell, then `(x1, x2)`.
    Centred(Cell),
}

impl CellOrder {
    pub fn key(&self, c: Cell) -> (i32, i32, i32) {
        match self {
            CellOrder::Lexicographic => (0, c.0, c.1),
            CellOrder::Centred(h) => (linf(*h, c), c.0, c.1),
        }
    }

    pub fn earliest(&self, cells: impl IntoIterator<Item = Cell>) -> Option<Cell> {
        cells.into_iter().min_by_key(|c| self.key(*c))
    }
}

/// A wall at altitude 0: `a` lies in the interface, `b` in the
/// semi-extended interface only.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StandardWall {
    pub a: BTreeSet<Plaquette>,
    pub b: BTreeSet<Plaquette>,
}

impl StandardWall {
    pub fn plaquettes(&self) -> impl Iterator<Item = &Plaquette> {
        self.a.iter().chain(self.b.iter())
    }

    /// `|S| = |A| + |B|`.
    pub fn size(&self) -> usize {
        self.a.len() + self.b.len()
    }

    /// `N(S) = |A|`.
    pub fn n(&self) -> usize {
        self.a.len()
    }

    pub fn projection(&self) -> BTreeSet<Cell> {
        self.plaquettes()
            .filter(|h| h.is_horizontal())
            .map(cell_of)
            .collect()
    }

    /// `Π(S) = N(S) - |π(S)|`.
    pub fn excess(&self) -> i64 {
        self.n() as i64 - self.projection().len() as i64
    }

    /// `D(S)`: largest distance from the plane of the regular interface.
    pub fn height(&self) -> i32 {
        self.plaquettes()
            .map(|h| distance_from_plane(h, 0))
            .max()
            .unwrap_or(0)
    }

    fn radius(&self) -> i32 {
        cell_radius(&self.projection()) + 1
    }

    pub fn interior(&self) -> BTreeSet<Cell> {
        let proj = self.projection();
        let r = self.radius();
        let outer = outer_cells(&proj, r);
        square(r).filter(|c| !outer.contains(c)).collect()
    }

    /// Earliest projected cell sharing a side with a cell outside the
    /// projection.
    pub fn origin(&self, order: CellOrder) -> Option<Cell> {
        let proj = self.projection();
        order.earliest(
            proj.iter()
                .copied()
                .filter(|c| four_neighbours(*c).iter().any(|n| !proj.contains(n))),
        )
    }

    pub fn translate(&self, dz: i32) -> StandardWall {
        let t = |s: &BTreeSet<Plaquette>| s.iter().map(|h| h.translate([0, 0, dz])).collect();
        StandardWall {
            a: t(&self.a),
            b: t(&self.b),
        }
    }

    /// The interface whose only wall is this one. Each bounded region
    /// enclosed by the projection carries a flat ceiling at the height of
    /// the horizontal plaquettes of `A` beside it.
    pub fn surface(&self) -> Result<Surface> {
        let proj = self.projection();
        if proj.is_empty() {
            return Err(Error::InvalidInterface("wall without horizontal plaquettes".into()));
        }
        let r = self.radius();
        let outer = outer_cells(&proj, r);
        let mut a_heights: HashMap<Cell, Vec<i32>> = HashMap::new();
        for h in self.a.iter().filter(|h| h.is_horizontal()) {
            a_heights.entry(cell_of(h)).or_default().push(h.z());
        }
        let mut surface = Surface::new(r, self.a.iter().copied())?;
        let mut height_of: HashMap<Cell, i32> = HashMap::new();
        for c in square(r) {
            if proj.contains(&c) || height_of.contains_key(&c) {
                continue;
            }
            if outer.contains(&c) {
                surface.insert(Plaquette::horizontal(c.0, c.1, 0));
                continue;
            }
            // Flood the enclosed region containing c.
            let mut region = vec![c];
            let mut stack = vec![c];
            let mut seen: BTreeSet<Cell> = BTreeSet::from([c]);
            while let Some(x) = stack.pop() {
                for n in eight_neighbours(x) {
                    if !proj.contains(&n) && seen.insert(n) {
                        region.push(n);
                        stack.push(n);
                    }
                }
            }
            let heights: BTreeSet<i32> = region
                .iter()
                .flat_map(|x| four_neighbours(*x))
                .flat_map(|n| a_heights.get(&n).into_iter().flatten().copied())
                .collect();
            if heights.len() != 1 {
                return Err(Error::InvalidInterface(format!(
                    "enclosed region at {c:?} sees heights {heights:?}"
                )));
            }
            let t = *heights.first().unwrap();
            for x in region {
                height_of.insert(x, t);
                surface.insert(Plaquette::horizontal(x.0, x.1, t));
            }
        }
        Ok(surface)
    }

    /// Checks that this is a standard wall: its surface is an interface with
    /// exactly one wall, equal to `A ∪ B`, split correctly.
    pub fn validate(&self) -> Result<Surface> {
        let s = self.surface()?;
        if !s.is_one_connected() {
            return Err(Error::InvalidInterface("surface is not 1-connected".into()));
        }
        let an = analyse(&s);
        let all: BTreeSet<Plaquette> = self.plaquettes().copied().collect();
        if an.walls.len() != 1 || an.walls[0].plaquettes != all {
            return Err(Error::InvalidInterface("A ∪ B is not the unique wall".into()));
        }
        if an.walls[0].altitude != 0 || an.walls[0].base != Some(0) {
            return Err(Error::InvalidInterface("wall is not at altitude 0".into()));
        }
        if self.b.iter().any(|h| s.contains(h)) {
            return Err(Error::InvalidInterface("B meets the interface".into()));
        }
        Ok(s)
    }

    /// Names of the failed counting inequalities between `N`, `|π|`, `Π`,
    /// `|S|` and `D`.
    pub fn bound_failures(&self) -> Vec<&'static str> {
        let n = self.n() as i64;
        let pi = self.projection().len() as i64;
        let ex = self.excess();
        let mut out = Vec::new();
        if 13 * n < 14 * pi {
            out.push("N >= 14/13 |π|");
        }
        if 13 * ex < pi {
            out.push("Π >= |π|/13");
        }
        if 14 * ex < n {
            out.push("Π >= N/14");
        }
        if 5 * n < self.size() as i64 {
            out.push("N >= |S|/5");
        }
        if ex < self.height() as i64 {
            out.push("Π >= D");
        }
        out
    }
}

fn square(r: i32) -> impl Iterator<Item = Cell> {
    (-r..=r).flat_map(move |x| (-r..=r).map(move |y| (x, y)))
}

fn in_cylinder(e: &Edge, l: i32) -> bool {
    let (a, b) = e.endpoints();
    [a, b].iter().any(|v| v.x().abs() <= l && v.y().abs() <= l)
}

/// Standard walls indexed by their origins.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallFamily {
    pub l: i32,
    pub order: CellOrder,
    pub walls: BTreeMap<Cell, StandardWall>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AdmissibilityViolation {
    /// Projections of two walls share a point.
    Touching(Cell, Cell),
    /// A plaquette off the cylinder disagrees with the boundary condition.
    Boundary(Cell, Plaquette),
    NotStandard(Cell, String),
    WrongOrigin(Cell),
}

impl AdmissibilityViolation {
    pub fn clause(&self) -> &'static str {
        match self {
            AdmissibilityViolation::Touching(..) => "i",
            AdmissibilityViolation::Boundary(..) => "ii",
            AdmissibilityViolation::NotStandard(..) => "standard",
            AdmissibilityViolation::WrongOrigin(..) => "origin",
        }
    }
}

impl WallFamily {
    pub fn empty(l: i32, order: CellOrder) -> Self {
        WallFamily {
            l,
            order,
            walls: BTreeMap::new(),
        }
    }

    /// Indexes the walls by origin under `order`.
    pub fn from_walls(l: i32, order: CellOrder, walls: impl IntoIterator<Item = StandardWall>) -> Result<Self> {
        let mut f = WallFamily::empty(l, order);
        for w in walls {
            let o = w
                .origin(order)
                .ok_or_else(|| Error::InvalidInterface("wall without projection".into()))?;
            if f.walls.insert(o, w).is_some() {
                return Err(Error::Inadmissible(format!("two walls with origin {o:?}")));
            }
        }
        Ok(f)
    }

    pub fn len(&self) -> usize {
        self.walls.len()
    }

    pub fn is_empty(&self) -> bool {
        self.walls.is_empty()
    }

    pub fn violations(&self) -> Vec<AdmissibilityViolation> {
        let mut out = Vec::new();
        let entries: Vec<(&Cell, &StandardWall)> = self.walls.iter().collect();
        let projs: Vec<BTreeSet<Cell>> = entries.iter().map(|(_, w)| w.projection()).collect();
        for (k, (o, w)) in entries.iter().enumerate() {
            if let Err(e) = w.validate() {
                out.push(AdmissibilityViolation::NotStandard(**o, e.to_string()));
            }
            if w.origin(self.order) != Some(**o) {
                out.push(AdmissibilityViolation::WrongOrigin(**o));
            }
            for h in w.plaquettes() {
                let e = h.edge();
                if !in_cylinder(&e, self.l) && (w.a.contains(h) == mu(&e)) {
                    out.push(AdmissibilityViolation::Boundary(**o, *h));
                }
            }
            for (j, (o2, _)) in entries.iter().enumerate().skip(k + 1) {
                let touching = projs[k].iter().any(|c| {
                    eight_neighbours(*c)
                        .chain(std::iter::once(*c))
                        .any(|n| projs[j].contains(&n))
                });
                if touching {
                    out.push(AdmissibilityViolation::Touching(**o, **o2));
                }
            }
        }
        out
    }

    pub fn is_admissible(&self) -> bool {
        self.violations().is_empty()
    }
}

/// Splits a surface into its standard walls.
pub fn decompose(delta: &Surface, l: i32, order: CellOrder) -> Result<WallFamily> {
    decompose_analysed(delta, &analyse(delta), l, order)
}

/// [`decompose`] reusing an analysis of `delta`.
pub fn decompose_analysed(delta: &Surface, an: &Analysis, l: i32, order: CellOrder) -> Result<WallFamily> {
    let mut walls = Vec::new();
    for (k, w) in an.walls.iter().enumerate() {
        if w.base.is_none() {
            return Err(Error::InvalidInterface(format!("wall {k} has no unique base")));
        }
        let (a, b): (Vec<Plaquette>, Vec<Plaquette>) =
            w.plaquettes.iter().partition(|h| delta.contains(h));
        let s = -w.altitude;
        walls.push(StandardWall {
            a: a.iter().map(|h| h.translate([0, 0, s])).collect(),
            b: b.iter().map(|h| h.translate([0, 0, s])).collect(),
        });
    }
    WallFamily::from_walls(l, order, walls)
}

/// Rebuilds the surface of an admissible family. Walls are processed from
/// the smallest interior up; each is spliced into the smallest wall whose
/// interior contains its own, lifted to the height of the ceiling it lands
/// on, and the outermost walls are finally pasted into the regular
/// interface.
pub fn reconstruct(family: &WallFamily, radius: i32) -> Result<Surface> {
    if let Some(v) = family.violations().first() {
        return Err(Error::Inadmissible(format!("clause {}: {v:?}", v.clause())));
    }
    let walls: Vec<&StandardWall> = family.walls.values().collect();
    let origins: Vec<Cell> = family.walls.keys().copied().collect();
    let interiors: Vec<BTreeSet<Cell>> = walls.iter().map(|w| w.interior()).collect();
    let r = radius.max(interiors.iter().map(|i| cell_radius(i)).max().unwrap_or(0));
    let mut current: Vec<Surface> = walls
        .iter()
        .map(|w| w.surface().map(|s| s.widened(r)))
        .collect::<Result<_>>()?;
    let mut order: Vec<usize> = (0..walls.len()).collect();
    order.sort_by_key(|&i| (interiors[i].len(), family.order.key(origins[i])));

    let inside = |h: &Plaquette, cells: &BTreeSet<Cell>| {
        h.project().cells().iter().any(|c| cells.contains(c))
    };
    let mut result = Surface::flat(r);
    for (pos, &i) in order.iter().enumerate() {
        let int = &interiors[i];
        let container = order[pos + 1..]
            .iter()
            .copied()
            .find(|&k| int.is_subset(&interiors[k]));
        let piece: Vec<Plaquette> = current[i]
            .explicit()
            .iter()
            .filter(|h| inside(h, int))
            .copied()
            .collect();
        let target = match container {
            Some(k) => &mut current[k],
            None => &mut result,
        };
        let c = *int.first().unwrap();
        let heights = target.heights(c);
        if heights.len() != 1 {
            return Err(Error::Inadmissible(format!(
                "wall at {:?} lands on a cell carrying {} plaquettes",
                origins[i],
                heights.len()
            )));
        }
        let t = heights[0];
        for x in int {
            for z in target.heights(*x) {
                target.remove(&Plaquette::horizontal(x.0, x.1, z));
            }
        }
        for h in piece {
            target.insert(h.translate([0, 0, t]));
        }
    }
    Ok(result)
}

/// Number of plaquettes of the wall's own surface whose projection lies in
/// the closed cell `c`.
pub fn rho_table(wall: &StandardWall) -> Result<BTreeMap<Cell, usize>> {
    let s = wall.surface()?;
    Ok(wall.projection().into_iter().map(|c| (c, s.rho(c))).collect())
}

/// Whether two walls are close: some projected cells are nearer (in the
/// sup norm) than the sum of the square roots of their `ρ` values.
pub fn close(r1: &BTreeMap<Cell, usize>, r2: &BTreeMap<Cell, usize>) -> bool {
    r1.iter().any(|(c1, n1)| {
        r2.iter()
            .any(|(c2, n2)| (linf(*c1, *c2) as f64) < (*n1 as f64).sqrt() + (*n2 as f64).sqrt())
    })
}

/// A maximal set of walls linked by closeness.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WallGroup {
    pub origin: Cell,
    /// Origins of the member walls.
    pub members: Vec<Cell>,
    pub n: usize,
    pub projection: usize,
}

impl WallGroup {
    /// `Π(G)`, the summed excess of the members.
    pub fn excess(&self) -> i64 {
        self.n as i64 - self.projection as i64
    }
}

/// Groups of walls indexed by origin.
pub fn groups(family: &WallFamily) -> Result<BTreeMap<Cell, WallGroup>> {
    let entries: Vec<(Cell, &StandardWall)> = family.walls.iter().map(|(c, w)| (*c, w)).collect();
    let tables: Vec<BTreeMap<Cell, usize>> =
        entries.iter().map(|(_, w)| rho_table(w)).collect::<Result<_>>()?;
    let mut uf = crate::union_find::UnionFind::new(entries.len());
    for i in 0..entries.len() {
        for j in i + 1..entries.len() {
            if close(&tables[i], &tables[j]) {
                uf.union(i, j);
            }
        }
    }
    let mut members: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..entries.len() {
        members.entry(uf.find(i)).or_default().push(i);
    }
    let mut out = BTreeMap::new();
    for idx in members.into_values() {
        let cells: Vec<Cell> = idx.iter().map(|&i| entries[i].0).collect();
        let origin = family.order.earliest(cells.iter().copied()).unwrap();
        out.insert(
            origin,
            WallGroup {
                origin,
                members: cells,
                n: idx.iter().map(|&i| entries[i].1.n()).sum(),
                projection: idx.iter().map(|&i| entries[i].1.projection().len()).sum(),
            },
        );
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::interface::extract::tests::{bump_config, bump_into};
    use crate::interface::Interface;
    use crate::lattice::{BoxGeometry, EdgeConfiguration};

    fn bump_wall() -> StandardWall {
        let g = BoxGeometry::new(3, 3).unwrap();
        let d = Interface::extract(&bump_config(&g, (0, 0))).unwrap();
        let f = decompose(d.surface(), 3, CellOrder::Lexicographic).unwrap();
        assert_eq!(f.len(), 1);
        f.walls[&(-1, 0)].clone()
    }

    #[test]
    fn bump_standard_wall() {
        let w = bump_wall();
        assert_eq!(w.a.len(), 9);
        assert_eq!(w.b.len(), 5);
        assert_eq!(w.a.iter().filter(|h| !h.is_horizontal()).count(), 4);
        assert!(w.a.contains(&Plaquette::horizontal(0, 0, 1)));
        assert!(w.b.contains(&Plaquette::horizontal(0, 0, 0)));
        assert_eq!(w.n(), 9);
        assert_eq!(w.projection().len(), 5);
        assert_eq!(w.excess(), 4);
        assert_eq!(w.height(), 1);
        assert_eq!(w.origin(CellOrder::Lexicographic), Some((-1, 0)));
        assert_eq!(w.origin(CellOrder::Centred((0, 3))), Some((0, 1)));
        assert!(w.bound_failures().is_empty());
        w.validate().unwrap();
        let rho = rho_table(&w).unwrap();
        assert_eq!(rho[&(0, 0)], 5);
        assert_eq!(rho[&(1, 0)], 2);
    }

    #[test]
    fn regular_interface_is_the_empty_family() {
        let s = Surface::flat(4);
        let f = decompose(&s, 2, CellOrder::Lexicographic).unwrap();
        assert!(f.is_empty());
        assert_eq!(reconstruct(&f, 4).unwrap(), s);
    }

    #[test]
    fn bump_round_trip() {
        let g = BoxGeometry::new(3, 3).unwrap();
        let d = Interface::extract(&bump_config(&g, (0, 0))).unwrap();
        let f = decompose(d.surface(), 3, CellOrder::Lexicographic).unwrap();
        assert!(f.is_admissible());
        assert_eq!(&reconstruct(&f, 5).unwrap(), d.surface());
    }

    #[test]
    fn nested_walls_round_trip() {
        // A plateau of height 1 on the 7x7 block with a bump in its middle
        // ceiling.
        let g = BoxGeometry::new(5, 4).unwrap();
        let mut omega = EdgeConfiguration::flat(&g);
        for x in -3..=3 {
            for y in -3..=3 {
                bump_into(&mut omega, (x, y));
            }
        }
        let inside = |v: &crate::lattice::Vertex| v.z() == 1 && v.x().abs() <= 3 && v.y().abs() <= 3;
        for i in 0..g.num_edges() {
            let e = g.edge(i);
            let (a, b) = e.endpoints();
            if !e.is_vertical() && inside(&a) && inside(&b) {
                omega.set(i, true);
            }
        }
        // Bump on top of the plateau at the centre.
        let top = crate::lattice::Vertex::new(0, 0, 2);
        for (_, e) in top.neighbours() {
            omega.set(g.edge_index(&e).unwrap(), false);
        }
        omega.set(g.edge_index(&Edge::new(crate::lattice::Vertex::new(0, 0, 1), crate::lattice::Axis::Z)).unwrap(), true);
        let d = Interface::extract(&omega).unwrap();
        let f = decompose(d.surface(), 5, CellOrder::Lexicographic).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.is_admissible(), "{:?}", f.violations());
        let inner = f.walls.values().find(|w| w.projection().len() == 5).unwrap();
        assert_eq!(inner, &bump_wall());
        assert_eq!(&reconstruct(&f, 7).unwrap(), d.surface());

        // Dropping the outer wall lowers the bump onto the regular interface.
        let mut sub = f.clone();
        sub.walls.retain(|_, w| w.projection().len() == 5);
        let s = reconstruct(&sub, 7).unwrap();
        let again = decompose(&s, 5, CellOrder::Lexicographic).unwrap();
        assert_eq!(again, sub);
    }

    #[test]
    fn bump_groups() {
        let g = BoxGeometry::new(7, 3).unwrap();
        let mut omega = bump_config(&g, (0, 0));
        bump_into(&mut omega, (4, 0));
        let d = Interface::extract(&omega).unwrap();
        let f = decompose(d.surface(), 7, CellOrder::Lexicographic).unwrap();
        assert_eq!(f.len(), 2);
        assert!(f.is_admissible());
        let gs = groups(&f).unwrap();
        assert_eq!(gs.len(), 1);
        let g0 = &gs[&(-1, 0)];
        assert_eq!(g0.members.len(), 2);
        assert_eq!(g0.excess(), 8);

        let mut omega = bump_config(&g, (-5, 0));
        bump_into(&mut omega, (5, 0));
        let d = Interface::extract(&omega).unwrap();
        let f = decompose(d.surface(), 7, CellOrder::Lexicographic).unwrap();
        let gs = groups(&f).unwrap();
        assert_eq!(gs.len(), 2);
        assert!(gs.values().all(|g| g.members.len() == 1));
    }

    #[test]
    fn touching_walls_are_inadmissible() {
        let w = bump_wall();
        let mut f = WallFamily::empty(5, CellOrder::Lexicographic);
        f.walls.insert((-1, 0), w.clone());
        let moved = StandardWall {
            a: w.a.iter().map(|h| h.translate([3, 0, 0])).collect(),
            b: w.b.iter().map(|h| h.translate([3, 0, 0])).collect(),
        };
        f.walls.insert((2, 0), moved);
        let v = f.violations();
        assert_eq!(v, vec![AdmissibilityViolation::Touching((-1, 0), (2, 0))]);
        assert!(matches!(reconstruct(&f, 5), Err(Error::Inadmissible(_))));
    }

    #[test]
    fn boundary_clause() {
        // A bump centred outside the cylinder of radius 1.
        let w = bump_wall();
        let moved = StandardWall {
            a: w.a.iter().map(|h| h.translate([3, 0, 0])).collect(),
            b: w.b.iter().map(|h| h.translate([3, 0, 0])).collect(),
        };
        let f = WallFamily::from_walls(1, CellOrder::Lexicographic, [moved]).unwrap();
        assert!(f
            .violations()
            .iter()
            .any(|v| v.clause() == "ii"));
    }

    #[test]
    fn lifted_wall_is_not_standard() {
        let w = bump_wall().translate(1);
        assert!(w.validate().is_err());
    }
}
