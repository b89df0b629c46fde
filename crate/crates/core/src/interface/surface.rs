//! Plaquette sets that coincide with the regular interface outside a square
//! of cells.

use std::collections::{BTreeSet, HashMap, HashSet, VecDeque};

use crate::error::{Error, Result};
use crate::plaquette::Plaquette;

/// Planar cell `(x1, x2)`, identified with the horizontal plaquette of the
/// regular interface above it.
pub type Cell = (i32, i32);

pub fn cell_of(h: &Plaquette) -> Cell {
    let a = h.edge().a;
    (a.x(), a.y())
}

pub fn linf(a: Cell, b: Cell) -> i32 {
    (a.0 - b.0).abs().max((a.1 - b.1).abs())
}

pub fn four_neighbours(c: Cell) -> [Cell; 4] {
    [(c.0 - 1, c.1), (c.0 + 1, c.1), (c.0, c.1 - 1), (c.0, c.1 + 1)]
}

pub fn eight_neighbours(c: Cell) -> impl Iterator<Item = Cell> {
    (-1..=1)
        .flat_map(move |dx| (-1..=1).map(move |dy| (c.0 + dx, c.1 + dy)))
        .filter(move |&n| n != c)
}

/// Cells of `[-r, r]^2` not in `blocked` that are 0-connected (8-connected)
/// to the outer ring of that square.
pub fn outer_cells(blocked: &BTreeSet<Cell>, r: i32) -> HashSet<Cell> {
    let inside = |c: Cell| c.0.abs() <= r && c.1.abs() <= r;
    let mut seen = HashSet::new();
    let mut queue = VecDeque::new();
    for i in -r..=r {
        for c in [(i, -r), (i, r), (-r, i), (r, i)] {
            if !blocked.contains(&c) && seen.insert(c) {
                queue.push_back(c);
            }
        }
    }
    while let Some(c) = queue.pop_front() {
        for n in eight_neighbours(c) {
            if inside(n) && !blocked.contains(&n) && seen.insert(n) {
                queue.push_back(n);
            }
        }
    }
    seen
}

/// Radius of the smallest square of cells around the origin containing `cells`.
pub fn cell_radius<'a>(cells: impl IntoIterator<Item = &'a Cell>) -> i32 {
    cells
        .into_iter()
        .map(|c| c.0.abs().max(c.1.abs()))
        .max()
        .unwrap_or(0)
}

/// A plaquette set stored explicitly for plaquettes whose projection lies in
/// the square `[-radius, radius]^2` of cells, and equal to the regular
/// interface elsewhere.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Surface {
    radius: i32,
    set: HashSet<Plaquette>,
}

impl Surface {
    pub fn new(radius: i32, plaquettes: impl IntoIterator<Item = Plaquette>) -> Result<Self> {
        let mut s = Surface {
            radius,
            set: HashSet::new(),
        };
        for h in plaquettes {
            if !s.is_explicit(&h) {
                return Err(Error::InvalidInterface(format!(
                    "{h:?} lies outside the window of radius {radius}"
                )));
            }
            s.set.insert(h);
        }
        Ok(s)
    }

    pub fn flat(radius: i32) -> Self {
        let set = (-radius..=radius)
            .flat_map(|x| (-radius..=radius).map(move |y| Plaquette::horizontal(x, y, 0)))
            .collect();
        Surface { radius, set }
    }

    pub fn radius(&self) -> i32 {
        self.radius
    }

    pub fn in_window(&self, c: Cell) -> bool {
        c.0.abs() <= self.radius && c.1.abs() <= self.radius
    }

    /// Whether membership of `h` is stored rather than implied.
    pub fn is_explicit(&self, h: &Plaquette) -> bool {
        h.project().cells().iter().all(|&c| self.in_window(c))
    }

    pub fn contains(&self, h: &Plaquette) -> bool {
        if self.is_explicit(h) {
            self.set.contains(h)
        } else {
            h.is_horizontal() && h.z() == 0
        }
    }

    pub fn explicit(&self) -> &HashSet<Plaquette> {
        &self.set
    }

    pub fn sorted(&self) -> Vec<Plaquette> {
        let mut v: Vec<_> = self.set.iter().copied().collect();
        v.sort();
        v
    }

    pub fn len(&self) -> usize {
        self.set.len()
    }

    pub fn is_empty(&self) -> bool {
        self.set.is_empty()
    }

    pub(crate) fn insert(&mut self, h: Plaquette) {
        debug_assert!(self.is_explicit(&h));
        self.set.insert(h);
    }

    pub(crate) fn remove(&mut self, h: &Plaquette) -> bool {
        self.set.remove(h)
    }

    /// The same set stored over a larger square.
    pub fn widened(&self, radius: i32) -> Surface {
        let mut s = Surface {
            radius: radius.max(self.radius),
            set: self.set.clone(),
        };
        for x in -s.radius..=s.radius {
            for y in -s.radius..=s.radius {
                if !self.in_window((x, y)) {
                    s.set.insert(Plaquette::horizontal(x, y, 0));
                }
            }
        }
        s
    }

    /// Sorted heights of the horizontal members over `c`.
    pub fn heights(&self, c: Cell) -> Vec<i32> {
        if !self.in_window(c) {
            return vec![0];
        }
        self.columns().remove(&c).unwrap_or_default()
    }

    /// Sorted heights of horizontal members, per cell of the window.
    pub fn columns(&self) -> HashMap<Cell, Vec<i32>> {
        let mut out: HashMap<Cell, Vec<i32>> = HashMap::new();
        for h in self.set.iter().filter(|h| h.is_horizontal()) {
            out.entry(cell_of(h)).or_default().push(h.z());
        }
        for v in out.values_mut() {
            v.sort_unstable();
        }
        out
    }

    /// Number of members whose projection lies in the closed cell `c`: the
    /// horizontal ones above it and the vertical ones on its four sides.
    pub fn rho(&self, c: Cell) -> usize {
        if !self.in_window(c) {
            return 1;
        }
        let x2 = [2 * c.0, 2 * c.1];
        self.set
            .iter()
            .filter(|h| {
                let p = h.project().0;
                if h.is_horizontal() {
                    p == x2
                } else {
                    (p[0] - x2[0]).abs() + (p[1] - x2[1]).abs() == 1
                }
            })
            .count()
    }

    /// Largest vertical distance of the surface from the plane of the regular
    /// interface along the line through the centre of `c`.
    pub fn displacement(&self, c: Cell) -> i32 {
        self.heights(c).iter().map(|z| z.abs()).max().unwrap_or(0)
    }

    /// Members together with every plaquette 1-connected to an explicit member.
    pub fn extended_explicit(&self) -> HashSet<Plaquette> {
        let mut out = self.set.clone();
        for h in &self.set {
            out.extend(h.one_neighbours());
        }
        out
    }

    /// Members together with the horizontal plaquettes 1-connected to them.
    pub fn semi_extended(&self) -> Surface {
        let mut out = self.clone();
        for h in &self.set {
            for n in h.one_neighbours() {
                if n.is_horizontal() && self.is_explicit(&n) {
                    out.set.insert(n);
                }
            }
        }
        out
    }

    /// 1-connectedness of the whole (infinite) set. Explicit members with an
    /// implicit 1-neighbour are joined through the implicit part, which is
    /// itself 1-connected.
    pub fn is_one_connected(&self) -> bool {
        let Some(&start) = self.set.iter().next() else {
            return true;
        };
        let touches_outside =
            |h: &Plaquette| h.one_neighbours().any(|n| !self.is_explicit(&n) && self.contains(&n));
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        let mut outside_reached = false;
        let push_outside = |queue: &mut VecDeque<Plaquette>, seen: &mut HashSet<Plaquette>| {
            for h in self.set.iter().filter(|h| touches_outside(h)) {
                if seen.insert(*h) {
                    queue.push_back(*h);
                }
            }
        };
        while let Some(h) = queue.pop_front() {
            if !outside_reached && touches_outside(&h) {
                outside_reached = true;
                push_outside(&mut queue, &mut seen);
            }
            for n in h.one_neighbours() {
                if self.set.contains(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        seen.len() == self.set.len()
    }

    pub fn translate(&self, dz: i32) -> Surface {
        Surface {
            radius: self.radius,
            set: self.set.iter().map(|h| h.translate([0, 0, dz])).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Axis, Edge, Vertex};

    #[test]
    fn flat_surface_basics() {
        let s = Surface::flat(3);
        assert_eq!(s.len(), 49);
        assert!(s.contains(&Plaquette::horizontal(10, -20, 0)));
        assert!(!s.contains(&Plaquette::horizontal(10, -20, 1)));
        assert!(s.is_one_connected());
        for c in [(0, 0), (3, 3), (7, 0)] {
            assert_eq!(s.rho(c), 1);
            assert_eq!(s.displacement(c), 0);
        }
        assert_eq!(s.semi_extended(), s);
        assert_eq!(s.widened(5), Surface::flat(5));
    }

    #[test]
    fn vertical_plaquettes_count_towards_both_cells() {
        let mut s = Surface::flat(2);
        let v = Plaquette(Edge::new(Vertex::new(0, 0, 1), Axis::X));
        s.insert(v);
        assert_eq!(s.rho((0, 0)), 2);
        assert_eq!(s.rho((1, 0)), 2);
        assert_eq!(s.rho((0, 1)), 1);
    }

    #[test]
    fn detached_member_breaks_connectivity() {
        let mut s = Surface::flat(2);
        s.insert(Plaquette::horizontal(0, 0, 2));
        assert!(!s.is_one_connected());
    }

    #[test]
    fn outer_cells_skip_enclosed_region() {
        let ring: BTreeSet<Cell> = [(-1, -1), (-1, 0), (-1, 1), (0, -1), (0, 1), (1, -1), (1, 0), (1, 1)]
            .into_iter()
            .collect();
        let outer = outer_cells(&ring, 3);
        assert!(!outer.contains(&(0, 0)));
        assert_eq!(outer.len(), 49 - 9);
    }
}
