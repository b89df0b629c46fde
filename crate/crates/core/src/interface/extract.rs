//! The interface of a configuration: the maximal 1-connected set of open
//! plaquettes containing the regular interface off the box.

use std::collections::{HashSet, VecDeque};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::surface::{Cell, Surface};
use crate::error::{Error, Result};
use crate::lattice::{BoxGeometry, Edge, EdgeConfiguration, Vertex};
use crate::plaquette::Plaquette;

/// Margin of cells stored around the box.
pub const WINDOW_MARGIN: i32 = 2;

#[derive(Clone, Debug)]
pub struct Interface {
    geom: Arc<BoxGeometry>,
    surface: Surface,
}

impl PartialEq for Interface {
    fn eq(&self, other: &Self) -> bool {
        self.geom.l() == other.geom.l()
            && self.geom.m() == other.geom.m()
            && self.surface == other.surface
    }
}

/// Serialized form: box dimensions and the dual edges of the stored
/// plaquettes.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InterfaceDump {
    pub l: i64,
    pub m: i64,
    pub plaquettes: Vec<[[i32; 3]; 2]>,
}

impl Interface {
    pub fn extract(omega: &EdgeConfiguration) -> Result<Interface> {
        if omega.crossing_exists() {
            return Err(Error::CrossingPresent);
        }
        let geom = omega.geometry().clone();
        let r = geom.l() + WINDOW_MARGIN;
        let mut surface = Surface::new(r, [])?;
        let is_open = |h: &Plaquette| match geom.edge_index(&h.edge()) {
            Some(i) => !omega.get(i),
            None => h.is_horizontal() && h.z() == 0,
        };
        let mut queue = VecDeque::new();
        let mut seen = HashSet::new();
        for x in -r..=r {
            for y in -r..=r {
                if x.abs() > geom.l() || y.abs() > geom.l() {
                    let h = Plaquette::horizontal(x, y, 0);
                    seen.insert(h);
                    queue.push_back(h);
                }
            }
        }
        while let Some(h) = queue.pop_front() {
            surface.insert(h);
            for n in h.one_neighbours() {
                if surface.is_explicit(&n) && is_open(&n) && seen.insert(n) {
                    queue.push_back(n);
                }
            }
        }
        Ok(Interface { geom, surface })
    }

    pub fn regular(geom: &Arc<BoxGeometry>) -> Interface {
        Interface {
            geom: geom.clone(),
            surface: Surface::flat(geom.l() + WINDOW_MARGIN),
        }
    }

    /// Builds an interface from an explicit plaquette list, checking that it
    /// is the interface of the configuration it induces.
    pub fn from_plaquettes(
        geom: &Arc<BoxGeometry>,
        plaquettes: impl IntoIterator<Item = Plaquette>,
    ) -> Result<Interface> {
        let surface = Surface::new(geom.l() + WINDOW_MARGIN, plaquettes)?;
        Self::from_surface(geom, surface)
    }

    pub fn from_surface(geom: &Arc<BoxGeometry>, surface: Surface) -> Result<Interface> {
        let surface = surface.widened(geom.l() + WINDOW_MARGIN);
        if surface.radius() != geom.l() + WINDOW_MARGIN {
            return Err(Error::InvalidInterface("window wider than the box margin".into()));
        }
        for h in surface.explicit() {
            if !geom.contains_edge(&h.edge()) && !(h.is_horizontal() && h.z() == 0) {
                return Err(Error::InvalidInterface(format!(
                    "{h:?} is off the box and not in the regular interface"
                )));
            }
        }
        let candidate = Interface {
            geom: geom.clone(),
            surface,
        };
        let omega = candidate.omega_bar();
        let actual = Interface::extract(&omega)
            .map_err(|_| Error::InvalidInterface("induced configuration has a crossing".into()))?;
        if actual != candidate {
            return Err(Error::InvalidInterface(
                "not the interface of its induced configuration".into(),
            ));
        }
        Ok(candidate)
    }

    pub fn geometry(&self) -> &Arc<BoxGeometry> {
        &self.geom
    }

    pub fn surface(&self) -> &Surface {
        &self.surface
    }

    pub fn contains(&self, h: &Plaquette) -> bool {
        self.surface.contains(h)
    }

    /// Box edges dual to members.
    pub fn box_edges(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .surface
            .explicit()
            .iter()
            .filter_map(|h| self.geom.edge_index(&h.edge()))
            .collect();
        v.sort_unstable();
        v
    }

    /// Box edges dual to plaquettes 1-connected to the interface but not in it.
    pub fn fringe_edges(&self) -> Vec<usize> {
        let mut v: Vec<usize> = self
            .surface
            .extended_explicit()
            .iter()
            .filter(|h| !self.surface.contains(h))
            .filter_map(|h| self.geom.edge_index(&h.edge()))
            .collect();
        v.sort_unstable();
        v
    }

    /// Box edges whose plaquettes are not in the extended interface.
    pub fn free_edges(&self) -> Vec<usize> {
        let ext: HashSet<usize> = self
            .surface
            .extended_explicit()
            .iter()
            .filter_map(|h| self.geom.edge_index(&h.edge()))
            .collect();
        (0..self.geom.num_edges()).filter(|i| !ext.contains(i)).collect()
    }

    /// The largest configuration with this interface: box edges closed
    /// exactly on the interface.
    pub fn omega_bar(&self) -> EdgeConfiguration {
        let closed: HashSet<usize> = self.box_edges().into_iter().collect();
        EdgeConfiguration::from_fn(&self.geom, |i, _| !closed.contains(&i))
    }

    /// The smallest configuration with this interface: box edges open exactly
    /// on the fringe of the interface.
    pub fn omega_under(&self) -> EdgeConfiguration {
        let open: HashSet<usize> = self.fringe_edges().into_iter().collect();
        EdgeConfiguration::from_fn(&self.geom, |i, _| open.contains(&i))
    }

    /// Number of open clusters of the largest compatible configuration, the
    /// two outside clusters included.
    pub fn k_delta(&self) -> usize {
        self.omega_bar().cluster_count()
    }

    pub fn displacement(&self, c: Cell) -> i32 {
        self.surface.displacement(c)
    }

    pub fn to_dump(&self) -> InterfaceDump {
        InterfaceDump {
            l: self.geom.l() as i64,
            m: self.geom.m() as i64,
            plaquettes: self
                .surface
                .sorted()
                .iter()
                .map(|h| {
                    let (a, b) = h.edge().endpoints();
                    [a.0, b.0]
                })
                .collect(),
        }
    }

    pub fn from_dump(d: &InterfaceDump) -> Result<Interface> {
        let geom = BoxGeometry::new(d.l, d.m)?;
        let plaquettes = d
            .plaquettes
            .iter()
            .map(|[a, b]| {
                Edge::between(Vertex(*a), Vertex(*b))
                    .map(Plaquette)
                    .ok_or_else(|| Error::InvalidInterface(format!("{a:?}-{b:?} is not an edge")))
            })
            .collect::<Result<Vec<_>>>()?;
        Interface::from_plaquettes(&geom, plaquettes)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_dump())?)
    }

    pub fn from_json(s: &str) -> Result<Interface> {
        Interface::from_dump(&serde_json::from_str(s)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Interface> {
        Interface::from_json(&std::fs::read_to_string(path)?)
    }
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::lattice::Axis;

    /// Vertex (0,0,1) cut off from everything except the vertical below it.
    pub(crate) fn bump_config(geom: &Arc<BoxGeometry>, at: (i32, i32)) -> EdgeConfiguration {
        let mut omega = EdgeConfiguration::flat(geom);
        bump_into(&mut omega, at);
        omega
    }

    pub(crate) fn bump_into(omega: &mut EdgeConfiguration, at: (i32, i32)) {
        let geom = omega.geometry().clone();
        let v = Vertex::new(at.0, at.1, 1);
        for (_, e) in v.neighbours() {
            omega.set(geom.edge_index(&e).unwrap(), false);
        }
        omega.set(geom.edge_index(&Edge::new(Vertex::new(at.0, at.1, 0), Axis::Z)).unwrap(), true);
    }

    #[test]
    fn flat_configuration_gives_regular_interface() {
        let g = BoxGeometry::new(3, 2).unwrap();
        let d = Interface::extract(&EdgeConfiguration::flat(&g)).unwrap();
        assert_eq!(d, Interface::regular(&g));
        assert_eq!(d.box_edges().len(), 49);
        assert_eq!(d.k_delta(), 2);
    }

    #[test]
    fn crossing_is_rejected() {
        let g = BoxGeometry::new(1, 1).unwrap();
        assert!(matches!(
            Interface::extract(&EdgeConfiguration::all_open(&g)),
            Err(Error::CrossingPresent)
        ));
    }

    #[test]
    fn bump_interface() {
        let g = BoxGeometry::new(3, 3).unwrap();
        let d = Interface::extract(&bump_config(&g, (0, 0))).unwrap();
        let mut expected = Surface::flat(5);
        expected.remove(&Plaquette::horizontal(0, 0, 0));
        expected.insert(Plaquette::horizontal(0, 0, 1));
        for (_, e) in Vertex::new(0, 0, 1).neighbours() {
            if !e.is_vertical() {
                expected.insert(Plaquette(e));
            }
        }
        assert_eq!(d.surface(), &expected);
        assert!(d.surface().is_one_connected());
        assert_eq!(d.displacement((0, 0)), 1);
        assert_eq!(d.displacement((2, 0)), 0);
        // The isolated vertex (0,0,1) joins the lower cluster.
        assert_eq!(d.k_delta(), 2);
        assert!(!d.omega_bar().crossing_exists());
    }

    #[test]
    fn extraction_is_a_fixed_point_of_the_induced_configuration() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let g = BoxGeometry::new(2, 2).unwrap();
        let mut done = 0;
        while done < 200 {
            let omega = EdgeConfiguration::from_fn(&g, |_, _| rng.random_bool(0.4));
            let Ok(d) = Interface::extract(&omega) else {
                continue;
            };
            for i in d.box_edges() {
                assert!(!omega.get(i));
            }
            let bar = d.omega_bar();
            assert!(!bar.crossing_exists());
            assert!(omega.le(&bar));
            assert!(d.omega_under().le(&omega));
            assert_eq!(Interface::extract(&bar).unwrap(), d);
            assert_eq!(Interface::extract(&d.omega_under()).unwrap(), d);
            assert!(d.surface().is_one_connected());
            done += 1;
        }
    }

    #[test]
    fn dump_round_trip() {
        let g = BoxGeometry::new(2, 2).unwrap();
        let d = Interface::extract(&bump_config(&g, (1, -1))).unwrap();
        let back = Interface::from_json(&d.to_json().unwrap()).unwrap();
        assert_eq!(back, d);
    }

    #[test]
    fn corrupted_dump_is_rejected() {
        let g = BoxGeometry::new(2, 2).unwrap();
        let d = Interface::extract(&bump_config(&g, (0, 0))).unwrap();
        let mut dump = d.to_dump();
        dump.plaquettes.retain(|[a, b]| !(a == &[0, 0, 1] && b == &[0, 0, 2]));
        assert!(Interface::from_dump(&dump).is_err());
    }
}
