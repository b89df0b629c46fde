//! Structural invariants of interfaces drawn from the conditioned chain.

use proptest::prelude::*;

use rcinterface::interface::{
    analyse, check_properties, decompose, groups, reconstruct, CellOrder, Interface,
};
use rcinterface::mc::Chain;
use rcinterface::BoxGeometry;

fn sampled(l: i64, p: f64, q: f64, sweeps: u64, seed: u64) -> Interface {
    let g = BoxGeometry::new(l, l).unwrap();
    let mut c = Chain::from_flat(&g, p, q, seed).unwrap();
    c.run(sweeps);
    Interface::extract(c.state()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampled_interfaces_satisfy_the_structure_lemma(
        l in 1i64..=3, p in 0.55f64..0.97, q in prop::sample::select(vec![1.0, 2.0, 3.0]),
        sweeps in 1u64..25, seed in any::<u64>(),
    ) {
        let d = sampled(l, p, q, sweeps, seed);
        let s = d.surface();
        prop_assert!(s.is_one_connected());
        let a = analyse(s);
        let v = check_properties(s, &a);
        prop_assert!(v.is_empty(), "{:?}", v);
        for w in &a.walls {
            prop_assert!(w.projection.is_subset(&w.interior));
            prop_assert!(w.height >= 0);
        }
    }

    #[test]
    fn wall_families_round_trip(
        l in 1i64..=3, p in 0.55f64..0.97, sweeps in 1u64..25, seed in any::<u64>(),
        centred in any::<bool>(),
    ) {
        let d = sampled(l, p, 1.0, sweeps, seed);
        let order = if centred { CellOrder::Centred((1, -1)) } else { CellOrder::Lexicographic };
        let f = decompose(d.surface(), l as i32, order).unwrap();
        prop_assert!(f.is_admissible(), "{:?}", f.violations());
        for w in f.walls.values() {
            prop_assert!(w.bound_failures().is_empty(), "{:?}", w.bound_failures());
        }
        let back = reconstruct(&f, d.surface().radius()).unwrap();
        let r = back.radius().max(d.surface().radius());
        prop_assert_eq!(back.widened(r), d.surface().widened(r));
        let gs = groups(&f).unwrap();
        let members: usize = gs.values().map(|g| g.members.len()).sum();
        prop_assert_eq!(members, f.len());
        for g in gs.values() {
            prop_assert!(g.excess() >= 0);
            prop_assert!(g.members.contains(&g.origin));
        }
    }

    #[test]
    fn displacement_is_bounded_by_wall_heights(
        p in 0.6f64..0.95, sweeps in 1u64..20, seed in any::<u64>(),
    ) {
        let d = sampled(2, p, 1.0, sweeps, seed);
        let a = analyse(d.surface());
        let max_height = a.walls.iter().map(|w| w.altitude.abs() + w.height).max().unwrap_or(0);
        for x in -2..=2 {
            for y in -2..=2 {
                prop_assert!(d.displacement((x, y)) <= max_height);
            }
        }
    }
}
