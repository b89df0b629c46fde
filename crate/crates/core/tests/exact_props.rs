//! Identities of the exact engine on random small models.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use rcinterface::exact::{check_dominance, g_all, verify_log_partition, Boundary, FiniteModel};
use rcinterface::plaquette::{check_splitting_set, splitting_set};
use rcinterface::verify::{bridge_g, random_edge_set};
use rcinterface::Vertex;

fn boundary(k: u8) -> Boundary {
    match k % 3 {
        0 => Boundary::Free,
        1 => Boundary::Wired,
        _ => Boundary::Dobrushin,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn log_partition_identity(
        n in 1usize..=10, seed in any::<u64>(), b in any::<u8>(),
        p in 0.05f64..0.99, q in 0.2f64..5.0,
    ) {
        let edges = random_edge_set(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = FiniteModel::new(edges, boundary(b), Vec::new(), p, q).unwrap();
        prop_assert!(verify_log_partition(&m).unwrap() <= 1e-8);
    }

    #[test]
    fn g_lies_between_zero_and_the_bridge_value(
        n in 1usize..=9, seed in any::<u64>(), b in any::<u8>(),
        p in 0.05f64..0.99, q in 0.2f64..5.0,
    ) {
        let edges = random_edge_set(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = FiniteModel::new(edges, boundary(b), Vec::new(), p, q).unwrap();
        let sharp = bridge_g(p, q);
        let (lo, hi) = if q >= 1.0 { (0.0, sharp) } else { (sharp, 0.0) };
        for g in g_all(&m).unwrap() {
            prop_assert!(g >= lo - 1e-12 && g <= hi + 1e-12, "g={} not in [{}, {}]", g, lo, hi);
        }
    }

    #[test]
    fn larger_p_dominates(
        n in 1usize..=7, seed in any::<u64>(), b in any::<u8>(),
        p in 0.05f64..0.9, dp in 0.01f64..0.09, q in 1.0f64..4.0, dq in 0.0f64..2.0,
    ) {
        let edges = random_edge_set(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let m = FiniteModel::new(edges, boundary(b), Vec::new(), p, q).unwrap();
        let lower = m.with_params(p, q + dq);
        let upper = m.with_params(p + dp, q);
        prop_assert!(check_dominance(&lower, &upper).unwrap());
    }

    #[test]
    fn splitting_sets_of_random_animals(n in 1usize..=10, seed in any::<u64>()) {
        let edges = random_edge_set(n, &mut ChaCha8Rng::seed_from_u64(seed));
        let v: std::collections::HashSet<Vertex> =
            edges.iter().flat_map(|e| [e.a, e.b()]).collect();
        let q = splitting_set(&v).unwrap();
        prop_assert!(check_splitting_set(&v, &q).unwrap().ok());
    }
}
