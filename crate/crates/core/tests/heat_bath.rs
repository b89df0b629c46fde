//! The conditioned heat-bath kernel on the single-column box, compared
//! state by state with the exact conditioned measure.

use std::collections::{HashSet, VecDeque};

use rcinterface::exact::{measure, FiniteModel};
use rcinterface::mc::{Chain, Connectivity};
use rcinterface::{BoxGeometry, EdgeConfiguration};

fn config(g: &std::sync::Arc<BoxGeometry>, mask: usize) -> EdgeConfiguration {
    EdgeConfiguration::from_fn(g, |i, _| mask >> i & 1 == 1)
}

#[test]
fn heat_bath_satisfies_detailed_balance() {
    let g = BoxGeometry::new(0, 1).unwrap();
    for (p, q) in [(0.6, 1.0), (0.95, 2.0), (0.3, 3.5)] {
        let pi = measure(&FiniteModel::dobrushin_box(&g, p, q).unwrap(), true).unwrap().probs;
        let n = g.num_edges();
        let mut checked = 0;
        for mask in 0..pi.len() {
            if pi[mask] == 0.0 {
                continue;
            }
            let mut chain = Chain::new(config(&g, mask), p, q, 0).unwrap();
            for e in 0..n {
                let (open, closed) = (mask | 1 << e, mask & !(1 << e));
                // Heat bath: P(open | rest) = π(ω^e) / (π(ω^e) + π(ω_e)).
                let expected = pi[open] / (pi[open] + pi[closed]);
                let got = chain.open_probability(e);
                assert!((got - expected).abs() < 1e-12, "p={p} q={q} mask={mask:b} e={e}: {got} vs {expected}");
                checked += 1;
            }
        }
        assert!(checked > 10_000);
    }
}

#[test]
fn admissible_states_are_connected_by_single_flips() {
    let g = BoxGeometry::new(0, 1).unwrap();
    let pi = measure(&FiniteModel::dobrushin_box(&g, 0.5, 2.0).unwrap(), true).unwrap().probs;
    let admissible: usize = pi.iter().filter(|&&w| w > 0.0).count();
    let start = (0..g.num_edges()).filter(|&i| EdgeConfiguration::flat(&g).get(i)).map(|i| 1usize << i).sum::<usize>();
    let mut seen = HashSet::from([start]);
    let mut queue = VecDeque::from([start]);
    while let Some(m) = queue.pop_front() {
        for e in 0..g.num_edges() {
            let next = m ^ (1 << e);
            if pi[next] > 0.0 && seen.insert(next) {
                queue.push_back(next);
            }
        }
    }
    assert_eq!(seen.len(), admissible);
    // The all-closed state is admissible and reached.
    assert!(seen.contains(&0));
}

#[test]
fn connectivity_routines_give_identical_trajectories() {
    let g = BoxGeometry::new(3, 3).unwrap();
    let mut a = Chain::from_flat(&g, 0.85, 2.0, 42).unwrap();
    let mut b = Chain::from_flat(&g, 0.85, 2.0, 42).unwrap().with_connectivity(Connectivity::Reference);
    for _ in 0..30 {
        a.sweep();
        b.sweep();
        assert_eq!(a.state(), b.state());
    }
}

#[test]
fn short_run_approaches_exact_table() {
    let curve = rcinterface::verify::column_tv_curve(0.9, 1.0, &[2_000, 200_000], 3).unwrap();
    assert!(curve[1].1 < curve[0].1);
    assert!(curve[1].1 < 0.05, "{curve:?}");
}
