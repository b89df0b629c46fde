//! Verification suites: exhaustive geometry checks, exact-engine identities,
//! Monte Carlo against exact tables, and the wall bijection on samples.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::exact::dominance::{eval_increasing, random_increasing};
use crate::exact::{
    check_dominance, column_bump_interface, compute_f, interface_probability_with, measure,
    Boundary, BoxInterfaces, Enumeration, FiniteModel,
};
use crate::interface::{analyse, check_properties, decompose, reconstruct, CellOrder, Interface};
use crate::lattice::{Axis, BoxGeometry, Edge, EdgeConfiguration, Vertex};
use crate::mc::{sample, Chain, SamplerConfig};
use crate::plaquette::{
    boundary_graph, check_splitting_set, connected_subsets_rooted, dual_window_plaquettes,
    finite_components, splitting_set, Plaquette, PlaquetteSet,
};

/// Failure messages kept per suite; the count is always exact.
const MAX_MESSAGES: usize = 20;

#[derive(Clone, Debug, Default, Serialize)]
pub struct SuiteReport {
    pub name: String,
    pub checked: u64,
    pub failed: u64,
    pub failures: Vec<String>,
    /// Named summary numbers (largest residuals, TV distances, ...).
    pub metrics: BTreeMap<String, f64>,
}

impl SuiteReport {
    pub fn new(name: &str) -> Self {
        SuiteReport {
            name: name.to_string(),
            ..Default::default()
        }
    }

    pub fn passed(&self) -> bool {
        self.failed == 0 && self.checked > 0
    }

    pub fn check(&mut self, ok: bool, what: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.fail(what());
        }
    }

    pub fn fail(&mut self, msg: String) {
        self.failed += 1;
        if self.failures.len() < MAX_MESSAGES {
            self.failures.push(msg);
        }
    }

    fn max_metric(&mut self, key: &str, v: f64) {
        let e = self.metrics.entry(key.to_string()).or_insert(f64::NEG_INFINITY);
        if v > *e || v.is_nan() {
            *e = v;
        }
    }

    fn merge(&mut self, other: SuiteReport) {
        self.checked += other.checked;
        self.failed += other.failed;
        for f in other.failures {
            if self.failures.len() < MAX_MESSAGES {
                self.failures.push(f);
            }
        }
        for (k, v) in other.metrics {
            self.max_metric(&k, v);
        }
    }

    pub fn summary(&self) -> String {
        let status = if self.passed() { "PASS" } else { "FAIL" };
        let metrics: Vec<String> = self.metrics.iter().map(|(k, v)| format!("{k}={v:.3e}")).collect();
        format!(
            "{status} {}: {} checks, {} failures{}{}",
            self.name,
            self.checked,
            self.failed,
            if metrics.is_empty() { "" } else { "; " },
            metrics.join(", ")
        )
    }
}

/// A connected edge set of `n` edges grown at random from the origin.
pub fn random_edge_set(n: usize, rng: &mut impl Rng) -> Vec<Edge> {
    let mut vertices = vec![Vertex::new(0, 0, 0)];
    let mut edges: Vec<Edge> = Vec::new();
    while edges.len() < n {
        let v = vertices[rng.random_range(0..vertices.len())];
        let axis = Axis::from_index(rng.random_range(0..3));
        let d = if rng.random_bool(0.5) { 1 } else { -1 };
        let w = v.offset(axis, d);
        let e = Edge::between(v, w).expect("unit step");
        if !edges.contains(&e) {
            edges.push(e);
            if !vertices.contains(&w) {
                vertices.push(w);
            }
        }
    }
    edges.sort();
    edges
}

fn random_boundary(rng: &mut impl Rng) -> Boundary {
    match rng.random_range(0..3) {
        0 => Boundary::Free,
        1 => Boundary::Wired,
        _ => Boundary::Dobrushin,
    }
}

pub const LOG_PARTITION_P: [f64; 3] = [0.3, 0.7, 0.95];
pub const LOG_PARTITION_Q: [f64; 4] = [1.0, 1.5, 2.0, 4.0];
/// Extra `q` below one, where the bound on `g` is reversed.
pub const SUBUNIT_Q: f64 = 0.5;

/// Sharp bound on `g` for a bridge: `ln(p + q(1-p))`, an upper bound when
/// `q >= 1` and a lower bound when `q < 1`.
pub fn bridge_g(p: f64, q: f64) -> f64 {
    (p + q * (1.0 - p)).ln()
}

/// One sweep over random models returning two reports: the identity
/// `log Z = k(ζ¹) log q + Σ g`, and the bound `0 <= g <= (1-p)(q-1)` for
/// `q >= 1`, with both inequalities reversed for `q = 1/2`.
pub fn log_partition_sweep(models: usize, max_edges: usize, seed: u64) -> Result<(SuiteReport, SuiteReport)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let specs: Vec<(Vec<Edge>, Boundary)> = (0..models)
        .map(|_| {
            let n = rng.random_range(4.min(max_edges)..=max_edges);
            (random_edge_set(n, &mut rng), random_boundary(&mut rng))
        })
        .collect();
    let parts: Vec<Result<(SuiteReport, SuiteReport)>> = specs
        .into_par_iter()
        .enumerate()
        .map(|(k, (edges, boundary))| {
            let mut id = SuiteReport::new("log-partition");
            let mut gb = SuiteReport::new("g-bound");
            let n = edges.len();
            let model = FiniteModel::new(edges, boundary.clone(), Vec::new(), 0.5, 1.0)?;
            let en = Enumeration::new(&model)?;
            let tag = |p: f64, q: f64| format!("model {k} ({boundary:?}, {n} edges) p={p} q={q}");
            for &p in &LOG_PARTITION_P {
                for q in LOG_PARTITION_Q.iter().copied().chain([SUBUNIT_Q]) {
                    let g: Vec<f64> = (0..n).map(|e| en.g(e, p, q)).collect();
                    let bound = (1.0 - p) * (q - 1.0);
                    let sharp = bridge_g(p, q);
                    for (e, &ge) in g.iter().enumerate() {
                        let (lo, hi) = if q >= 1.0 { (0.0, bound) } else { (bound, 0.0) };
                        let ok = ge >= lo - 1e-12 && ge <= hi + 1e-12;
                        gb.check(ok, || format!("{}: g({e})={ge} outside [{lo}, {hi}]", tag(p, q)));
                        let (slo, shi) = if q >= 1.0 { (0.0, sharp) } else { (sharp, 0.0) };
                        if ge < slo - 1e-12 || ge > shi + 1e-12 {
                            *gb.metrics.entry("sharp_bound_violations".into()).or_insert(0.0) += 1.0;
                        }
                        if !ok {
                            *gb.metrics.entry(format!("violations_q{q}")).or_insert(0.0) += 1.0;
                        }
                    }
                    if q == SUBUNIT_Q {
                        continue;
                    }
                    let log_z = en.partition_function(p, q, false).ln();
                    let res = (log_z - en.all_open_clusters as f64 * q.ln() - g.iter().sum::<f64>()).abs();
                    id.max_metric("max_residual", res);
                    id.check(res <= 1e-8, || format!("{}: residual {res:e}", tag(p, q)));
                }
            }
            gb.metrics.entry("sharp_bound_violations".into()).or_insert(0.0);
            Ok((id, gb))
        })
        .collect();
    let mut id = SuiteReport::new("log-partition");
    let mut gb = SuiteReport::new("g-bound");
    for p in parts {
        let (a, b) = p?;
        id.merge(a);
        for (k, v) in &b.metrics {
            if k.starts_with("violations") || k.starts_with("sharp") {
                *gb.metrics.entry(k.clone()).or_insert(0.0) += v;
            }
        }
        let mut b = b;
        b.metrics.clear();
        gb.merge(b);
    }
    Ok((id, gb))
}

/// Base points `(p, q)` of the dominance grid.
pub const DOMINANCE_GRID: [(f64, f64); 4] = [(0.3, 1.0), (0.5, 1.5), (0.7, 2.0), (0.9, 3.0)];

/// The two comparison inequalities, certified by a monotone coupling and
/// cross-checked on random increasing functions.
pub fn dominance_suite(models: usize, max_edges: usize, seed: u64) -> Result<SuiteReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SuiteReport::new("dominance");
    for k in 0..models {
        let n = rng.random_range(3.min(max_edges)..=max_edges);
        let edges = random_edge_set(n, &mut rng);
        let boundary = random_boundary(&mut rng);
        let base = FiniteModel::new(edges, boundary.clone(), Vec::new(), 0.5, 1.0)?;
        for &(p, q) in &DOMINANCE_GRID {
            // p' <= p, q' >= q, q' >= 1: the primed measure is smaller.
            let (p1, q1) = (p - 0.1, q + 1.0);
            // q' >= q >= 1 and p'/(q'(1-p')) >= p/(q(1-p)): the primed
            // measure is larger.
            let q2 = q + 1.0;
            let x = 1.05 * p * q2 / (q * (1.0 - p));
            let p2 = x / (1.0 + x);
            let pairs = [
                ("p'<=p,q'>=q", base.with_params(p1, q1), base.with_params(p, q)),
                ("p'/(q'(1-p'))>=p/(q(1-p))", base.with_params(p, q), base.with_params(p2, q2)),
            ];
            for (label, lower, upper) in pairs {
                let what = format!("model {k} ({boundary:?}, {n} edges) at ({p}, {q}) [{label}]");
                let certified = check_dominance(&lower, &upper)?;
                out.check(certified, || format!("{what}: no monotone coupling"));
                let reverse = check_dominance(&upper, &lower)?;
                out.check(!reverse, || format!("{what}: reverse coupling also exists"));
                let a = measure(&lower, false)?;
                let b = measure(&upper, false)?;
                let mut worst = f64::NEG_INFINITY;
                for _ in 0..1000 {
                    let f = random_increasing(n, &mut rng);
                    let ea = a.expectation(|w| eval_increasing(&f, w));
                    let eb = b.expectation(|w| eval_increasing(&f, w));
                    worst = worst.max(ea - eb);
                }
                out.check(worst <= 1e-12, || format!("{what}: increasing function violates order by {worst:e}"));
            }
        }
    }
    Ok(out)
}

/// Every connected vertex set of at most `max_size` vertices in the cube
/// `{0..side-1}^3` has a splitting set passing the independent check.
pub fn splitting_suite(side: i32, max_size: usize) -> Result<SuiteReport> {
    let verts: Vec<Vertex> = (0..side)
        .flat_map(|z| (0..side).flat_map(move |y| (0..side).map(move |x| Vertex::new(x, y, z))))
        .collect();
    assert!(verts.len() <= 128, "window too large for mask enumeration");
    let index: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let adj: Vec<Vec<usize>> = verts
        .iter()
        .map(|v| v.neighbours().filter_map(|(w, _)| index.get(&w).copied()).collect())
        .collect();
    let parts: Vec<SuiteReport> = (0..verts.len())
        .into_par_iter()
        .map(|root| {
            let mut r = SuiteReport::new("splitting-sets");
            connected_subsets_rooted(&adj, root, max_size, |mask, _| {
                let v: HashSet<Vertex> = (0..verts.len())
                    .filter(|&i| mask >> i & 1 == 1)
                    .map(|i| verts[i])
                    .collect();
                let verdict = splitting_set(&v).and_then(|q| check_splitting_set(&v, &q));
                match verdict {
                    Ok(c) => r.check(c.ok(), || format!("{:?}: {c:?}", sorted(&v))),
                    Err(e) => r.check(false, || format!("{:?}: {e}", sorted(&v))),
                }
            });
            r
        })
        .collect();
    let mut out = SuiteReport::new("splitting-sets");
    for p in parts {
        out.merge(p);
    }
    Ok(out)
}

fn sorted(v: &HashSet<Vertex>) -> Vec<[i32; 3]> {
    let mut s: Vec<[i32; 3]> = v.iter().map(|x| x.0).collect();
    s.sort();
    s
}

/// Masks of the window plaquettes containing each unit segment that is a
/// side of some window plaquette.
fn side_masks(list: &[Plaquette]) -> Vec<(u128, [u128; 4])> {
    let mut seg_index: HashMap<[i32; 3], usize> = HashMap::new();
    let mut sides = Vec::new();
    for h in list {
        let c = h.corners2();
        let mut mids = [0usize; 4];
        let mut k = 0;
        for i in 0..4 {
            for j in i + 1..4 {
                let differ = (0..3).filter(|&t| c[i][t] != c[j][t]).count();
                if differ == 1 {
                    let m = [c[i][0] + c[j][0], c[i][1] + c[j][1], c[i][2] + c[j][2]];
                    let n = seg_index.len();
                    mids[k] = *seg_index.entry(m).or_insert(n);
                    k += 1;
                }
            }
        }
        debug_assert_eq!(k, 4);
        sides.push(mids);
    }
    let mut masks = vec![0u128; seg_index.len()];
    for (i, s) in sides.iter().enumerate() {
        for &k in s {
            masks[k] |= 1u128 << i;
        }
    }
    sides.iter().enumerate().map(|(i, s)| (1u128 << i, s.map(|k| masks[k]))).collect()
}

/// Repeatedly drops plaquettes with a side shared by no other member. A
/// dropped plaquette separates two cubes that are already joined around
/// its free side, so the complement components are unchanged.
fn two_core(mut set: u128, sides: &[(u128, [u128; 4])]) -> u128 {
    loop {
        let mut next = set;
        let mut bits = set;
        while bits != 0 {
            let i = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            let (me, segs) = &sides[i];
            if segs.iter().any(|m| m & set == *me) {
                next &= !me;
            }
        }
        if next == set {
            return set;
        }
        set = next;
    }
}

/// For every 1-connected set of at most `max_size` plaquettes of the dual
/// window, each finite component of the complement has a connected boundary
/// graph.
pub fn boundary_graph_suite(max_size: usize) -> Result<SuiteReport> {
    let (list, adj) = dual_window_plaquettes();
    let sides = side_masks(&list);
    let enclosing = AtomicU64::new(0);
    let components = AtomicU64::new(0);
    let parts: Vec<SuiteReport> = (0..list.len())
        .into_par_iter()
        .map(|root| {
            let mut r = SuiteReport::new("boundary-graphs");
            connected_subsets_rooted(&adj, root, max_size, |mask, _| {
                r.checked += 1;
                if two_core(mask, &sides) == 0 {
                    return;
                }
                let delta: PlaquetteSet =
                    (0..list.len()).filter(|&i| mask >> i & 1 == 1).map(|i| list[i]).collect();
                let comps = finite_components(&delta);
                if comps.is_empty() {
                    return;
                }
                enclosing.fetch_add(1, Ordering::Relaxed);
                let bar = delta.extended();
                for c in comps {
                    components.fetch_add(1, Ordering::Relaxed);
                    match boundary_graph(&c, &bar, &delta, None) {
                        Ok(g) if g.connected => {}
                        Ok(_) => r.fail(format!("{:?}: boundary graph disconnected", delta_list(&delta))),
                        Err(e) => r.fail(format!("{:?}: {e}", delta_list(&delta))),
                    }
                }
            });
            r
        })
        .collect();
    let mut out = SuiteReport::new("boundary-graphs");
    for p in parts {
        out.merge(p);
    }
    out.metrics.insert("enclosing_sets".into(), enclosing.into_inner() as f64);
    out.metrics.insert("finite_components".into(), components.into_inner() as f64);
    Ok(out)
}

fn delta_list(d: &PlaquetteSet) -> Vec<[i32; 3]> {
    let mut v: Vec<[i32; 3]> = d.iter().map(|h| h.centre2()).collect();
    v.sort();
    v
}

pub const COLUMN_PARAMS: [(f64, f64); 4] = [(0.3, 1.0), (0.5, 1.5), (0.8, 2.0), (0.9, 4.0)];

/// The closed-form interface probability against enumeration, and the
/// f-term decomposition, on the single-column box.
pub fn interface_probability_suite() -> Result<SuiteReport> {
    let g = BoxGeometry::new(0, 1)?;
    let deltas = [("flat", Interface::regular(&g)), ("bump", column_bump_interface())];
    let mut out = SuiteReport::new("interface-probability");
    for &(p, q) in &COLUMN_PARAMS {
        let all = BoxInterfaces::new(&g, p, q)?;
        for (name, d) in &deltas {
            let r = interface_probability_with(&all, d)?;
            let err = r.relative_error();
            out.max_metric("max_relative_error", err);
            out.check(err <= 1e-10, || format!("{name} p={p} q={q}: relative error {err:e}"));
            let f = compute_f(d, p, q)?;
            let res = f.residual();
            out.max_metric("max_f_residual", res);
            out.check(res <= 1e-8, || format!("{name} p={p} q={q}: f-sum residual {res:e}"));
        }
    }
    Ok(out)
}

/// Parameters of the toy-model exactness test.
pub const COLUMN_MC_P: f64 = 0.95;
pub const COLUMN_MC_Q: f64 = 2.0;
pub const TV_CHECKPOINTS: [u64; 4] = [1_000, 10_000, 100_000, 1_000_000];

fn mask_of(omega: &EdgeConfiguration) -> usize {
    (0..omega.len()).filter(|&i| omega.get(i)).map(|i| 1usize << i).sum()
}

/// Empirical distribution of one long heat-bath run on the single-column
/// box against the exact conditioned table, at each checkpoint.
pub fn column_tv_curve(p: f64, q: f64, checkpoints: &[u64], seed: u64) -> Result<Vec<(u64, f64)>> {
    let g = BoxGeometry::new(0, 1)?;
    let exact = measure(&FiniteModel::dobrushin_box(&g, p, q)?, true)?;
    let mut chain = Chain::from_flat(&g, p, q, seed)?;
    let mut counts = vec![0u64; exact.probs.len()];
    let mut out = Vec::new();
    let mut done = 0u64;
    for &target in checkpoints {
        while done < target {
            chain.sweep();
            counts[mask_of(chain.state())] += 1;
            done += 1;
        }
        let emp: Vec<f64> = counts.iter().map(|&c| c as f64 / done as f64).collect();
        out.push((done, exact.total_variation(&emp)));
    }
    Ok(out)
}

pub fn mc_exactness_suite(seed: u64) -> Result<SuiteReport> {
    let mut out = SuiteReport::new("mc-exactness");
    let curve = column_tv_curve(COLUMN_MC_P, COLUMN_MC_Q, &TV_CHECKPOINTS, seed)?;
    for (n, tv) in &curve {
        out.metrics.insert(format!("tv_{n}"), *tv);
    }
    for w in curve.windows(2) {
        out.check(w[1].1 < w[0].1, || {
            format!("TV not decreasing: {:e} after {} sweeps, {:e} after {}", w[0].1, w[0].0, w[1].1, w[1].0)
        });
    }
    let (n, tv) = *curve.last().unwrap();
    out.check(tv <= 0.01, || format!("TV {tv:e} after {n} sweeps exceeds 0.01"));
    Ok(out)
}

/// Settings of the bijection suite.
#[derive(Clone, Debug)]
pub struct BijectionSpec {
    pub l: i64,
    pub m: i64,
    pub points: Vec<(f64, f64)>,
    pub samples: u64,
    pub burn_in: u64,
    pub interval: u64,
    pub seed: u64,
    /// Corrupts one plaquette of the stored copy of the sample with this
    /// index, as a negative control.
    pub inject: Option<u64>,
}

impl Default for BijectionSpec {
    fn default() -> Self {
        let points = [1.0, 2.0]
            .iter()
            .flat_map(|&q| [0.85, 0.90, 0.95].map(|p| (p, q)))
            .collect();
        BijectionSpec {
            l: 5,
            m: 5,
            points,
            samples: 10_000,
            burn_in: 200,
            interval: 5,
            seed: 7,
            inject: None,
        }
    }
}

/// Checks one sampled interface: the structural properties, the counting
/// bounds of each wall, admissibility of the wall family, and that the
/// stored copy decomposes and reconstructs to the original.
pub fn check_bijection(delta: &Interface, stored: &crate::interface::InterfaceDump, r: &mut SuiteReport, tag: &str) {
    let l = delta.geometry().l();
    let surface = delta.surface();
    let an = analyse(surface);
    for v in check_properties(surface, &an) {
        r.fail(format!("{tag}: clause ({}) {}", v.clause, v.detail));
    }
    r.checked += 1;
    let loaded = match Interface::from_dump(stored) {
        Ok(d) => d,
        Err(e) => {
            r.fail(format!("{tag}: stored interface rejected: {e}"));
            return;
        }
    };
    let family = match decompose(loaded.surface(), l, CellOrder::Lexicographic) {
        Ok(f) => f,
        Err(e) => {
            r.fail(format!("{tag}: decomposition failed: {e}"));
            return;
        }
    };
    for (o, w) in &family.walls {
        for b in w.bound_failures() {
            r.fail(format!("{tag}: wall at {o:?} violates {b}"));
        }
    }
    for v in family.violations() {
        r.fail(format!("{tag}: family inadmissible, clause {}: {v:?}", v.clause()));
    }
    match reconstruct(&family, surface.radius()) {
        Ok(back) => {
            let rad = back.radius().max(surface.radius());
            if back.widened(rad) != surface.widened(rad) {
                r.fail(format!("{tag}: reconstruct(decompose(δ)) differs from δ"));
            } else {
                match decompose(&back, l, CellOrder::Lexicographic) {
                    Ok(f2) if f2 == family => {}
                    _ => r.fail(format!("{tag}: decompose(reconstruct(F)) differs from F")),
                }
            }
        }
        Err(e) => r.fail(format!("{tag}: reconstruction failed: {e}")),
    }
}

pub fn bijection_suite(spec: &BijectionSpec) -> Result<SuiteReport> {
    let per_point = spec.samples.div_ceil(spec.points.len().max(1) as u64);
    let walls_seen = Mutex::new(0u64);
    let parts: Vec<Result<SuiteReport>> = spec
        .points
        .par_iter()
        .enumerate()
        .map(|(k, &(p, q))| {
            let mut r = SuiteReport::new("bijection");
            let config = SamplerConfig {
                l: spec.l,
                m: spec.m,
                p,
                q,
                seed: spec.seed.wrapping_add(k as u64),
                burn_in: spec.burn_in,
                interval: spec.interval,
                samples: per_point,
            };
            let mut walls = 0u64;
            for (i, s) in sample(&config)?.enumerate() {
                let global = k as u64 * per_point + i as u64;
                let delta = Interface::extract(&s.omega)?;
                let mut dump = delta.to_dump();
                if spec.inject == Some(global) && !dump.plaquettes.is_empty() {
                    let j = (global as usize * 7919) % dump.plaquettes.len();
                    dump.plaquettes.remove(j);
                }
                walls += analyse(delta.surface()).walls.len() as u64;
                check_bijection(&delta, &dump, &mut r, &format!("p={p} q={q} sample {i} (#{global})"));
            }
            *walls_seen.lock().unwrap() += walls;
            Ok(r)
        })
        .collect();
    let mut out = SuiteReport::new("bijection");
    for p in parts {
        out.merge(p?);
    }
    out.metrics.insert("walls".into(), walls_seen.into_inner().unwrap() as f64);
    Ok(out)
}

/// Names accepted by [`run_suite`].
pub const SUITES: [&str; 8] = [
    "log-partition",
    "g-bound",
    "dominance",
    "splitting-sets",
    "boundary-graphs",
    "interface-probability",
    "mc-exactness",
    "bijection",
];

/// Runs a named suite at its full size.
pub fn run_suite(name: &str, seed: u64, inject: Option<u64>) -> Result<SuiteReport> {
    run_suite_sized(name, seed, inject, false)
}

/// Runs a named suite, at a reduced size when `quick` is set.
pub fn run_suite_sized(name: &str, seed: u64, inject: Option<u64>, quick: bool) -> Result<SuiteReport> {
    match name {
        "log-partition" => Ok(log_partition_sweep(20, 12, seed)?.0),
        "g-bound" => Ok(log_partition_sweep(20, 12, seed)?.1),
        "dominance" => dominance_suite(10, 8, seed),
        "splitting-sets" if quick => splitting_suite(4, 5),
        "splitting-sets" => splitting_suite(5, 6),
        "boundary-graphs" => boundary_graph_suite(if quick { 6 } else { 8 }),
        "interface-probability" => interface_probability_suite(),
        "mc-exactness" => mc_exactness_suite(seed),
        "bijection" => {
            let mut spec = BijectionSpec {
                seed,
                inject,
                ..BijectionSpec::default()
            };
            if quick {
                spec.l = 3;
                spec.m = 3;
                spec.samples = 60;
                spec.burn_in = 20;
            }
            bijection_suite(&spec)
        }
        other => Err(crate::error::Error::InvalidModel(format!("unknown suite {other}"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_edge_sets_are_connected() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..12 {
            let e = random_edge_set(n, &mut rng);
            assert_eq!(e.len(), n);
            assert!(FiniteModel::free(e, 0.5, 1.0).is_ok());
        }
    }

    #[test]
    fn small_log_partition_run() {
        let (id, gb) = log_partition_sweep(3, 6, 1).unwrap();
        assert!(id.passed(), "{}", id.summary());
        assert_eq!(id.checked, 3 * 3 * 4);
        assert_eq!(gb.metrics["sharp_bound_violations"], 0.0);
        assert!(!gb.metrics.keys().any(|k| k.starts_with("violations_q") && k != "violations_q0.5"));
    }

    #[test]
    fn bridge_attains_the_sharp_bound() {
        // A single edge with free boundary is a bridge: P_r(open) is
        // r / (r + q(1-r)) and g integrates to ln(p + q(1-p)).
        let m = FiniteModel::free(vec![Edge::new(Vertex::new(0, 0, 0), Axis::X)], 0.5, 1.0).unwrap();
        let en = Enumeration::new(&m).unwrap();
        for (p, q) in [(0.3, 0.5), (0.7, 2.0), (0.95, 4.0)] {
            assert!((en.g(0, p, q) - bridge_g(p, q)).abs() < 1e-12);
        }
        // Below q = 1 the bridge lies under (1-p)(q-1).
        assert!(bridge_g(0.3, 0.5) < 0.7 * -0.5);
    }

    #[test]
    fn small_dominance_run() {
        let r = dominance_suite(2, 4, 2).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn small_splitting_run() {
        let r = splitting_suite(3, 4).unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn two_core_keeps_exactly_closed_surfaces() {
        let (list, adj) = dual_window_plaquettes();
        let sides = side_masks(&list);
        let mut with_core = 0;
        let mut count = 0;
        connected_subsets_rooted(&adj, 0, 6, |mask, _| {
            count += 1;
            let delta: PlaquetteSet =
                (0..list.len()).filter(|&i| mask >> i & 1 == 1).map(|i| list[i]).collect();
            let core = two_core(mask, &sides) != 0;
            assert_eq!(core, !finite_components(&delta).is_empty(), "{:?}", delta_list(&delta));
            with_core += core as usize;
        });
        assert!(count > 1000);
        // The only closed surface of six plaquettes is a unit cube.
        assert!(with_core <= 1);
    }

    #[test]
    fn small_boundary_graph_run_sees_cubes() {
        let r = boundary_graph_suite(6).unwrap();
        assert!(r.passed(), "{}", r.summary());
        // Each of the 27 unit cubes of the window is enclosed by one set.
        assert_eq!(r.metrics["enclosing_sets"], 27.0);
    }

    #[test]
    fn column_identities() {
        let r = interface_probability_suite().unwrap();
        assert!(r.passed(), "{}", r.summary());
    }

    #[test]
    fn short_bijection_run_and_injection() {
        let spec = BijectionSpec {
            l: 3,
            m: 3,
            points: vec![(0.8, 1.0), (0.9, 2.0)],
            samples: 40,
            burn_in: 20,
            interval: 2,
            seed: 5,
            inject: None,
        };
        let r = bijection_suite(&spec).unwrap();
        assert!(r.passed(), "{}", r.summary());
        let bad = bijection_suite(&BijectionSpec {
            inject: Some(3),
            ..spec
        })
        .unwrap();
        assert_eq!(bad.failed, 1, "{}", bad.summary());
        assert!(bad.failures[0].contains("#3"));
    }
}
