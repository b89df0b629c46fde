//! Monte Carlo experiments on the conditioned measure: rigidity of the
//! interface at the origin, its displacement tail, and the excess of the
//! wall group based at the origin.

use std::collections::BTreeMap;

use anyhow::Result;
use rayon::prelude::*;
use rcinterface::interface::{analyse, decompose_analysed, groups, CellOrder, Interface};
use rcinterface::mc::Chain;
use rcinterface::{BoxGeometry, EdgeConfiguration, Vertex};

use crate::config::{ExperimentSpec, Kind, Point};
use crate::output::ResultRow;
use crate::stats::{estimate, log_linear_fit, Estimate};

/// Rows backed by fewer effective samples are withheld.
pub const MIN_EFFECTIVE: f64 = 100.0;

/// What is measured on one sampled configuration at the origin.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Observation {
    /// `(0,0,0)` is joined to the lower boundary.
    pub x_lower: bool,
    /// `(0,0,1)` is joined to the upper boundary.
    pub x_up_upper: bool,
    /// The regular-interface plaquette above the origin cell is a c-plaquette.
    pub h_c: bool,
    /// ... and is joined to infinity by c-plaquettes at height zero.
    pub h_infinity: bool,
    /// Displacement of the interface along the central column.
    pub displacement: i32,
    /// Excess of the wall group whose origin is the origin cell.
    pub pi_origin: Option<i64>,
}

pub fn observe(omega: &EdgeConfiguration, with_groups: bool) -> Result<Observation> {
    let geom = omega.geometry();
    let mut uf = omega.clusters();
    let x = geom.node_of(&Vertex::new(0, 0, 0));
    let y = geom.node_of(&Vertex::new(0, 0, 1));
    let x_lower = uf.connected(x, geom.bottom_node());
    let x_up_upper = uf.connected(y, geom.top_node());
    let delta = Interface::extract(omega)?;
    let surface = delta.surface();
    let an = analyse(surface);
    let h = rcinterface::plaquette::Plaquette::horizontal(0, 0, 0);
    let pi_origin = if with_groups {
        let family = decompose_analysed(surface, &an, geom.l(), CellOrder::Centred((0, 0)))?;
        let gs = groups(&family)?;
        Some(gs.get(&(0, 0)).map_or(0, |g| g.excess()))
    } else {
        None
    };
    Ok(Observation {
        x_lower,
        x_up_upper,
        h_c: an.is_c(&h),
        h_infinity: an.connects_to_infinity((0, 0), geom.l()),
        displacement: delta.displacement((0, 0)),
        pi_origin,
    })
}

/// Recorded observations of the replicas at one parameter point.
#[derive(Clone, Debug)]
pub struct Series {
    pub point: Point,
    pub replicas: Vec<Vec<Observation>>,
}

impl Series {
    pub fn estimate(&self, f: impl Fn(&Observation) -> f64) -> Estimate {
        let data: Vec<Vec<f64>> = self.replicas.iter().map(|r| r.iter().map(&f).collect()).collect();
        estimate(&data)
    }
}

pub fn run_chain(point: Point, spec: &ExperimentSpec, replica: u64, with_groups: bool) -> Result<Vec<Observation>> {
    let geom = BoxGeometry::new(point.l, point.m)?;
    let mut chain = Chain::from_flat(&geom, point.p, point.q, point.seed(spec.seed, replica))?;
    chain.run(spec.sampler.burn_in);
    let mut out = Vec::with_capacity(spec.sampler.samples as usize);
    for _ in 0..spec.sampler.samples {
        chain.run(spec.sampler.interval.max(1));
        out.push(observe(chain.state(), with_groups)?);
    }
    Ok(out)
}

/// Runs every (point, replica) chain in the global work pool.
pub fn simulate(spec: &ExperimentSpec, with_groups: bool) -> Result<Vec<Series>> {
    let points = spec.points();
    let tasks: Vec<(usize, u64)> = (0..points.len())
        .flat_map(|i| (0..spec.sampler.replicas).map(move |r| (i, r)))
        .collect();
    let results: Vec<Result<Vec<Observation>>> = tasks
        .par_iter()
        .map(|&(i, r)| run_chain(points[i], spec, r, with_groups))
        .collect();
    let mut series: Vec<Series> = points
        .iter()
        .map(|&point| Series {
            point,
            replicas: Vec::new(),
        })
        .collect();
    for ((i, _), res) in tasks.into_iter().zip(results) {
        series[i].replicas.push(res?);
    }
    Ok(series)
}

/// Rows of an experiment plus notes on anything withheld.
#[derive(Clone, Debug, Default)]
pub struct Report {
    pub rows: Vec<ResultRow>,
    pub notes: Vec<String>,
}

impl Report {
    fn push(&mut self, kind: Kind, point: Point, estimator: String, est: Estimate) {
        if est.effective < MIN_EFFECTIVE || !est.value.is_finite() {
            self.notes.push(format!(
                "{} p={} q={} L={} M={} {estimator}: {:.1} effective samples, row withheld",
                kind.name(),
                point.p,
                point.q,
                point.l,
                point.m,
                est.effective
            ));
            return;
        }
        self.rows.push(ResultRow {
            kind: kind.name().to_string(),
            point,
            estimator,
            estimate: est,
        });
    }

    fn finish(mut self) -> Report {
        self.rows.sort_by(|a, b| {
            a.point
                .key()
                .partial_cmp(&b.point.key())
                .unwrap()
                .then_with(|| a.estimator.cmp(&b.estimator))
        });
        self
    }

    pub fn find(&self, point: &Point, estimator: &str) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.point == *point && r.estimator == estimator)
    }
}

pub const RIGIDITY_ESTIMATORS: [&str; 4] = ["c_plaquette_origin", "h_connects_infinity", "x_lower", "x_up_upper"];

fn rigidity_value(name: &str, o: &Observation) -> f64 {
    let b = match name {
        "c_plaquette_origin" => o.h_c,
        "h_connects_infinity" => o.h_infinity,
        "x_lower" => o.x_lower,
        "x_up_upper" => o.x_up_upper,
        _ => unreachable!(),
    };
    b as u8 as f64
}

/// Connection and c-plaquette probabilities at the origin. For each
/// `(p, q, L)` with several heights, `m_gap:*` rows give the difference
/// between the tallest and the lowest box, with the combined error.
pub fn rigidity_report(series: &[Series]) -> Report {
    let mut rep = Report::default();
    for s in series {
        for name in RIGIDITY_ESTIMATORS {
            rep.push(Kind::Rigidity, s.point, name.to_string(), s.estimate(|o| rigidity_value(name, o)));
        }
    }
    let mut by_plq: BTreeMap<(u64, u64, i64), Vec<&Series>> = BTreeMap::new();
    for s in series {
        by_plq.entry((s.point.p.to_bits(), s.point.q.to_bits(), s.point.l)).or_default().push(s);
    }
    for group in by_plq.values() {
        let lo = group.iter().min_by_key(|s| s.point.m).unwrap();
        let hi = group.iter().max_by_key(|s| s.point.m).unwrap();
        if lo.point.m == hi.point.m {
            continue;
        }
        for name in RIGIDITY_ESTIMATORS {
            let a = lo.estimate(|o| rigidity_value(name, o));
            let b = hi.estimate(|o| rigidity_value(name, o));
            let gap = Estimate {
                value: b.value - a.value,
                stderr: (a.stderr.powi(2) + b.stderr.powi(2)).sqrt(),
                samples: a.samples.min(b.samples),
                effective: a.effective.min(b.effective),
            };
            if gap.value.abs() > 3.0 * gap.stderr {
                rep.notes.push(format!(
                    "rigidity p={} q={} L={}: {name} differs between M={} and M={} by {:.4} (> 3 se)",
                    hi.point.p, hi.point.q, hi.point.l, lo.point.m, hi.point.m, gap.value
                ));
            }
            rep.push(Kind::Rigidity, hi.point, format!("m_gap:{name}"), gap);
        }
    }
    rep.finish()
}

/// Empirical tail `P(D >= d)` at the central column for `d = 1..=d_max`
/// and a log-linear fit over the tail points with enough mass.
pub fn displacement_report(series: &[Series], d_max: i32, min_events: f64) -> Report {
    let mut rep = Report::default();
    for s in series {
        let tail: Vec<(f64, Estimate)> = (1..=d_max)
            .map(|d| (d as f64, s.estimate(|o| (o.displacement >= d) as u8 as f64)))
            .collect();
        for (d, e) in &tail {
            rep.push(Kind::Displacement, s.point, format!("tail_ge_{:02}", *d as i32), *e);
        }
        let base = tail[0].1;
        match log_linear_fit(&tail, min_events) {
            Some(fit) => {
                let est = |v: f64| Estimate {
                    value: v,
                    stderr: fit.slope_se,
                    samples: base.samples,
                    effective: base.effective,
                };
                rep.push(Kind::Displacement, s.point, "tail_slope".into(), est(fit.slope));
                rep.push(Kind::Displacement, s.point, "alpha_hat".into(), est(-fit.slope));
            }
            None => rep.notes.push(format!(
                "displacement p={} q={} L={} M={}: insufficient tail mass for a fit",
                s.point.p, s.point.q, s.point.l, s.point.m
            )),
        }
    }
    rep.finish()
}

/// Distribution of `Π` of the group based at the origin cell and the slope
/// of `log P(Π = k)` against `k`.
pub fn wall_report(series: &[Series], min_events: f64) -> Report {
    let mut rep = Report::default();
    for s in series {
        let kmax = s.replicas.iter().flatten().filter_map(|o| o.pi_origin).max().unwrap_or(0);
        let mut hist = Vec::new();
        for k in 0..=kmax {
            let e = s.estimate(|o| (o.pi_origin == Some(k)) as u8 as f64);
            if e.value > 0.0 {
                rep.push(Kind::WallStats, s.point, format!("pi_eq_{k:03}"), e);
                hist.push((k as f64, e));
            }
        }
        let mean = s.estimate(|o| o.pi_origin.unwrap_or(0) as f64);
        rep.push(Kind::WallStats, s.point, "pi_mean".into(), mean);
        match log_linear_fit(&hist, min_events) {
            Some(fit) => rep.push(
                Kind::WallStats,
                s.point,
                "pi_slope".into(),
                Estimate {
                    value: fit.slope,
                    stderr: fit.slope_se,
                    samples: mean.samples,
                    effective: mean.effective,
                },
            ),
            None => rep.notes.push(format!(
                "wall-stats p={} q={} L={} M={}: too few distinct Π values for a fit",
                s.point.p, s.point.q, s.point.l, s.point.m
            )),
        }
    }
    rep.finish()
}

pub fn run_rigidity(spec: &ExperimentSpec) -> Result<Report> {
    Ok(rigidity_report(&simulate(spec, false)?))
}

pub fn run_displacement(spec: &ExperimentSpec) -> Result<Report> {
    Ok(displacement_report(&simulate(spec, false)?, spec.d_max, spec.min_fit_events))
}

pub fn run_wall_stats(spec: &ExperimentSpec) -> Result<Report> {
    Ok(wall_report(&simulate(spec, true)?, spec.min_fit_events))
}

pub fn run_experiment(spec: &ExperimentSpec) -> Result<Report> {
    match spec.kind {
        Kind::Rigidity => run_rigidity(spec),
        Kind::Displacement => run_displacement(spec),
        Kind::WallStats => run_wall_stats(spec),
        Kind::Verify => anyhow::bail!("verify is not a sampling experiment"),
    }
}
