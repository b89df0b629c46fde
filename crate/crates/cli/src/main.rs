use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde_json::json;

use rcinterface::interface::{analyse, check_properties, decompose, groups, CellOrder, Interface};
use rcinterface::mc::{sample, SamplerConfig};
use rcinterface_cli::{run_experiment, run_verify, write_csv, ExperimentSpec, Kind, VerifyOptions};

#[derive(Parser)]
#[command(name = "rcinterface", version, about = "Interfaces of the conditioned random-cluster model")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the verification suites; exits nonzero on any failure.
    Verify {
        /// Run only these suites (repeatable).
        #[arg(long)]
        only: Vec<String>,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Corrupt one plaquette of the stored copy of this bijection sample.
        #[arg(long)]
        inject_failure: Option<u64>,
        /// Smaller instances of the slow suites.
        #[arg(long)]
        quick: bool,
    },
    /// Run the conditioned chain and write the interface of each sample.
    Sample {
        #[arg(long, default_value_t = 4)]
        l: i64,
        #[arg(long, default_value_t = 4)]
        m: i64,
        #[arg(long, default_value_t = 0.9)]
        p: f64,
        #[arg(long, default_value_t = 1.0)]
        q: f64,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        burn_in: u64,
        #[arg(long, default_value_t = 10)]
        interval: u64,
        #[arg(long, default_value_t = 10)]
        samples: u64,
        /// Directory for interface dumps; without it a summary per sample is printed.
        #[arg(long)]
        out_dir: Option<PathBuf>,
    },
    /// Describe the ceilings, walls and groups of a stored interface.
    AnalyzeInterface { dump: PathBuf },
    /// Run a sampling experiment and write its CSV table.
    Experiment {
        kind: ExperimentKind,
        #[arg(long)]
        config: Option<PathBuf>,
        /// Output file; standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long)]
        seed: Option<u64>,
        /// Print the effective configuration and exit.
        #[arg(long)]
        show_config: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ExperimentKind {
    Rigidity,
    Displacement,
    WallStats,
}

impl From<ExperimentKind> for Kind {
    fn from(k: ExperimentKind) -> Kind {
        match k {
            ExperimentKind::Rigidity => Kind::Rigidity,
            ExperimentKind::Displacement => Kind::Displacement,
            ExperimentKind::WallStats => Kind::WallStats,
        }
    }
}

fn configure_threads() -> Result<()> {
    if let Ok(v) = std::env::var("RCINTERFACE_THREADS") {
        let n: usize = v.parse().with_context(|| format!("RCINTERFACE_THREADS={v}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}

fn verify(opts: VerifyOptions) -> Result<bool> {
    let reports = run_verify(&opts, |r| {
        println!("{}", r.summary());
        for f in &r.failures {
            println!("  {f}");
        }
    })?;
    Ok(reports.iter().all(|r| r.passed()))
}

fn sample_cmd(config: SamplerConfig, out_dir: Option<PathBuf>) -> Result<()> {
    if let Some(dir) = &out_dir {
        std::fs::create_dir_all(dir)?;
    }
    for (i, s) in sample(&config)?.enumerate() {
        let delta = Interface::extract(&s.omega)?;
        match &out_dir {
            Some(dir) => delta.save(dir.join(format!("interface_{i:05}.json")))?,
            None => {
                let an = analyse(delta.surface());
                println!(
                    "sample {i} sweep {} plaquettes {} walls {} displacement {}",
                    s.sweep,
                    delta.surface().len(),
                    an.walls.len(),
                    delta.displacement((0, 0))
                );
            }
        }
    }
    Ok(())
}

fn analyze(path: PathBuf) -> Result<()> {
    let delta = Interface::load(&path).with_context(|| format!("loading {}", path.display()))?;
    let s = delta.surface();
    let an = analyse(s);
    let l = delta.geometry().l();
    let family = decompose(s, l, CellOrder::Lexicographic)?;
    let walls: Vec<_> = family
        .walls
        .iter()
        .map(|(o, w)| {
            json!({
                "origin": [o.0, o.1],
                "plaquettes": w.size(),
                "n": w.n(),
                "projection": w.projection().len(),
                "excess": w.excess(),
                "height": w.height(),
                "bound_failures": w.bound_failures(),
            })
        })
        .collect();
    let centred = decompose(s, l, CellOrder::Centred((0, 0)))?;
    let gs: Vec<_> = groups(&centred)?
        .values()
        .map(|g| json!({"origin": [g.origin.0, g.origin.1], "walls": g.members.len(), "excess": g.excess()}))
        .collect();
    let violations: Vec<String> = check_properties(s, &an)
        .iter()
        .map(|v| format!("({}) {}", v.clause, v.detail))
        .collect();
    let report = json!({
        "l": l,
        "m": delta.geometry().m(),
        "plaquettes": s.len(),
        "box_edges": delta.box_edges().len(),
        "k_delta": delta.k_delta(),
        "ceilings": an.ceilings.len(),
        "walls": walls,
        "groups": gs,
        "displacement_origin": delta.displacement((0, 0)),
        "h_connects_infinity": an.connects_to_infinity((0, 0), l),
        "property_violations": violations,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn experiment(
    kind: Kind,
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    show: bool,
) -> Result<()> {
    let mut spec = match &config {
        Some(path) => ExperimentSpec::load(path)?,
        None => ExperimentSpec::defaults(kind),
    };
    spec.kind = kind;
    if let Some(s) = seed {
        spec.seed = s;
    }
    spec.validate()?;
    if show {
        println!("{}", spec.to_json());
        return Ok(());
    }
    let report = run_experiment(&spec)?;
    for n in &report.notes {
        eprintln!("note: {n}");
    }
    match out {
        Some(path) => write_csv(&report.rows, std::fs::File::create(&path)?)?,
        None => write_csv(&report.rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn run() -> Result<bool> {
    configure_threads()?;
    match Cli::parse().command {
        Command::Verify {
            only,
            seed,
            inject_failure,
            quick,
        } => verify(VerifyOptions {
            only,
            seed,
            inject: inject_failure,
            quick,
        }),
        Command::Sample {
            l,
            m,
            p,
            q,
            seed,
            burn_in,
            interval,
            samples,
            out_dir,
        } => {
            let config = SamplerConfig {
                l,
                m,
                p,
                q,
                seed,
                burn_in,
                interval,
                samples,
            };
            sample_cmd(config, out_dir).map(|_| true)
        }
        Command::AnalyzeInterface { dump } => analyze(dump).map(|_| true),
        Command::Experiment {
            kind,
            config,
            out,
            seed,
            show_config,
        } => experiment(kind.into(), config, out, seed, show_config).map(|_| true),
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
