//! Verification suites and Monte Carlo experiments for the conditioned
//! random-cluster interface, with JSON configuration and CSV output.

pub mod config;
pub mod experiments;
pub mod output;
pub mod stats;
pub mod verify;

pub use config::{ExperimentSpec, Kind, Point, SamplerSettings};
pub use experiments::{run_displacement, run_experiment, run_rigidity, run_wall_stats, Report};
pub use output::{csv_string, write_csv, ResultRow};
pub use verify::{run_verify, VerifyOptions};
