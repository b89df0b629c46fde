//! Drives the verification suites of the core library.

use anyhow::{bail, Result};
use rcinterface::verify::{run_suite_sized, SuiteReport, SUITES};

#[derive(Clone, Debug, Default)]
pub struct VerifyOptions {
    /// Suites to run; all when empty.
    pub only: Vec<String>,
    pub seed: u64,
    /// Corrupts the stored copy of this bijection sample.
    pub inject: Option<u64>,
    /// Smaller instances, for smoke runs.
    pub quick: bool,
}

pub fn run_verify(opts: &VerifyOptions, mut progress: impl FnMut(&SuiteReport)) -> Result<Vec<SuiteReport>> {
    for name in &opts.only {
        if !SUITES.contains(&name.as_str()) {
            bail!("unknown suite {name}; available: {}", SUITES.join(", "));
        }
    }
    let mut out = Vec::new();
    for name in SUITES {
        if !opts.only.is_empty() && !opts.only.iter().any(|n| n == name) {
            continue;
        }
        let report = run_suite_sized(name, opts.seed, opts.inject, opts.quick)?;
        progress(&report);
        out.push(report);
    }
    Ok(out)
}
