//! Markov chain Monte Carlo for the conditioned measure.

pub mod chain;
pub mod connectivity;

pub use chain::{sample, Chain, Connectivity, Sample, SampleStream, SamplerConfig};
pub use connectivity::{reference_status, EdgeStatus, Searcher};
