//! Exact computations on small finite models: partition functions, measures,
//! g-functions, stochastic domination and interface probabilities.

pub mod dominance;
pub mod enumerate;
pub mod interface_check;
pub mod model;
pub mod quadrature;

pub use dominance::{check_dominance, DOMINANCE_CAP};
pub use enumerate::{
    g_all, g_function, measure, partition_function, verify_log_partition, Enumeration,
    MeasureTable,
};
pub use interface_check::{
    column_bump_interface, compute_f, g_locality_table, interface_probability_check, interface_probability_with, local_edges,
    BoxInterfaces, nu, FDecomposition,
    InterfaceProbability, BOX_ENUMERATION_CAP,
};
pub use model::{Boundary, FiniteModel, Label, ModelDocument, DEFAULT_CAP};
