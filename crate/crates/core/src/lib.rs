//! Conditioned random-cluster model with Dobrushin boundary conditions on
//! finite boxes of the cubic lattice, and the geometry of its interface.

pub mod error;
pub mod exact;
pub mod interface;
pub mod lattice;
pub mod mc;
pub mod plaquette;
pub mod union_find;
pub mod verify;

pub use error::{Error, Result};
pub use lattice::{mu, Axis, BoxGeometry, Edge, EdgeConfiguration, Vertex};
