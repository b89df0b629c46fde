//! Interfaces of Dobrushin configurations and their decomposition into
//! ceilings and walls.

mod classify;
mod extract;
mod surface;
mod walls;

pub use classify::{analyse, check_properties, distance_from_plane, Analysis, Ceiling, Violation, Wall};
pub use extract::{Interface, InterfaceDump, WINDOW_MARGIN};
pub use surface::{cell_of, linf, Cell, Surface};
pub use walls::{
    close, decompose, decompose_analysed, groups, reconstruct, rho_table, AdmissibilityViolation, CellOrder,
    StandardWall, WallFamily, WallGroup,
};
