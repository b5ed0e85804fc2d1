//! Discrete tomography on the integer lattice.

pub mod error;
pub mod grains;
pub mod guard;
pub mod image;
pub mod io;
pub mod lattice;
pub mod optim;
pub mod pte;
pub mod recon2;
pub mod reconm;
mod search;
pub mod superres;
pub mod switching;
pub mod tracking;
pub mod xray;

pub use error::{Error, Result};
pub use lattice::{canonical_direction, BoundingBox, Direction, Point, WeightedLatticeSet};
pub use xray::{grid, grid_in_box, xray, xray_difference, DataFunction, Instance, LineKey};
