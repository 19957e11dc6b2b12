//! Symmetric algebras on simplicial vector spaces, sphere algebras, their
//! homotopy, indecomposables, and the Hurewicz map.

pub mod cells;
pub mod homotopy;
pub mod sympow;

pub use cells::{sphere_cells, sphere_with_acyclic_cells, CellAlgebra};
pub use homotopy::{hurewicz, sphere_homotopy, HomotopyReport, HurewiczMap};
pub use sympow::{sphere_algebra, symmetric_power, WeightGradedAlgebra};
