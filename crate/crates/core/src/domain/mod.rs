//! Sector grids, fields, boundary data, stencils and weighted quadrature.

pub mod boundary;
pub mod extension;
pub mod field;
pub mod grid;
pub mod quadrature;
pub mod stencil;

pub use boundary::BoundaryData;
pub use extension::{symmetry_deviation, PlaneExtension};
pub use field::Field;
pub use grid::{build_grid, SectorGrid, Spacing};
pub use quadrature::{sector_measure, WeightedNorms};
pub use stencil::{gradient_hessian, Derivatives, Stencils};
