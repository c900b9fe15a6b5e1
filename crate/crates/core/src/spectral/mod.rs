//! Spectrum of L on the full wedge: eigenvalues 1 - (kN + 2l), eigenfunctions
//! r^{kN} P_{k,l}(r^2) sin(kN theta), modal expansion and the Poincare ratio.

pub mod eigen;
pub mod expand;
pub mod laguerre;

pub use eigen::{verify_eigen, EigenPair};
pub use expand::{expand, poincare_ratio, random_compact_field, reconstruct, Expansion};
pub use laguerre::{gram_matrix, max_relative_offdiag, moment, orthogonal_family, MonicPoly, MAX_DEGREE};
