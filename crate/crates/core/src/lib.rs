//! Solver and verification lab for the Dirichlet problem of rotationally
//! symmetric self-shrinkers outside a disk.

pub mod barriers;
pub mod config;
pub mod domain;
pub mod error;
pub mod flow;
pub mod linop;
pub mod pipeline;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
