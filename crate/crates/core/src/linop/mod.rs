//! The linearized operator L = Delta - xi.D + 1, its modal solutions and the
//! linear solution u_1.

pub mod linear;
pub mod mode;
pub mod operator;

pub use linear::{comparison_probe, estimate_k1, growth_ratio, solve_linear, LinearSolution, ModeProfile};
pub use mode::{bisect_nodes, solve_linear_mode, AngularSymbol, ModeAccuracy};
pub use operator::{apply_l, drift_upwind, LinearOperator, RadialOperator};
