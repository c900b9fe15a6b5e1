//! Gradient flow of the Gaussian area toward the equilibrium.

pub mod energy;
pub mod nonlinear;
pub mod run;
pub mod stepper;

pub use energy::{gauss, Compensated, EnergyForm, Evaluation};
pub use nonlinear::{apply_e, apply_e_with, mean_curvature, nonlinear_part};
pub use run::{
    compatibility_defect, cone_sup, gradient_max, make_initial, mirror_deviation, run_to_steady, write_history,
    DiagnosticsRecord, FlowConfig, FlowRun, InitialMode, Monotonicity, HISTORY_HEADER,
};
pub use stepper::{cfl_dt, FlowState, StepInfo, Stepper};
