//! A-posteriori checks on computed solutions.

pub mod checks;
pub mod mcf;
pub mod report;
pub mod uniqueness;

pub use checks::{
    check_max_gradient_boundary, check_sandwich, check_symmetry, cone_decay, cone_refinement, gap_ratios,
    gap_sweep_entry, radial_derivative_gap,
};
pub use mcf::{mcf_consistency, McfConsistency};
pub use report::{ReportEntry, VerificationReport};
pub use uniqueness::{
    eta_surrogate, perturbed_initial, sample_radii, uniqueness_barrier, uniqueness_experiment, BarrierMargins,
    UniquenessOutcome,
};
