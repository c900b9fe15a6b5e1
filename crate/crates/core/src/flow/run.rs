use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::barriers::{trapping_violation, BarrierSet};
use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Derivatives, Stencils};
use crate::error::{Error, Result};
use crate::flow::nonlinear::{mean_curvature, nonlinear_part};
use crate::flow::stepper::{FlowState, Stepper};
use crate::linop::linear::LinearSolution;

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct FlowConfig {
    pub c_cfl: f64,
    pub tol_steady: f64,
    pub tau_max: f64,
    /// Convergence is not declared before this time.
    pub tau_min: f64,
    pub record_dtau: f64,
    /// Start of the monotonicity window; earlier steps carry the transient
    /// from the approximate compatibility of u_0.
    pub monotone_from: f64,
}

impl Default for FlowConfig {
    fn default() -> Self {
        Self { c_cfl: 0.4, tol_steady: 1e-8, tau_max: 30.0, tau_min: 0.0, record_dtau: 0.01, monotone_from: 0.1 }
    }
}

/// One row of the flow history.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct DiagnosticsRecord {
    pub tau: f64,
    #[serde(rename = "J")]
    pub j: f64,
    /// (J(u_{n+1}) - J(u_n)) / dtau for the step leaving this state.
    #[serde(rename = "dJdt_est")]
    pub djdt_est: f64,
    pub dissipation: f64,
    pub residual_inf: f64,
    pub grad_max: f64,
    pub grad_argmax_radius: f64,
    pub barrier_violation: f64,
    pub cone_sup: f64,
    pub symmetry_dev: f64,
}

pub const HISTORY_HEADER: &str =
    "tau,J,dissipation,residual_inf,grad_max,grad_argmax_radius,barrier_violation,cone_sup,symmetry_dev";

pub fn write_history<W: Write>(history: &[DiagnosticsRecord], mut w: W) -> Result<()> {
    writeln!(w, "{HISTORY_HEADER}")?;
    for d in history {
        writeln!(
            w,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            d.tau,
            d.j,
            d.dissipation,
            d.residual_inf,
            d.grad_max,
            d.grad_argmax_radius,
            d.barrier_violation,
            d.cone_sup,
            d.symmetry_dev
        )?;
    }
    Ok(())
}

/// Energy bookkeeping over the monotonicity window.
#[derive(Clone, Debug, Default, Serialize, Deserialize, PartialEq)]
pub struct Monotonicity {
    pub steps_checked: u64,
    /// Steps with J(u_{n+1}) > J(u_n).
    pub increases: u64,
    /// Steps whose increase exceeds 2 |dissipation| dtau^2.
    pub slack_violations: u64,
    pub worst_increase: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitialMode {
    Linear,
    Midpoint,
}

/// u_0 = u_1, or the barrier midpoint (u_+ + u_-)/2.
pub fn make_initial(sol: &LinearSolution, bs: Option<&BarrierSet>, mode: InitialMode) -> Result<Field> {
    match (mode, bs) {
        (InitialMode::Linear, _) => Ok(sol.field.clone()),
        (InitialMode::Midpoint, Some(b)) => b.plus.combine(0.5, &b.minus, 0.5),
        (InitialMode::Midpoint, None) => Err(Error::InvalidConfig("midpoint start needs barriers".into())),
    }
}

/// sup over the inner circle of |E(u) - L(u)|, the part of E(u_0) left
/// over when u_0 = u_1.
pub fn compatibility_defect(u: &Field, st: &Stencils) -> f64 {
    let nl = nonlinear_part(u, st);
    let nt = u.grid().ntheta();
    nl.data()[..nt].iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// (max |Du|, radius of the maximizer) over the whole grid.
pub fn gradient_max(u: &Field, d: &Derivatives) -> (f64, f64) {
    let g = u.grid();
    let nt = g.ntheta();
    let mut best = (0.0, g.r_inner());
    for k in 0..g.len() {
        let v = d.grad_norm2(k).sqrt();
        if v > best.0 {
            best = (v, g.r()[k / nt]);
        }
    }
    best
}

/// sup of |H| r over e (R + 1) <= r <= R_max / 2.
pub fn cone_sup(u: &Field, d: &Derivatives) -> f64 {
    let g = u.grid();
    let nt = g.ntheta();
    let lo = std::f64::consts::E * (g.r_inner() + 1.0);
    let hi = 0.5 * g.r_max();
    let mut best: f64 = 0.0;
    for (i, &r) in g.r().iter().enumerate() {
        if r < lo || r > hi {
            continue;
        }
        for j in 0..nt {
            best = best.max(mean_curvature(d, i * nt + j).abs() * r);
        }
    }
    best
}

/// Largest deviation of the sector field from its mirror image about the
/// sector midline and from zero on the edges.
pub fn mirror_deviation(u: &Field) -> f64 {
    let g = u.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let mut dev: f64 = 0.0;
    for i in 0..nr {
        dev = dev.max(u.at(i, 0).abs()).max(u.at(i, nt - 1).abs());
        for j in 0..nt / 2 {
            dev = dev.max((u.at(i, j) - u.at(i, nt - 1 - j)).abs());
        }
    }
    dev
}

#[derive(Clone, Debug)]
pub struct FlowRun {
    pub state: FlowState,
    pub history: Vec<DiagnosticsRecord>,
    pub converged: bool,
    pub residual: f64,
    pub monotonicity: Monotonicity,
    pub max_barrier_violation: f64,
    pub compat_defect: f64,
}

impl FlowRun {
    pub fn ensure_converged(&self) -> Result<()> {
        if self.converged {
            Ok(())
        } else {
            Err(Error::NotConverged { tau: self.state.tau, residual: self.residual })
        }
    }
}

fn record(
    state: &FlowState,
    stepper: &Stepper,
    st: &Stencils,
    bs: Option<&BarrierSet>,
    djdt: f64,
    dissipation: f64,
) -> DiagnosticsRecord {
    let d = gradient_hessian(&state.u, st);
    let (grad_max, rad) = gradient_max(&state.u, &d);
    DiagnosticsRecord {
        tau: state.tau,
        j: stepper.current().energy,
        djdt_est: djdt,
        dissipation,
        residual_inf: stepper.current().residual,
        grad_max,
        grad_argmax_radius: rad,
        barrier_violation: bs.map_or(0.0, |b| trapping_violation(state.u.data(), b)),
        cone_sup: cone_sup(&state.u, &d),
        symmetry_dev: mirror_deviation(&state.u),
    }
}

/// Integrates the flow from `u0` until the residual falls below
/// `tol_steady` (after `tau_min`) or `tau_max` is reached. `observer` sees
/// every accepted state. Non-convergence is reported through
/// `FlowRun::converged`; only a non-finite state is an error.
pub fn run_to_steady(
    u0: Field,
    st: &Stencils,
    bs: Option<&BarrierSet>,
    cfg: &FlowConfig,
    mut observer: impl FnMut(&FlowState),
) -> Result<FlowRun> {
    if !(cfg.tol_steady > 0.0 && cfg.tau_max > 0.0 && cfg.record_dtau > 0.0) {
        return Err(Error::InvalidConfig("tol_steady, tau_max and record_dtau must be positive".into()));
    }
    let grid = u0.grid_arc().clone();
    let compat_defect = compatibility_defect(&u0, st);
    let mut stepper = Stepper::new(grid, cfg.c_cfl, &u0)?;
    let mut state = FlowState::new(u0);
    let mut history = Vec::new();
    let mut mono = Monotonicity::default();
    let mut max_violation: f64 = bs.map_or(0.0, |b| trapping_violation(state.u.data(), b));
    let mut next_record = 0.0;
    let converged;
    loop {
        let residual = stepper.current().residual;
        // an exactly stationary state needs no settling time
        let done = residual <= cfg.tol_steady && (state.tau >= cfg.tau_min || residual == 0.0);
        if done || state.tau >= cfg.tau_max {
            converged = done;
            history.push(record(&state, &stepper, st, bs, 0.0, 0.0));
            break;
        }
        let at_record = state.tau >= next_record;
        let before = at_record.then(|| state.clone());
        let j_before = stepper.current().energy;
        let residual_before = residual;
        let info = stepper.step(&mut state, None)?;
        if let Some(s) = before {
            // the record describes the state before the step, with the step's
            // energy change
            let mut rec = record(&s, &stepper, st, bs, info.delta_j / info.dtau, info.dissipation);
            rec.j = j_before;
            rec.residual_inf = residual_before;
            history.push(rec);
            while next_record <= s.tau {
                next_record += cfg.record_dtau;
            }
        }
        if state.tau - info.dtau >= cfg.monotone_from {
            mono.steps_checked += 1;
            if info.delta_j > 0.0 {
                mono.increases += 1;
                mono.worst_increase = mono.worst_increase.max(info.delta_j);
                if info.delta_j > 2.0 * info.dissipation.abs() * info.dtau * info.dtau {
                    mono.slack_violations += 1;
                }
            }
        }
        if let Some(b) = bs {
            max_violation = max_violation.max(trapping_violation(state.u.data(), b));
        }
        observer(&state);
    }
    let residual = stepper.current().residual;
    Ok(FlowRun {
        state,
        history,
        converged,
        residual,
        monotonicity: mono,
        max_barrier_violation: max_violation,
        compat_defect,
    })
}
