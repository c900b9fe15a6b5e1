//! grid -> f^ -> u_1 -> K1 -> eps_max -> f -> barriers -> flow -> checks.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::{Arc, Mutex};

use serde::Serialize;

use crate::barriers::{certify, make_barriers, admissible_epsilon, BarrierCertificate, BarrierSet, K1_SAFETY};
use crate::config::{Scaling, SolverConfig};
use crate::domain::boundary::BoundaryData;
use crate::domain::extension::PlaneExtension;
use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::domain::stencil::Stencils;
use crate::error::{Error, Result};
use crate::flow::nonlinear::apply_e;
use crate::flow::run::{make_initial, run_to_steady, FlowRun};
use crate::flow::stepper::FlowState;
use crate::linop::linear::{estimate_k1, solve_linear, LinearSolution};
use crate::linop::mode::{AngularSymbol, ModeAccuracy};
use crate::linop::operator::LinearOperator;
use crate::verify::checks::{
    check_max_gradient_boundary, check_sandwich, check_symmetry, cone_decay, radial_derivative_gap,
};
use crate::verify::mcf::mcf_consistency;
use crate::verify::report::{ReportEntry, VerificationReport};
use crate::verify::uniqueness::{eta_surrogate, sample_radii, uniqueness_barrier};

/// Exponent of the comparison function used by the single-run check.
pub const UNIQUENESS_ALPHA: f64 = 1.12;
pub const UNIQUENESS_SAMPLES: usize = 10_000;

/// Everything computed before the flow starts.
#[derive(Clone, Debug)]
pub struct Problem {
    pub config: SolverConfig,
    pub grid: Arc<SectorGrid>,
    pub stencils: Stencils,
    pub op: LinearOperator,
    pub shape: BoundaryData,
    /// Measured gradient bound of u_1 per unit eps; None for zero data.
    pub k1_est: Option<f64>,
    pub k1: Option<f64>,
    pub eps_max: Option<f64>,
    pub linear: LinearSolution,
    pub barriers: Option<BarrierSet>,
    pub certificate: Option<BarrierCertificate>,
}

pub fn prepare(cfg: &SolverConfig) -> Result<Problem> {
    cfg.validate()?;
    let grid = Arc::new(cfg.grid()?);
    let stencils = Stencils::new(&grid)?;
    let op = LinearOperator::new(&grid);
    let shape = cfg.shape()?;
    let symbol = AngularSymbol::for_grid(&grid);
    let solve = |f: &BoundaryData| solve_linear(&grid, f, symbol, ModeAccuracy::Grid);
    let (mut k1_est, mut k1, mut eps_max) = (None, None, None);
    let linear = if shape.is_zero() {
        solve(&shape)?
    } else {
        let s0 = solve(&shape)?;
        let est = estimate_k1(&s0, &stencils)?;
        let kk = K1_SAFETY * est;
        let emax = admissible_epsilon(kk, cfg.r0)?;
        let f = match cfg.scaling() {
            Scaling::Absolute(s) => shape.scaled(s),
            Scaling::Fraction(q) => shape.scaled(q * emax / shape.c4_norm()),
        };
        if f.c4_norm() > emax && !cfg.force {
            return Err(Error::Inadmissible { eps: f.c4_norm(), eps_max: emax });
        }
        (k1_est, k1, eps_max) = (Some(est), Some(kk), Some(emax));
        solve(&f)?
    };
    let (barriers, certificate) = match (cfg.barriers, k1) {
        (true, Some(kk)) if linear.eps > 0.0 => {
            let bs = make_barriers(&linear, kk, cfg.r0, cfg.force)?;
            let cert = certify(&bs, &op, &stencils);
            (Some(bs), Some(cert))
        }
        _ => (None, None),
    };
    Ok(Problem { config: cfg.clone(), grid, stencils, op, shape, k1_est, k1, eps_max, linear, barriers, certificate })
}

impl Problem {
    pub fn initial(&self) -> Result<Field> {
        make_initial(&self.linear, self.barriers.as_ref(), self.config.initial)
    }

    /// Runs the flow from the configured initial state.
    pub fn solve(&self, observer: impl FnMut(&FlowState)) -> Result<FlowRun> {
        run_to_steady(self.initial()?, &self.stencils, self.barriers.as_ref(), &self.config.flow(), observer)
    }

    /// G = sup over r = R of |D_r u - D_r u_1|.
    pub fn gap(&self, u: &Field) -> Result<f64> {
        radial_derivative_gap(u, &self.linear, &self.stencils)
    }

    /// Checks that need a single completed run.
    pub fn verify(&self, run: &FlowRun) -> Result<VerificationReport> {
        let cfg = &self.config;
        let u = &run.state.u;
        let g = &self.grid;
        let h2 = g.h() * g.h();
        let mut rep = VerificationReport::new(serde_json::to_value(cfg).expect("config serializes"));
        let mut put = |name: &str, e: ReportEntry| {
            if cfg.wants(name) {
                rep.insert(name, e);
            }
        };
        put("residual", ReportEntry::at_most(run.residual, cfg.tol_steady));
        put("stencil_residual", ReportEntry::at_most(apply_e(u, &self.op, &self.stencils).max_abs(), 10.0 * h2));
        put("compatibility_defect", ReportEntry::at_most(run.compat_defect, 10.0 * h2));
        put("energy_increases", ReportEntry::at_most(run.monotonicity.increases as f64, 0.0));
        if let Some(bs) = &self.barriers {
            let mut e = check_sandwich(u, bs)?;
            e.value = e.value.max(run.max_barrier_violation);
            e.pass = e.value <= e.threshold;
            put("sandwich", e);
        }
        if let Some(c) = &self.certificate {
            put("barrier_certificate", ReportEntry::at_most(c.max_e_plus.max(-c.min_e_minus), c.tol));
        }
        put("max_gradient_boundary", check_max_gradient_boundary(u, &self.stencils));
        put("cone_decay", cone_decay(u, &self.stencils));
        put("symmetry", check_symmetry(u));
        put("mcf_consistency", mcf_consistency(u, &self.stencils)?.entry);
        if g.r_inner() > 0.5 * 3f64.sqrt() {
            let eta = eta_surrogate(u, &self.stencils);
            let eta_max = (UNIQUENESS_ALPHA - 1.0) * 3f64.sqrt() / 4.0;
            put("uniqueness_eta", ReportEntry::at_most(eta, eta_max));
            if eta < eta_max {
                let samples = sample_radii(g.r_inner(), g.r_max(), UNIQUENESS_SAMPLES);
                put("uniqueness_barrier", uniqueness_barrier(UNIQUENESS_ALPHA, eta, g.r_inner(), &samples)?.entry);
            }
        }
        Ok(rep)
    }
}

/// Parameters a sweep can vary.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParam {
    EpsFraction,
    EpsScale,
    /// Radial nodes only.
    Nr,
    /// nr with ntheta = (nr - 1)/4 + 1.
    Resolution,
    /// Outer radius with nr chosen to keep the radial step.
    RMax,
}

impl std::str::FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "eps_fraction" => Self::EpsFraction,
            "eps_scale" => Self::EpsScale,
            "nr" => Self::Nr,
            "resolution" => Self::Resolution,
            "R_max" | "r_max" => Self::RMax,
            _ => return Err(Error::InvalidConfig(format!("unknown sweep parameter {s:?}"))),
        })
    }
}

impl SweepParam {
    pub fn apply(&self, base: &SolverConfig, v: f64) -> Result<SolverConfig> {
        let mut c = base.clone();
        let count = |v: f64| -> Result<usize> {
            if v >= 4.0 && v.fract() == 0.0 {
                Ok(v as usize)
            } else {
                Err(Error::InvalidConfig(format!("{v} is not a node count")))
            }
        };
        match self {
            Self::EpsFraction => (c.eps_fraction, c.eps_scale) = (Some(v), None),
            Self::EpsScale => (c.eps_scale, c.eps_fraction) = (Some(v), None),
            Self::Nr => c.nr = count(v)?,
            Self::Resolution => {
                c.nr = count(v)?;
                c.ntheta = (c.nr - 1) / 4 + 1;
            }
            Self::RMax => {
                let steps = (base.nr - 1) as f64 * (v / base.r_inner).ln() / (base.r_max / base.r_inner).ln();
                c.r_max = v;
                c.nr = steps.round() as usize + 1;
            }
        }
        Ok(c)
    }
}

/// One row of a sweep; failed runs carry the error and NaN values.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub nr: usize,
    pub ntheta: usize,
    pub eps: f64,
    pub converged: bool,
    pub steps: u64,
    pub tau: f64,
    pub residual: f64,
    pub stencil_residual: f64,
    pub gap: f64,
    pub grad_max: f64,
    pub cone_sup: f64,
    /// Ratio of the previous row's gap (or stencil residual, for resolution
    /// sweeps) to this row's.
    pub order: f64,
    /// sup over r <= cut of the difference to the previous row's field.
    pub drift: f64,
    pub error: Option<String>,
}

pub const SWEEP_HEADER: &str =
    "value,nr,ntheta,eps,converged,steps,tau,residual,stencil_residual,gap,grad_max,cone_sup,order,drift,error";

impl SweepRow {
    pub fn csv(&self) -> String {
        let f = |x: f64| format!("{x:.16e}");
        format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            f(self.value),
            self.nr,
            self.ntheta,
            f(self.eps),
            self.converged,
            self.steps,
            f(self.tau),
            f(self.residual),
            f(self.stencil_residual),
            f(self.gap),
            f(self.grad_max),
            f(self.cone_sup),
            f(self.order),
            f(self.drift),
            self.error.as_deref().unwrap_or("").replace(',', ";")
        )
    }
}

/// Per-run result handed to the sweep callback.
pub struct SweepRun {
    pub index: usize,
    pub config: SolverConfig,
    pub problem: Problem,
    pub run: FlowRun,
}

/// Runs one solve per value on up to `jobs` threads. `on_run` sees every
/// completed run (for artifact output). Rows come back in input order with
/// orders and drifts filled in.
pub fn sweep(
    base: &SolverConfig,
    param: SweepParam,
    values: &[f64],
    jobs: usize,
    drift_cut: f64,
    on_run: &(dyn Fn(&SweepRun) + Sync),
) -> Result<Vec<SweepRow>> {
    if values.len() < 3 {
        return Err(Error::InvalidConfig(format!("a sweep needs at least 3 values, got {}", values.len())));
    }
    let configs: Vec<SolverConfig> = values.iter().map(|&v| param.apply(base, v)).collect::<Result<_>>()?;
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<(SweepRow, Option<Field>)>>> = Mutex::new(vec![None; values.len()]);
    std::thread::scope(|s| {
        for _ in 0..jobs.clamp(1, values.len()) {
            s.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                if i >= values.len() {
                    break;
                }
                let out = one_run(i, values[i], &configs[i], on_run);
                slots.lock().expect("sweep lock")[i] = Some(out);
            });
        }
    });
    let results: Vec<(SweepRow, Option<Field>)> =
        slots.into_inner().expect("sweep lock").into_iter().map(|o| o.expect("every slot filled")).collect();
    let mut rows: Vec<SweepRow> = Vec::new();
    for i in 0..results.len() {
        let mut row = results[i].0.clone();
        if i > 0 {
            let prev = &results[i - 1].0;
            row.order = match param {
                SweepParam::Nr | SweepParam::Resolution => prev.stencil_residual / row.stencil_residual,
                _ => prev.gap / row.gap,
            };
            if let (Some(a), Some(b)) = (&results[i - 1].1, &results[i].1) {
                row.drift = field_drift(a, b, drift_cut).unwrap_or(f64::NAN);
            }
        }
        rows.push(row);
    }
    Ok(rows)
}

fn one_run(
    index: usize,
    value: f64,
    cfg: &SolverConfig,
    on_run: &(dyn Fn(&SweepRun) + Sync),
) -> (SweepRow, Option<Field>) {
    let mut row = SweepRow {
        value,
        nr: cfg.nr,
        ntheta: cfg.ntheta,
        eps: f64::NAN,
        converged: false,
        steps: 0,
        tau: f64::NAN,
        residual: f64::NAN,
        stencil_residual: f64::NAN,
        gap: f64::NAN,
        grad_max: f64::NAN,
        cone_sup: f64::NAN,
        order: f64::NAN,
        drift: f64::NAN,
        error: None,
    };
    let res = (|| -> Result<(Problem, FlowRun)> {
        let p = prepare(cfg)?;
        let run = p.solve(|_| {})?;
        Ok((p, run))
    })();
    match res {
        Ok((p, run)) => {
            let u = &run.state.u;
            row.eps = p.linear.eps;
            row.converged = run.converged;
            row.steps = run.state.step_count;
            row.tau = run.state.tau;
            row.residual = run.residual;
            row.stencil_residual = apply_e(u, &p.op, &p.stencils).max_abs();
            row.gap = p.gap(u).unwrap_or(f64::NAN);
            if let Some(last) = run.history.last() {
                row.grad_max = last.grad_max;
                row.cone_sup = last.cone_sup;
            }
            if !run.converged {
                row.error = Some(Error::NotConverged { tau: run.state.tau, residual: run.residual }.to_string());
            }
            let field = run.state.u.clone();
            on_run(&SweepRun { index, config: cfg.clone(), problem: p, run });
            (row, Some(field))
        }
        Err(e) => {
            row.error = Some(e.to_string());
            (row, None)
        }
    }
}

/// sup over nodes of `a` with r <= cut of |a - b|, evaluating `b` by
/// interpolation when the grids differ.
pub fn field_drift(a: &Field, b: &Field, cut: f64) -> Result<f64> {
    if a.same_grid(b) {
        return a.max_abs_diff_within(b, cut);
    }
    let ext = PlaneExtension::new(b);
    let g = a.grid();
    let mut worst: f64 = 0.0;
    for (i, &r) in g.r().iter().enumerate() {
        if r > cut * (1.0 + 1e-14) {
            break;
        }
        for (j, &t) in g.theta().iter().enumerate() {
            worst = worst.max((a.at(i, j) - ext.eval(r, t)?).abs());
        }
    }
    Ok(worst)
}
