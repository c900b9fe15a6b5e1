//! Empirical uniqueness (two starts, one limit) and the sign conditions of
//! the comparison function psi(r) = r^alpha - (3/4) r^(alpha-2).

use crate::barriers::BarrierSet;
use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::{Error, Result};
use crate::flow::run::{run_to_steady, FlowConfig, FlowRun};
use crate::linop::linear::LinearSolution;
use crate::verify::report::ReportEntry;

const PSI_B: f64 = 0.75;

/// clamp(u_1 + scale A (r - R^2/r) sin(N theta), u_-, u_+). The inner row
/// and the angular edges keep their values.
pub fn perturbed_initial(sol: &LinearSolution, bs: &BarrierSet, scale: f64) -> Result<Field> {
    sol.field.check_grid(&bs.plus)?;
    let mut u = sol.field.clone();
    let g = sol.field.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let rin = g.r_inner();
    let nn = g.n() as f64;
    let a = bs.params.a;
    for i in 1..nr {
        let r = g.r()[i];
        let radial = scale * a * (r - rin * rin / r);
        for j in 1..nt - 1 {
            let k = i * nt + j;
            let v = u.data()[k] + radial * (nn * g.theta()[j]).sin();
            u.data_mut()[k] = v.clamp(bs.minus.data()[k], bs.plus.data()[k]);
        }
    }
    Ok(u)
}

#[derive(Clone, Debug)]
pub struct UniquenessOutcome {
    pub entry: ReportEntry,
    pub sup_diff: f64,
    pub from_linear: FlowRun,
    pub from_perturbed: FlowRun,
}

/// Runs the flow from u_1 and from the perturbed start (concurrently) and
/// compares the limits against max(10 tol_steady, 10 h^2).
pub fn uniqueness_experiment(
    sol: &LinearSolution,
    bs: &BarrierSet,
    st: &Stencils,
    cfg: &FlowConfig,
    scale: f64,
) -> Result<UniquenessOutcome> {
    let u0 = sol.field.clone();
    let u0p = perturbed_initial(sol, bs, scale)?;
    let (a, b) = std::thread::scope(|s| {
        let ha = s.spawn(|| run_to_steady(u0, st, Some(bs), cfg, |_| {}));
        let b = run_to_steady(u0p, st, Some(bs), cfg, |_| {});
        (ha.join().expect("flow thread panicked"), b)
    });
    let (a, b) = (a?, b?);
    a.ensure_converged()?;
    b.ensure_converged()?;
    let sup_diff = a.state.u.max_abs_diff(&b.state.u)?;
    let h = sol.field.grid().h();
    let threshold = (10.0 * cfg.tol_steady).max(10.0 * h * h);
    Ok(UniquenessOutcome { entry: ReportEntry::at_most(sup_diff, threshold), sup_diff, from_linear: a, from_perturbed: b })
}

/// `n` radii from `lo` to `hi`, geometrically spaced, endpoints included.
pub fn sample_radii(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    if n < 2 {
        return vec![lo];
    }
    let q = (hi / lo).ln() / (n - 1) as f64;
    (0..n).map(|i| if i == n - 1 { hi } else { lo * (q * i as f64).exp() }).collect()
}

#[derive(Clone, Debug)]
pub struct BarrierMargins {
    /// max over samples of (1 - alpha) r + 2 eta.
    pub bound_max: f64,
    /// min over samples of psi(r).
    pub psi_min: f64,
    pub entry: ReportEntry,
}

/// Checks psi > 0 and (1 - alpha) r + 2 eta <= 0 at every sample r >= R.
/// Needs R > sqrt(3)/2 and 1 + 4 eta / sqrt(3) < alpha <= 9/8.
pub fn uniqueness_barrier(alpha: f64, eta: f64, r_inner: f64, samples: &[f64]) -> Result<BarrierMargins> {
    let s3 = 3f64.sqrt();
    if !(r_inner > 0.5 * s3) {
        return Err(Error::Window(format!("R = {r_inner} is not above sqrt(3)/2; this check does not apply")));
    }
    if !(eta >= 0.0) {
        return Err(Error::Window(format!("eta = {eta} must be non-negative")));
    }
    let lo = 1.0 + 4.0 * eta / s3;
    if !(alpha > lo && alpha <= 1.125) {
        return Err(Error::Window(format!("alpha = {alpha} outside ({lo}, 9/8]")));
    }
    if samples.is_empty() || samples.iter().any(|&r| !(r >= r_inner)) {
        return Err(Error::Window("samples must be non-empty and lie in r >= R".into()));
    }
    let mut bound_max = f64::NEG_INFINITY;
    let mut psi_min = f64::INFINITY;
    for &r in samples {
        bound_max = bound_max.max((1.0 - alpha) * r + 2.0 * eta);
        psi_min = psi_min.min(r.powf(alpha) - PSI_B * r.powf(alpha - 2.0));
    }
    let worst = bound_max.max(-psi_min);
    let mut entry = ReportEntry::at_most(worst, 0.0);
    entry.pass = bound_max <= 0.0 && psi_min > 0.0;
    Ok(BarrierMargins { bound_max, psi_min, entry })
}

/// 6 sup|Du| sup|D^2 u| over r <= R_max/2.
pub fn eta_surrogate(u: &Field, st: &Stencils) -> f64 {
    let g = u.grid();
    let d = gradient_hessian(u, st);
    let nt = g.ntheta();
    let rows = g.rows_up_to(0.5 * g.r_max());
    let (mut p, mut q): (f64, f64) = (0.0, 0.0);
    for k in 0..rows * nt {
        p = p.max(d.grad_norm2(k).sqrt());
        q = q.max(d.hess_norm(k));
    }
    6.0 * p * q
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_examples() {
        let m = uniqueness_barrier(1.125, 0.0, 1.0, &[1.0]).unwrap();
        assert_eq!(m.bound_max, -0.125);
        assert_eq!(m.psi_min, 0.25);
        assert!(m.entry.pass);
        assert!(uniqueness_barrier(1.12, 0.05, 1.0, &sample_radii(1.0, 16.0, 100)).unwrap().entry.pass);
        assert!(uniqueness_barrier(1.11, 0.05, 1.0, &[1.0]).is_err());
        assert!(uniqueness_barrier(1.13, 0.0, 1.0, &[1.0]).is_err());
        assert!(uniqueness_barrier(1.1, 0.0, 0.8, &[1.0]).is_err());
    }

    #[test]
    fn radii_cover_the_range() {
        let r = sample_radii(1.0, 16.0, 5);
        assert_eq!(r[0], 1.0);
        assert_eq!(r[4], 16.0);
        assert!((r[2] - 4.0).abs() < 1e-12);
    }
}
