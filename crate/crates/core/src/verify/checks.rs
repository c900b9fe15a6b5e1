use crate::barriers::{trapping_violation, BarrierSet};
use crate::domain::extension::{symmetry_deviation, PlaneExtension};
use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::{Error, Result};
use crate::flow::run::{cone_sup, gradient_max};
use crate::linop::linear::LinearSolution;
use crate::verify::report::ReportEntry;

/// Largest violation of u_- <= u <= u_+, against 10 h^2.
pub fn check_sandwich(u: &Field, bs: &BarrierSet) -> Result<ReportEntry> {
    u.check_grid(&bs.plus)?;
    let h = u.grid().h();
    Ok(ReportEntry::at_most(trapping_violation(u.data(), bs), 10.0 * h * h))
}

/// Distance from the inner circle to the node where |Du| peaks, against one
/// radial cell. Vacuous when Du vanishes.
pub fn check_max_gradient_boundary(u: &Field, st: &Stencils) -> ReportEntry {
    let g = u.grid();
    let d = gradient_hessian(u, st);
    let (gmax, rad) = gradient_max(u, &d);
    let cell = g.first_cell() * (1.0 + 1e-12);
    if gmax == 0.0 {
        return ReportEntry::vacuous(cell);
    }
    ReportEntry::at_most(rad - g.r_inner(), cell)
}

/// sup of |H| r over the far annulus; only finiteness is checked here.
pub fn cone_decay(u: &Field, st: &Stencils) -> ReportEntry {
    let d = gradient_hessian(u, st);
    ReportEntry::at_most(cone_sup(u, &d), f64::MAX)
}

/// Ratio of the cone sup on a refined grid to the coarse one, in [0.5, 2].
pub fn cone_refinement(coarse: f64, fine: f64) -> ReportEntry {
    if coarse == 0.0 && fine == 0.0 {
        return ReportEntry::vacuous(2.0);
    }
    ReportEntry::within(fine / coarse, 0.5, 2.0)
}

/// G = sup over r = R of |D_r u - D_r u_1|.
pub fn radial_derivative_gap(u: &Field, sol: &LinearSolution, st: &Stencils) -> Result<f64> {
    u.check_grid(&sol.field)?;
    let du = gradient_hessian(u, st);
    let d1 = gradient_hessian(&sol.field, st);
    let nt = u.grid().ntheta();
    Ok((0..nt).map(|j| (du.ur[j] - d1.ur[j]).abs()).fold(0.0, f64::max))
}

/// Successive ratios G(eps_i) / G(eps_{i+1}) with eps decreasing.
pub fn gap_ratios(points: &[(f64, f64)]) -> Result<Vec<f64>> {
    if points.len() < 3 {
        return Err(Error::InvalidConfig(format!("gap sweep needs at least 3 points, got {}", points.len())));
    }
    let mut p = points.to_vec();
    p.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(p.windows(2).map(|w| w[0].1 / w[1].1).collect())
}

/// The ratio farthest from the cubic value 8, required to lie in [6, 10].
pub fn gap_sweep_entry(ratios: &[f64]) -> ReportEntry {
    let worst = ratios
        .iter()
        .copied()
        .max_by(|a, b| (a / 8.0).ln().abs().total_cmp(&(b / 8.0).ln().abs()))
        .unwrap_or(f64::NAN);
    ReportEntry::within(worst, 6.0, 10.0)
}

/// Deviation of the plane extension from its symmetry relations, against a
/// rounding allowance.
pub fn check_symmetry(u: &Field) -> ReportEntry {
    let dev = symmetry_deviation(&PlaneExtension::new(u));
    ReportEntry::at_most(dev, 64.0 * f64::EPSILON * u.max_abs())
}
