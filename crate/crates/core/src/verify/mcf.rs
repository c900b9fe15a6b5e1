//! Consistency of a steady u with mean curvature flow under
//! v(x, t) = l u(x / l), l = sqrt(2 (1 - t)).
//!
//! For u independent of tau, the chain rule gives l dv/dt = y.Du - u and
//! l g^{ij}(Dv) D_ij v = g^{ij}(Du) D_ij u at y = x / l. Both are built as
//! node fields, extended to the plane and interpolated at y.

use std::f64::consts::PI;

use crate::domain::extension::PlaneExtension;
use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::Result;
use crate::verify::report::ReportEntry;

pub const MCF_TIMES: [f64; 3] = [0.0, 0.3, 0.6];
const H2_CONSTANT: f64 = 10.0;
const N_RADII: usize = 48;
const N_ANGLES: usize = 97;

#[derive(Clone, Debug)]
pub struct McfConsistency {
    /// (t, sup |dv/dt - g^{ij} D_ij v|, interpolation error estimate).
    pub per_time: Vec<(f64, f64, f64)>,
    pub entry: ReportEntry,
}

pub fn mcf_consistency(u: &Field, st: &Stencils) -> Result<McfConsistency> {
    let g = u.grid();
    let d = gradient_hessian(u, st);
    let nt = g.ntheta();
    let mut diff = vec![0.0; g.len()];
    for (i, &r) in g.r().iter().enumerate() {
        for j in 0..nt {
            let k = i * nt + j;
            let time_side = r * d.ur[k] - u.data()[k];
            let space_side = d.laplacian(k) - d.hess_grad_grad(k) / (1.0 + d.grad_norm2(k));
            diff[k] = time_side - space_side;
        }
    }
    let diff = Field::from_vec(u.grid_arc().clone(), diff)?;
    let ext = PlaneExtension::new(&diff);
    let shifted = PlaneExtension::new(&diff).with_stencil_shift(1);
    let y_lo = g.r_inner() + 2.0 * g.first_cell();
    let y_hi = 0.5 * g.r_max();
    let q = (y_hi / y_lo).ln() / (N_RADII - 1) as f64;
    let mut per_time = Vec::new();
    let (mut worst, mut worst_interp): (f64, f64) = (0.0, 0.0);
    for &t in &MCF_TIMES {
        let l = (2.0 * (1.0 - t)).sqrt();
        let (mut sup, mut interp): (f64, f64) = (0.0, 0.0);
        for a in 0..N_RADII {
            let rho = l * y_lo * (q * a as f64).exp();
            for b in 0..N_ANGLES {
                let th = 2.0 * PI * (b as f64 + 0.5) / N_ANGLES as f64;
                let (x1, x2) = (rho * th.cos(), rho * th.sin());
                let v = ext.eval_xy(x1 / l, x2 / l)?;
                let w = shifted.eval_xy(x1 / l, x2 / l)?;
                sup = sup.max(v.abs() / l);
                interp = interp.max((v - w).abs() / l);
            }
        }
        per_time.push((t, sup, interp));
        worst = worst.max(sup);
        worst_interp = worst_interp.max(interp);
    }
    let h = g.h();
    let entry = ReportEntry::at_most(worst, H2_CONSTANT * h * h + 10.0 * worst_interp);
    Ok(McfConsistency { per_time, entry })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::{SectorGrid, Spacing};
    use std::sync::Arc;

    #[test]
    fn zero_and_plane_are_consistent() {
        let g = Arc::new(SectorGrid::new(1.0, 16.0, 65, 17, 5, Spacing::LogGraded).unwrap());
        let st = Stencils::new(&g).unwrap();
        let z = mcf_consistency(&Field::zeros(g.clone()), &st).unwrap();
        assert_eq!(z.entry.value, 0.0);
        let p = mcf_consistency(&Field::from_fn(g, |r, t| r * t.cos()), &st).unwrap();
        assert!(p.entry.value < 1e-9, "{}", p.entry.value);
    }
}
