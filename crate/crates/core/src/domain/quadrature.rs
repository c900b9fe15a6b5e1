//! Gaussian-weighted quadrature on the sector.
//!
//! The radial rule is the eighth-order Gregory rule in the grid coordinate s,
//! applied to r (dr/ds) e^{-r^2/2}; the angular rule is the trapezoid rule,
//! which is exact for the sine products that appear here. A final scalar
//! rescaling makes the total weight equal the closed-form measure of the
//! sector.

use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::{Error, Result};

const GREGORY8: [f64; 7] = [
    5257.0 / 17280.0,
    22081.0 / 15120.0,
    54851.0 / 120960.0,
    103.0 / 70.0,
    89437.0 / 120960.0,
    16367.0 / 15120.0,
    23917.0 / 24192.0,
];

/// Gregory end-corrected trapezoid weights for `n` equispaced points with
/// unit spacing.
pub fn gregory_weights(n: usize) -> Result<Vec<f64>> {
    let m = GREGORY8.len();
    if n < 2 * m {
        return Err(Error::Resolution(format!("Gregory rule needs at least {} nodes, got {n}", 2 * m)));
    }
    let mut w = vec![1.0; n];
    for k in 0..m {
        w[k] = GREGORY8[k];
        w[n - 1 - k] = GREGORY8[k];
    }
    Ok(w)
}

/// Closed-form integral of e^{-r^2/2} over the sector.
pub fn sector_measure(grid: &SectorGrid) -> f64 {
    let (a, b) = (grid.r_inner(), grid.r_max());
    grid.width() * ((-0.5 * a * a).exp() - (-0.5 * b * b).exp())
}

/// Node weights for dm = e^{-|xi|^2/2} d xi on the sector.
#[derive(Clone, Debug)]
pub struct WeightedNorms {
    w: Vec<f64>,
}

impl WeightedNorms {
    pub fn new(grid: &SectorGrid) -> Result<Self> {
        let (nr, nt) = (grid.nr(), grid.ntheta());
        let gs = gregory_weights(nr)?;
        let ds = grid.ds();
        let dt = grid.dtheta();
        let mut w = Vec::with_capacity(grid.len());
        for i in 0..nr {
            let r = grid.r()[i];
            let radial = gs[i] * ds * r * grid.r_s(i) * (-0.5 * r * r).exp();
            for j in 0..nt {
                let tw = if j == 0 || j == nt - 1 { 0.5 } else { 1.0 };
                w.push(radial * tw * dt);
            }
        }
        let total: f64 = w.iter().sum();
        let scale = sector_measure(grid) / total;
        for x in &mut w {
            *x *= scale;
        }
        Ok(Self { w })
    }

    pub fn weights(&self) -> &[f64] {
        &self.w
    }

    pub fn total(&self) -> f64 {
        self.w.iter().sum()
    }

    /// Sector integral of u e^{-|xi|^2/2}.
    pub fn integrate(&self, u: &Field) -> f64 {
        self.w.iter().zip(u.data()).map(|(w, v)| w * v).sum()
    }

    /// <u, v>_H over the full wedge Omega_{R,N} = (-pi/N, pi/N). Symmetric
    /// fields make u v even in theta, so this is twice the sector integral.
    pub fn inner_product_h(&self, u: &Field, v: &Field) -> Result<f64> {
        u.check_grid(v)?;
        Ok(2.0 * self.w.iter().zip(u.data()).zip(v.data()).map(|((w, a), b)| w * a * b).sum::<f64>())
    }

    pub fn norm_h(&self, u: &Field) -> f64 {
        self.inner_product_h(u, u).unwrap().sqrt()
    }

    /// ||u||_V^2 = int (u^2 + |Du|^2) dm over the wedge.
    pub fn norm_v2(&self, u: &Field, st: &Stencils) -> f64 {
        let d = gradient_hessian(u, st);
        let mut s = 0.0;
        for (k, (&w, &v)) in self.w.iter().zip(u.data()).enumerate() {
            s += w * (v * v + d.grad_norm2(k));
        }
        2.0 * s
    }

    pub fn norm_v(&self, u: &Field, st: &Stencils) -> f64 {
        self.norm_v2(u, st).sqrt()
    }
}
