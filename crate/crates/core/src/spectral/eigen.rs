use std::sync::Arc;

use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::error::{Error, Result};
use crate::linop::operator::{apply_l, LinearOperator};
use crate::spectral::laguerre::{orthogonal_family, MonicPoly};

/// Eigenpair of L on the full wedge: phi = r^{kN} P_{k,l}(r^2) sin(kN theta)
/// with L phi = (1 - (kN + 2l)) phi.
#[derive(Clone, Debug)]
pub struct EigenPair {
    pub k: u32,
    pub l: usize,
    pub n: u32,
    pub lambda: f64,
    pub poly: MonicPoly,
}

impl EigenPair {
    /// Odd k only, unless `allow_even` is set.
    pub fn new(k: u32, l: usize, n: u32, allow_even: bool) -> Result<Self> {
        if k == 0 {
            return Err(Error::Spectral("k must be positive".into()));
        }
        if k % 2 == 0 && !allow_even {
            return Err(Error::Spectral(format!(
                "k={k} is not compatible with the reflection symmetry"
            )));
        }
        let alpha = (k * n) as usize;
        let poly = orthogonal_family(alpha, l)?.pop().unwrap();
        let lambda = 1.0 - (alpha + 2 * l) as f64;
        Ok(Self { k, l, n, lambda, poly })
    }

    /// Full family k in 1..=k_max (odd), l in 0..=l_max; the exact
    /// Gram-Schmidt is shared for each k.
    pub fn family(n: u32, k_max: u32, l_max: usize) -> Result<Vec<EigenPair>> {
        let mut out = Vec::new();
        for k in (1..=k_max).step_by(2) {
            let alpha = (k * n) as usize;
            for (l, poly) in orthogonal_family(alpha, l_max)?.into_iter().enumerate() {
                out.push(EigenPair { k, l, n, lambda: 1.0 - (alpha + 2 * l) as f64, poly });
            }
        }
        Ok(out)
    }

    pub fn m(&self) -> f64 {
        (self.k * self.n) as f64
    }

    pub fn radial(&self, r: f64) -> f64 {
        r.powi((self.k * self.n) as i32) * self.poly.eval(r * r)
    }

    pub fn eval(&self, r: f64, theta: f64) -> f64 {
        self.radial(r) * (self.m() * theta).sin()
    }

    /// Samples phi on a grid; both angular edges are set to exact zeros.
    pub fn sample(&self, grid: &Arc<SectorGrid>) -> Field {
        let nt = grid.ntheta();
        let mut u = Field::from_fn(grid.clone(), |r, t| self.eval(r, t));
        for i in 0..grid.nr() {
            let d = u.data_mut();
            d[i * nt] = 0.0;
            d[i * nt + nt - 1] = 0.0;
        }
        u
    }
}

/// sup |L phi - lambda phi| / sup |phi| over interior nodes with r <= R_max/2.
pub fn verify_eigen(pair: &EigenPair, grid: &Arc<SectorGrid>) -> Result<f64> {
    if grid.n() != pair.n {
        return Err(Error::Spectral("grid and eigenpair have different N".into()));
    }
    if grid.ntheta() < 8 * pair.k as usize {
        return Err(Error::Resolution(format!(
            "ntheta={} is too small for k={}",
            grid.ntheta(),
            pair.k
        )));
    }
    let phi = pair.sample(grid);
    let lphi = apply_l(&phi, &LinearOperator::new(grid));
    let rows = grid.rows_up_to(0.5 * grid.r_max());
    let nt = grid.ntheta();
    let (mut res, mut size): (f64, f64) = (0.0, 0.0);
    for i in 1..rows.min(grid.nr() - 1) {
        for j in 1..nt - 1 {
            let k = i * nt + j;
            res = res.max((lphi.data()[k] - pair.lambda * phi.data()[k]).abs());
            size = size.max(phi.data()[k].abs());
        }
    }
    Ok(res / size)
}
