use std::sync::Arc;

use rand::Rng;

use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::domain::quadrature::WeightedNorms;
use crate::domain::stencil::Stencils;
use crate::error::{Error, Result};
use crate::spectral::eigen::EigenPair;

/// Modal coefficients c_{k,l} = <u, phi_{k,l}>_H / <phi_{k,l}, phi_{k,l}>_H.
#[derive(Clone, Debug)]
pub struct Expansion {
    pub pairs: Vec<EigenPair>,
    pub coeffs: Vec<f64>,
}

impl Expansion {
    pub fn get(&self, k: u32, l: usize) -> Option<f64> {
        self.pairs.iter().position(|p| p.k == k && p.l == l).map(|i| self.coeffs[i])
    }
}

fn check_resolution(grid: &SectorGrid, k_max: u32, l_max: usize) -> Result<()> {
    if 8 * k_max as usize > grid.ntheta() {
        return Err(Error::Resolution(format!(
            "k_max={k_max} needs at least {} angular nodes",
            8 * k_max
        )));
    }
    let degree = (k_max * grid.n()) as usize + 2 * l_max;
    if grid.nr() < 8 * degree.max(4) {
        return Err(Error::Resolution(format!(
            "radial degree {degree} needs at least {} radial nodes",
            8 * degree
        )));
    }
    Ok(())
}

pub fn expand(u: &Field, norms: &WeightedNorms, k_max: u32, l_max: usize) -> Result<Expansion> {
    let grid = u.grid_arc();
    check_resolution(grid, k_max, l_max)?;
    let pairs = EigenPair::family(grid.n(), k_max, l_max)?;
    let mut coeffs = Vec::with_capacity(pairs.len());
    for p in &pairs {
        let phi = p.sample(grid);
        let num = norms.inner_product_h(u, &phi)?;
        let den = norms.inner_product_h(&phi, &phi)?;
        coeffs.push(num / den);
    }
    Ok(Expansion { pairs, coeffs })
}

pub fn reconstruct(exp: &Expansion, grid: &Arc<SectorGrid>) -> Field {
    let mut out = Field::zeros(grid.clone());
    for (p, &c) in exp.pairs.iter().zip(&exp.coeffs) {
        if c == 0.0 {
            continue;
        }
        let phi = p.sample(grid);
        for (o, v) in out.data_mut().iter_mut().zip(phi.data()) {
            *o += c * v;
        }
    }
    out
}

/// ||u||_V^2 / ||u||_H^2.
pub fn poincare_ratio(u: &Field, norms: &WeightedNorms, st: &Stencils) -> Result<f64> {
    let h = norms.inner_product_h(u, u)?;
    if !(h > 0.0) {
        return Err(Error::Spectral("field has zero H-norm".into()));
    }
    Ok(norms.norm_v2(u, st) / h)
}

fn bump(x: f64, a: f64, b: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    let t = (2.0 * x - a - b) / (b - a);
    (-1.0 / (1.0 - t * t)).exp()
}

/// Random smooth field with compact support in r, built from odd sine modes
/// and bump profiles; equal to zero at the angular edges.
pub fn random_compact_field<R: Rng>(grid: &Arc<SectorGrid>, rng: &mut R) -> Field {
    let n = grid.n() as f64;
    let terms: Vec<(f64, f64, f64, f64)> = (0..rng.gen_range(1..=4))
        .map(|_| {
            let k = [1.0, 3.0, 5.0][rng.gen_range(0..3)];
            let lo = rng.gen_range(0.2..4.0);
            let hi = lo + rng.gen_range(0.8..4.0);
            (k, lo, hi, rng.gen_range(-1.0..1.0))
        })
        .collect();
    let nt = grid.ntheta();
    let mut u = Field::from_fn(grid.clone(), |r, t| {
        terms.iter().map(|&(k, lo, hi, c)| c * bump(r, lo, hi) * (k * n * t).sin()).sum()
    });
    for i in 0..grid.nr() {
        let d = u.data_mut();
        d[i * nt] = 0.0;
        d[i * nt + nt - 1] = 0.0;
    }
    u
}
