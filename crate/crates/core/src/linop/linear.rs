use std::f64::consts::PI;
use std::sync::Arc;

use crate::domain::boundary::BoundaryData;
use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::{Error, Result};
use crate::linop::mode::{solve_linear_mode, AngularSymbol, ModeAccuracy};

#[derive(Clone, Debug)]
pub struct ModeProfile {
    pub k: u32,
    pub m: f64,
    pub a: f64,
    pub profile: Vec<f64>,
}

/// Solution u_1 of L u = 0 with u = f on r = R, symmetric Dirichlet edges and
/// the cone condition at R_max.
#[derive(Clone, Debug)]
pub struct LinearSolution {
    pub field: Field,
    pub boundary: BoundaryData,
    /// ||f||_{C^4}.
    pub eps: f64,
    pub modes: Vec<ModeProfile>,
}

pub fn solve_linear(
    grid: &Arc<SectorGrid>,
    f: &BoundaryData,
    symbol: AngularSymbol,
    accuracy: ModeAccuracy,
) -> Result<LinearSolution> {
    if f.n() != grid.n() {
        return Err(Error::InvalidBoundary(format!(
            "boundary data has N={} but the grid has N={}",
            f.n(),
            grid.n()
        )));
    }
    let nt = grid.ntheta();
    let mut modes = Vec::new();
    for &(k, a) in f.modes() {
        let m = (k * grid.n()) as f64;
        if m * grid.dtheta() > PI / 4.0 {
            return Err(Error::Resolution(format!(
                "mode k={k} needs more than {nt} angular nodes"
            )));
        }
        let profile = solve_linear_mode(grid, m, a, symbol, accuracy)?;
        modes.push(ModeProfile { k, m, a, profile });
    }
    let mut data = vec![0.0; grid.len()];
    for md in &modes {
        let sines: Vec<f64> = grid
            .theta()
            .iter()
            .enumerate()
            .map(|(j, t)| if j == 0 || j == nt - 1 { 0.0 } else { (md.m * t).sin() })
            .collect();
        for (i, &p) in md.profile.iter().enumerate() {
            for j in 0..nt {
                data[i * nt + j] += p * sines[j];
            }
        }
    }
    let field = Field::from_vec(grid.clone(), data)?;
    Ok(LinearSolution { field, boundary: f.clone(), eps: f.c4_norm(), modes })
}

/// sup_{r <= R_max/2} (|D u_1| + r |D^2 u_1|) / eps.
pub fn estimate_k1(sol: &LinearSolution, st: &Stencils) -> Result<f64> {
    if !(sol.eps > 0.0) {
        return Err(Error::InvalidBoundary("boundary data vanishes; K1 is undefined".into()));
    }
    let u = &sol.field;
    let g = u.grid();
    let d = gradient_hessian(u, st);
    let rows = g.rows_up_to(0.5 * g.r_max());
    let nt = g.ntheta();
    let mut best: f64 = 0.0;
    for i in 0..rows {
        let r = g.r()[i];
        for j in 0..nt {
            let k = i * nt + j;
            best = best.max(d.grad_norm2(k).sqrt() + r * d.hess_norm(k));
        }
    }
    Ok(best / sol.eps)
}

/// sup |u_1| / (3 K0 r) with K0 = ||f||_{C^4}.
pub fn growth_ratio(sol: &LinearSolution) -> f64 {
    let g = sol.field.grid();
    let nt = g.ntheta();
    let mut best: f64 = 0.0;
    for (i, &r) in g.r().iter().enumerate() {
        for j in 0..nt {
            best = best.max(sol.field.at(i, j).abs() / (3.0 * sol.eps * r));
        }
    }
    best
}

/// max of u_1 - 3 K0 r cos(theta); non-positive when the linear comparison
/// holds.
pub fn comparison_probe(sol: &LinearSolution) -> f64 {
    let g = sol.field.grid();
    let mut best = f64::NEG_INFINITY;
    for (i, &r) in g.r().iter().enumerate() {
        for (j, &t) in g.theta().iter().enumerate() {
            best = best.max(sol.field.at(i, j) - 3.0 * sol.eps * r * t.cos());
        }
    }
    best
}
