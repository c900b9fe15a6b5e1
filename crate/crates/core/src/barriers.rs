//! Upper and lower barriers u_1 +- A (r - R^2/r) and their certificate.

use serde::{Deserialize, Serialize};

use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Stencils};
use crate::error::{Error, Result};
use crate::flow::nonlinear::apply_e;
use crate::linop::linear::LinearSolution;
use crate::linop::operator::LinearOperator;

/// Safety factor applied to the measured gradient bound of u_1.
pub const K1_SAFETY: f64 = 1.25;

/// Largest admissible ||f||_{C^4}: (1/K1) sqrt((2 R0^2 - 1) / 124).
pub fn admissible_epsilon(k1: f64, r0: f64) -> Result<f64> {
    if !(r0 > std::f64::consts::FRAC_1_SQRT_2) {
        return Err(Error::Window(format!("R0 = {r0} must exceed 1/sqrt(2)")));
    }
    if !(k1 > 0.0 && k1.is_finite()) {
        return Err(Error::Window(format!("K1 = {k1} must be positive")));
    }
    Ok(((2.0 * r0 * r0 - 1.0) / 124.0).sqrt() / k1)
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BarrierParams {
    pub eps: f64,
    pub eps_max: f64,
    pub k: f64,
    pub k1: f64,
    pub a: f64,
    pub r0: f64,
    /// eps^2 k (K1 eps)^2; at most 1 for admissible data.
    pub eta: f64,
}

#[derive(Clone, Debug)]
pub struct BarrierSet {
    pub plus: Field,
    pub minus: Field,
    pub params: BarrierParams,
}

/// Builds u_+- = u_1 +- A (r - R^2/r) with A = (K1 eps)^3 k and
/// k = 2 / (2 R0^2 - 1).
pub fn make_barriers(sol: &LinearSolution, k1: f64, r0: f64, force: bool) -> Result<BarrierSet> {
    let eps_max = admissible_epsilon(k1, r0)?;
    let eps = sol.eps;
    if eps > eps_max && !force {
        return Err(Error::Inadmissible { eps, eps_max });
    }
    let k = 2.0 / (2.0 * r0 * r0 - 1.0);
    let c1 = k1 * eps;
    let a = c1 * c1 * c1 * k;
    let g = sol.field.grid();
    let rin = g.r_inner();
    let nt = g.ntheta();
    let mut plus = sol.field.clone();
    let mut minus = sol.field.clone();
    for (i, &r) in g.r().iter().enumerate() {
        let v = a * (r - rin * rin / r);
        for j in 0..nt {
            plus.data_mut()[i * nt + j] += v;
            minus.data_mut()[i * nt + j] -= v;
        }
    }
    let params = BarrierParams { eps, eps_max, k, k1, a, r0, eta: eps * eps * k * c1 * c1 };
    Ok(BarrierSet { plus, minus, params })
}

/// sup over r <= R_max/2 of |u|/r + |Du| + r |D^2 u| for both barriers.
pub fn barrier_k2(bs: &BarrierSet, st: &Stencils) -> f64 {
    let mut best: f64 = 0.0;
    for u in [&bs.plus, &bs.minus] {
        let g = u.grid();
        let d = gradient_hessian(u, st);
        let rows = g.rows_up_to(0.5 * g.r_max());
        let nt = g.ntheta();
        for i in 0..rows {
            let r = g.r()[i];
            for j in 0..nt {
                let k = i * nt + j;
                best = best.max(u.data()[k].abs() / r + d.grad_norm2(k).sqrt() + r * d.hess_norm(k));
            }
        }
    }
    best
}

/// Certificate of the barrier inequalities E(u_+) <= 0 <= E(u_-).
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct BarrierCertificate {
    pub eps: f64,
    pub eps_max: f64,
    pub k: f64,
    #[serde(rename = "K1")]
    pub k1: f64,
    #[serde(rename = "K2")]
    pub k2: f64,
    #[serde(rename = "A")]
    pub a: f64,
    #[serde(rename = "maxEplus")]
    pub max_e_plus: f64,
    #[serde(rename = "minEminus")]
    pub min_e_minus: f64,
    pub tol: f64,
    pub pass: bool,
}

impl BarrierCertificate {
    /// Size of the worst sign violation, zero when both inequalities hold
    /// exactly.
    pub fn violation(&self) -> f64 {
        self.max_e_plus.max(-self.min_e_minus).max(0.0)
    }
}

/// Evaluates E at the interior nodes of both barriers and compares with the
/// discretization tolerance 10 h^2 (1 + K2).
pub fn certify(bs: &BarrierSet, op: &LinearOperator, st: &Stencils) -> BarrierCertificate {
    let g = bs.plus.grid();
    let ep = apply_e(&bs.plus, op, st);
    let em = apply_e(&bs.minus, op, st);
    let (nr, nt) = (g.nr(), g.ntheta());
    let mut max_p = f64::NEG_INFINITY;
    let mut min_m = f64::INFINITY;
    for i in 1..nr - 1 {
        for j in 1..nt - 1 {
            let k = i * nt + j;
            max_p = max_p.max(ep.data()[k]);
            min_m = min_m.min(em.data()[k]);
        }
    }
    let k2 = barrier_k2(bs, st);
    let h = g.h();
    let tol = 10.0 * h * h * (1.0 + k2);
    BarrierCertificate {
        eps: bs.params.eps,
        eps_max: bs.params.eps_max,
        k: bs.params.k,
        k1: bs.params.k1,
        k2,
        a: bs.params.a,
        max_e_plus: max_p,
        min_e_minus: min_m,
        tol,
        pass: max_p <= tol && min_m >= -tol,
    }
}

/// max(u - u_+, u_- - u, 0) over all nodes.
pub fn trapping_violation(u: &[f64], bs: &BarrierSet) -> f64 {
    let mut worst: f64 = 0.0;
    for ((&v, &p), &m) in u.iter().zip(bs.plus.data()).zip(bs.minus.data()) {
        worst = worst.max(v - p).max(m - v);
    }
    worst
}
