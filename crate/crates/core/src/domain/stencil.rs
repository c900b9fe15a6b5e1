//! Finite-difference weights on the sector grid.
//!
//! Radial weights are Lagrange weights on the physical radii, so every
//! radial stencil is exact on quadratics in r. Angular weights are fitted to
//! {1, cos, sin} (plus t^3 for one-sided second derivatives), which makes
//! them exact on r cos(theta) and r sin(theta).

use nalgebra::{DMatrix, DVector};

use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::error::{Error, Result};

/// Drift stencils switch to the backward difference once the centered scheme
/// would lose its positive outward coupling, i.e. when (r - 1/r) dr_- > this.
pub const DRIFT_PECLET_LIMIT: f64 = 1.5;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Stencil {
    pub start: usize,
    pub len: usize,
    pub w: [f64; 4],
}

impl Stencil {
    fn new(start: usize, w: &[f64]) -> Self {
        let mut a = [0.0; 4];
        a[..w.len()].copy_from_slice(w);
        Self { start, len: w.len(), w: a }
    }

    #[inline]
    pub fn apply(&self, v: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for k in 0..self.len {
            s += self.w[k] * v(self.start + k);
        }
        s
    }
}

/// Solves for weights w with sum_k w_k phi_b(t_k) = target_b.
fn fitted(offsets: &[f64], basis: &dyn Fn(f64) -> Vec<f64>, target: &[f64]) -> Vec<f64> {
    let n = offsets.len();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for (k, &t) in offsets.iter().enumerate() {
        let phi = basis(t);
        for b in 0..n {
            a[(b, k)] = phi[b];
        }
    }
    let rhs = DVector::from_column_slice(target);
    a.lu().solve(&rhs).expect("stencil system is nonsingular").as_slice().to_vec()
}

fn poly_weights(nodes: &[f64], x0: f64, order: usize) -> Vec<f64> {
    let d = nodes.iter().map(|x| (x - x0).abs()).fold(0.0, f64::max);
    let n = nodes.len();
    let offsets: Vec<f64> = nodes.iter().map(|x| (x - x0) / d).collect();
    let basis = move |t: f64| (0..n).map(|p| t.powi(p as i32)).collect::<Vec<f64>>();
    let mut target = vec![0.0; n];
    target[order] = if order == 2 { 2.0 } else { 1.0 };
    fitted(&offsets, &basis, &target)
        .into_iter()
        .map(|w| w / d.powi(order as i32))
        .collect()
}

fn trig_weights(dt: f64, dir: f64, npts: usize, order: usize) -> Vec<f64> {
    let offsets: Vec<f64> = (0..npts).map(|k| dir * k as f64 * dt).collect();
    let basis = move |t: f64| {
        let half = (0.5 * t).sin();
        let mut v = vec![1.0, 2.0 * half * half / (dt * dt), t.sin() / dt];
        if npts == 4 {
            v.push((t / dt).powi(3));
        }
        v
    };
    let mut target = vec![0.0; npts];
    if order == 1 {
        target[2] = 1.0 / dt;
    } else {
        target[1] = 1.0 / (dt * dt);
    }
    fitted(&offsets, &basis, &target)
}

/// All derivative stencils for one grid.
#[derive(Clone, Debug)]
pub struct Stencils {
    pub dr: Vec<Stencil>,
    pub drr: Vec<Stencil>,
    pub drift: Vec<Stencil>,
    pub upwind: Vec<bool>,
    pub dt: Vec<Stencil>,
    pub dtt: Vec<Stencil>,
}

impl Stencils {
    pub fn new(grid: &SectorGrid) -> Result<Self> {
        let (nr, nt) = (grid.nr(), grid.ntheta());
        if nr < 4 || nt < 4 {
            return Err(Error::Resolution("derivative stencils need at least 4 nodes per direction".into()));
        }
        let r = grid.r();
        let mut dr = Vec::with_capacity(nr);
        let mut drr = Vec::with_capacity(nr);
        let mut drift = Vec::with_capacity(nr);
        let mut upwind = Vec::with_capacity(nr);
        for i in 0..nr {
            if i == 0 {
                dr.push(Stencil::new(0, &poly_weights(&r[0..3], r[0], 1)));
                drr.push(Stencil::new(0, &poly_weights(&r[0..4], r[0], 2)));
            } else if i == nr - 1 {
                dr.push(Stencil::new(nr - 3, &poly_weights(&r[nr - 3..], r[i], 1)));
                drr.push(Stencil::new(nr - 4, &poly_weights(&r[nr - 4..], r[i], 2)));
            } else {
                dr.push(Stencil::new(i - 1, &central_first(r[i - 1], r[i], r[i + 1])));
                drr.push(Stencil::new(i - 1, &central_second(r[i - 1], r[i], r[i + 1])));
            }
            let up = i > 0
                && i < nr - 1
                && r[i] > 0.0
                && (r[i] - 1.0 / r[i]) * (r[i] - r[i - 1]) > DRIFT_PECLET_LIMIT;
            upwind.push(up);
            if up {
                let d = r[i] - r[i - 1];
                drift.push(Stencil::new(i - 1, &[-1.0 / d, 1.0 / d]));
            } else {
                drift.push(*dr.last().unwrap());
            }
        }
        let h = grid.dtheta();
        let mut dt = Vec::with_capacity(nt);
        let mut dtt = Vec::with_capacity(nt);
        let c1 = 1.0 / (2.0 * h.sin());
        let c2 = 1.0 / (2.0 * (1.0 - h.cos()));
        for j in 0..nt {
            if j == 0 {
                dt.push(Stencil::new(0, &trig_weights(h, 1.0, 3, 1)));
                dtt.push(Stencil::new(0, &trig_weights(h, 1.0, 4, 2)));
            } else if j == nt - 1 {
                let mut w1 = trig_weights(h, -1.0, 3, 1);
                w1.reverse();
                let mut w2 = trig_weights(h, -1.0, 4, 2);
                w2.reverse();
                dt.push(Stencil::new(nt - 3, &w1));
                dtt.push(Stencil::new(nt - 4, &w2));
            } else {
                dt.push(Stencil::new(j - 1, &[-c1, 0.0, c1]));
                dtt.push(Stencil::new(j - 1, &[c2, -2.0 * c2, c2]));
            }
        }
        Ok(Self { dr, drr, drift, upwind, dt, dtt })
    }

    /// Coefficient of u_{j+-1} in the interior angular second difference.
    pub fn theta_coupling(grid: &SectorGrid) -> f64 {
        1.0 / (2.0 * (1.0 - grid.dtheta().cos()))
    }
}

fn central_first(a: f64, b: f64, c: f64) -> [f64; 3] {
    let (dm, dp) = (b - a, c - b);
    [-dp / (dm * (dm + dp)), (dp - dm) / (dm * dp), dm / (dp * (dm + dp))]
}

fn central_second(a: f64, b: f64, c: f64) -> [f64; 3] {
    let (dm, dp) = (b - a, c - b);
    let lo = 2.0 / (dm * (dm + dp));
    let hi = 2.0 / (dp * (dm + dp));
    [lo, -(lo + hi), hi]
}

/// Polar first and second derivatives at every node.
#[derive(Clone, Debug)]
pub struct Derivatives {
    pub ur: Vec<f64>,
    pub ut: Vec<f64>,
    pub urr: Vec<f64>,
    pub urt: Vec<f64>,
    pub utt: Vec<f64>,
    /// Radial derivative used for the drift term xi . Du = r u_r.
    pub ur_drift: Vec<f64>,
    r_of: Vec<f64>,
    t_of: Vec<f64>,
}

/// Gradient and Hessian of a field. Rows at r = 0 are left at zero.
pub fn gradient_hessian(u: &Field, st: &Stencils) -> Derivatives {
    let g = u.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let v = u.data();
    let n = g.len();
    let mut d = Derivatives {
        ur: vec![0.0; n],
        ut: vec![0.0; n],
        urr: vec![0.0; n],
        urt: vec![0.0; n],
        utt: vec![0.0; n],
        ur_drift: vec![0.0; n],
        r_of: vec![0.0; n],
        t_of: vec![0.0; n],
    };
    for i in 0..nr {
        let r = g.r()[i];
        for j in 0..nt {
            let k = i * nt + j;
            d.r_of[k] = r;
            d.t_of[k] = g.theta()[j];
            if r == 0.0 {
                continue;
            }
            let (sr, srr, sd) = (&st.dr[i], &st.drr[i], &st.drift[i]);
            let (st1, st2) = (&st.dt[j], &st.dtt[j]);
            d.ur[k] = sr.apply(|ii| v[ii * nt + j]);
            d.urr[k] = srr.apply(|ii| v[ii * nt + j]);
            d.ur_drift[k] = sd.apply(|ii| v[ii * nt + j]);
            d.ut[k] = st1.apply(|jj| v[i * nt + jj]);
            d.utt[k] = st2.apply(|jj| v[i * nt + jj]);
            let mut m = 0.0;
            for a in 0..sr.len {
                let row = (sr.start + a) * nt;
                m += sr.w[a] * st1.apply(|jj| v[row + jj]);
            }
            d.urt[k] = m;
        }
    }
    d
}

impl Derivatives {
    /// Gradient and Hessian in the orthonormal polar frame (e_r, e_theta):
    /// (p, q) and [[a, c], [c, b]].
    #[inline]
    pub fn frame(&self, k: usize) -> (f64, f64, f64, f64, f64) {
        let r = self.r_of[k];
        if r == 0.0 {
            return (0.0, 0.0, 0.0, 0.0, 0.0);
        }
        let p = self.ur[k];
        let q = self.ut[k] / r;
        let a = self.urr[k];
        let b = self.ur[k] / r + self.utt[k] / (r * r);
        let c = self.urt[k] / r - self.ut[k] / (r * r);
        (p, q, a, b, c)
    }

    pub fn grad_norm2(&self, k: usize) -> f64 {
        let (p, q, ..) = self.frame(k);
        p * p + q * q
    }

    /// Frobenius norm of the Hessian.
    pub fn hess_norm(&self, k: usize) -> f64 {
        let (_, _, a, b, c) = self.frame(k);
        (a * a + b * b + 2.0 * c * c).sqrt()
    }

    /// Laplacian u_rr + u_r/r + u_tt/r^2.
    pub fn laplacian(&self, k: usize) -> f64 {
        let (_, _, a, b, _) = self.frame(k);
        a + b
    }

    /// D_i u D_j u D_ij u.
    pub fn hess_grad_grad(&self, k: usize) -> f64 {
        let (p, q, a, b, c) = self.frame(k);
        p * p * a + 2.0 * p * q * c + q * q * b
    }

    /// Cartesian gradient (u_x, u_y).
    pub fn cartesian_gradient(&self, k: usize) -> [f64; 2] {
        let (p, q, ..) = self.frame(k);
        let (s, c) = self.t_of[k].sin_cos();
        [c * p - s * q, s * p + c * q]
    }

    /// Cartesian Hessian (u_xx, u_xy, u_yy).
    pub fn cartesian_hessian(&self, k: usize) -> [f64; 3] {
        let (_, _, a, b, m) = self.frame(k);
        let (s, c) = self.t_of[k].sin_cos();
        let uxx = c * c * a + s * s * b - 2.0 * s * c * m;
        let uyy = s * s * a + c * c * b + 2.0 * s * c * m;
        let uxy = s * c * (a - b) + (c * c - s * s) * m;
        [uxx, uxy, uyy]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::Spacing;
    use std::sync::Arc;

    fn grid(nr: usize, nt: usize) -> Arc<SectorGrid> {
        Arc::new(SectorGrid::new(1.0, 16.0, nr, nt, 5, Spacing::LogGraded).unwrap())
    }

    #[test]
    fn linear_function_is_exact() {
        let g = grid(33, 17);
        let st = Stencils::new(&g).unwrap();
        let u = Field::from_fn(g.clone(), |r, t| r * t.cos());
        let d = gradient_hessian(&u, &st);
        for k in 0..g.len() {
            let [ux, uy] = d.cartesian_gradient(k);
            let [a, b, c] = d.cartesian_hessian(k);
            assert!((ux - 1.0).abs() < 1e-11 && uy.abs() < 1e-11, "k={k} {ux} {uy}");
            assert!(a.abs() < 1e-9 && b.abs() < 1e-9 && c.abs() < 1e-9, "k={k} {a} {b} {c}");
        }
    }

    #[test]
    fn quadratic_hessian_near_identity() {
        let g = grid(129, 33);
        let st = Stencils::new(&g).unwrap();
        let u = Field::from_fn(g.clone(), |r, _| r * r);
        let d = gradient_hessian(&u, &st);
        for k in 0..g.len() {
            let [a, b, c] = d.cartesian_hessian(k);
            assert!((a - 2.0).abs() < 1e-6 && b.abs() < 1e-6 && (c - 2.0).abs() < 1e-6);
        }
    }

    #[test]
    fn drift_switches_only_far_out() {
        let g = grid(257, 65);
        let st = Stencils::new(&g).unwrap();
        let first = st.upwind.iter().position(|&b| b).unwrap();
        assert!(g.r()[first] > 8.0);
        assert!(st.upwind[first..g.nr() - 1].iter().all(|&b| b));
    }
}
