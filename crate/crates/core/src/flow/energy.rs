//! Discrete Gaussian area and the flow operator derived from it.
//!
//! Each (s, theta) cell is split into two right triangles (diagonals are
//! mirrored about the sector midline, so the construction respects the
//! reflection symmetry). A triangle T with right-angle vertex p and legs
//! p-q_s (radial) and p-q_t (angular) carries half the Gaussian measure C of
//! its cell and
//!
//!   W_T = sqrt(1 + a (u_qs - u_p)^2 + b (u_qt - u_p)^2),
//!   m_T = (C/6) (e_p + e_qs + e_qt),   e_n = exp(-u_n^2 / 2),
//!
//! with a = 1/dr^2 and b the angular stencil weight, so that W_T is a
//! consistent sqrt(1 + |Du|^2). Then
//!
//!   J_h = 2N (sum_T m_T W_T + sum_edges gamma_e (du_e)^2 / 2 + sum_n beta_n e_n).
//!
//! The edge and node corrections are small and make the linearization of
//! the velocity -(W/(mu e)) dJ_h/du exactly the stencil operator L, where mu
//! is the symmetrizer of the radial stencil.

use std::sync::Arc;

use crate::domain::grid::SectorGrid;
use crate::domain::quadrature::sector_measure;
use crate::error::{Error, Result};
use crate::linop::operator::LinearOperator;

#[derive(Clone, Copy, Debug)]
struct Tri {
    p: u32,
    qs: u32,
    qt: u32,
    a: f64,
    b: f64,
    /// Gaussian weight of each vertex, a third of the triangle's measure.
    w: f64,
}

#[derive(Clone, Copy, Debug)]
struct Edge {
    n0: u32,
    n1: u32,
    gamma: f64,
}

/// Gaussian factor exp(-u^2/2), with a short series for small |u|.
#[inline]
pub fn gauss(u: f64) -> f64 {
    let y = 0.5 * u * u;
    if y < 1e-4 {
        1.0 - y * (1.0 - y * (0.5 - y * (1.0 / 6.0 - y / 24.0)))
    } else {
        (-y).exp()
    }
}

/// exp(-u1^2/2) - exp(-u0^2/2) without cancellation, given e0 = gauss(u0).
#[inline]
fn gauss_delta(e0: f64, u0: f64, du: f64) -> f64 {
    let x = -0.5 * du * (2.0 * u0 + du);
    if x.abs() < 1e-6 {
        e0 * x * (1.0 + 0.5 * x * (1.0 + x / 3.0))
    } else {
        e0 * x.exp_m1()
    }
}

/// Compensated sum (branch-free two-sum of each addend).
#[derive(Clone, Copy, Debug, Default)]
pub struct Compensated {
    sum: f64,
    c: f64,
}

impl Compensated {
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        let z = t - self.sum;
        self.c += (self.sum - (t - z)) + (x - z);
        self.sum = t;
    }
    pub fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Per-evaluation results and the triangle cache used for energy
/// differences.
#[derive(Clone, Debug)]
pub struct Evaluation {
    /// Flow velocity at every node (zero on boundary nodes).
    pub velocity: Vec<f64>,
    /// Node-averaged W, the discrete sqrt(1 + |Du|^2).
    pub w_node: Vec<f64>,
    pub e: Vec<f64>,
    pub energy: f64,
    pub residual: f64,
    /// dJ_h/dtau along the velocity.
    pub dissipation: f64,
    /// Largest node-averaged W over interior nodes.
    pub w_max: f64,
    /// (u_qs - u_p, u_qt - u_p, W_T) per triangle.
    tri: Vec<[f64; 3]>,
    edge_d: Vec<f64>,
    de: Vec<f64>,
    grad: Vec<f64>,
    wsum: Vec<f64>,
}

#[derive(Clone, Debug)]
pub struct EnergyForm {
    grid: Arc<SectorGrid>,
    tris: Vec<Tri>,
    edges: Vec<Edge>,
    /// Node mass in row i (the symmetrizer of the radial stencil).
    mu_row: Vec<f64>,
    beta: Vec<f64>,
    interior: Vec<bool>,
    count: Vec<f64>,
    scale: f64,
}

impl EnergyForm {
    pub fn new(grid: Arc<SectorGrid>) -> Result<Self> {
        let (nr, nt) = (grid.nr(), grid.ntheta());
        if nr < 4 || nt < 4 {
            return Err(Error::Resolution("flow needs at least 4 nodes per direction".into()));
        }
        if grid.has_origin() {
            return Err(Error::InvalidGrid("flow is posed away from the origin".into()));
        }
        let op = LinearOperator::new(&grid);
        let rad = &op.radial;
        let r = grid.r();
        let dth = grid.dtheta();
        let mut sigma = vec![0.0; nr];
        sigma[1] = 1.0;
        for i in 1..nr - 2 {
            sigma[i + 1] = sigma[i] * rad.hi[i] / rad.lo[i + 1];
        }
        let nat = |i: usize| r[i] * grid.r_s(i) * (-0.5 * r[i] * r[i]).exp();
        sigma[0] = sigma[1] * 0.5 * nat(0) / nat(1);
        sigma[nr - 1] = sigma[nr - 2] * 0.5 * nat(nr - 1) / nat(nr - 2);
        if sigma.iter().any(|s| !(s.is_finite() && *s > 0.0)) {
            return Err(Error::Resolution("radial stencil is not symmetrizable on this grid".into()));
        }
        let total: f64 = sigma.iter().sum::<f64>() * grid.width();
        let norm = sector_measure(&grid) / total;
        let mu_row: Vec<f64> = sigma.iter().map(|s| s * norm * dth).collect();
        // stencil weight of the radial edges in strip i
        let k_rad: Vec<f64> =
            (0..nr - 1).map(|i| if i == 0 { rad.lo[1] * mu_row[1] } else { rad.hi[i] * mu_row[i] }).collect();
        // Gaussian measure of one cell in strip i
        let cell: Vec<f64> = (0..nr - 1)
            .map(|i| {
                let (a, b) = (r[i], r[i + 1]);
                -dth * (-0.5 * a * a).exp() * (-0.5 * (b - a) * (b + a)).exp_m1()
            })
            .collect();
        let a_strip: Vec<f64> = (0..nr - 1).map(|i| 1.0 / ((r[i + 1] - r[i]) * (r[i + 1] - r[i]))).collect();

        let idx = |i: usize, j: usize| (i * nt + j) as u32;
        let half = (nt - 1) / 2;
        let mut tris = Vec::with_capacity(2 * (nr - 1) * (nt - 1));
        let mut push = |p: (usize, usize), qs: (usize, usize), qt: (usize, usize), strip: usize| {
            tris.push(Tri {
                p: idx(p.0, p.1),
                qs: idx(qs.0, qs.1),
                qt: idx(qt.0, qt.1),
                a: a_strip[strip],
                b: op.ang[p.0],
                w: cell[strip] / 6.0,
            });
        };
        for i in 0..nr - 1 {
            for j in 0..nt - 1 {
                if j < half {
                    push((i, j), (i + 1, j), (i, j + 1), i);
                    push((i + 1, j + 1), (i, j + 1), (i + 1, j), i);
                } else {
                    push((i, j + 1), (i + 1, j + 1), (i, j), i);
                    push((i + 1, j), (i, j), (i + 1, j + 1), i);
                }
            }
        }
        // Every interior radial edge is a leg of two triangles of its strip,
        // every angular edge of one triangle in each adjacent strip.
        let mut edges = Vec::new();
        for i in 0..nr - 1 {
            let gamma = k_rad[i] - cell[i] * a_strip[i];
            if gamma != 0.0 {
                for j in 1..nt - 1 {
                    edges.push(Edge { n0: idx(i, j), n1: idx(i + 1, j), gamma });
                }
            }
        }
        for i in 1..nr - 1 {
            let gamma = op.ang[i] * (mu_row[i] - 0.5 * (cell[i - 1] + cell[i]));
            if gamma != 0.0 {
                for j in 0..nt - 1 {
                    edges.push(Edge { n0: idx(i, j), n1: idx(i, j + 1), gamma });
                }
            }
        }
        let n = grid.len();
        let mut share = vec![0.0; n];
        let mut count = vec![0.0; n];
        for t in &tris {
            for v in [t.p, t.qs, t.qt] {
                share[v as usize] += t.w;
                count[v as usize] += 1.0;
            }
        }
        let mut beta = vec![0.0; n];
        let mut interior = vec![false; n];
        let mut moved = 0.0;
        for i in 1..nr - 1 {
            for j in 1..nt - 1 {
                let k = i * nt + j;
                interior[k] = true;
                beta[k] = mu_row[i] - share[k];
                moved += beta[k];
            }
        }
        // the inner row never moves, so parking the balance there keeps
        // J_h(0) equal to the exact measure without touching the flow
        for j in 1..nt - 1 {
            beta[j] = -moved / (nt - 2) as f64;
        }
        let scale = 2.0 * grid.n() as f64;
        Ok(Self { grid, tris, edges, mu_row, beta, interior, count, scale })
    }

    pub fn grid(&self) -> &Arc<SectorGrid> {
        &self.grid
    }

    pub fn is_interior(&self, k: usize) -> bool {
        self.interior[k]
    }

    /// Node mass used by the dissipation, including the factor 2N.
    pub fn node_mass(&self, k: usize) -> f64 {
        self.scale * self.mu_row[k / self.grid.ntheta()]
    }

    pub fn new_evaluation(&self) -> Evaluation {
        let n = self.grid.len();
        let nt = self.tris.len();
        Evaluation {
            velocity: vec![0.0; n],
            w_node: vec![1.0; n],
            e: vec![1.0; n],
            energy: 0.0,
            residual: 0.0,
            dissipation: 0.0,
            w_max: 1.0,
            tri: vec![[0.0, 0.0, 1.0]; nt],
            edge_d: vec![0.0; self.edges.len()],
            de: vec![0.0; n],
            grad: vec![0.0; n],
            wsum: vec![0.0; n],
        }
    }

    /// J_h(u).
    pub fn energy(&self, u: &[f64]) -> f64 {
        let mut ev = self.new_evaluation();
        self.evaluate(u, &mut ev);
        ev.energy
    }

    /// Evaluates the flow velocity, node weights and energy at u.
    pub fn evaluate(&self, u: &[f64], out: &mut Evaluation) {
        self.run::<false>(u, None, None, out);
    }

    /// Like [`evaluate`](Self::evaluate) at `u = u_prev + du`, and returns
    /// J_h(u) - J_h(u_prev) computed term by term from `du`, which is accurate
    /// even when the difference is far below the resolution of J_h itself.
    pub fn evaluate_step(&self, u: &[f64], du: &[f64], prev: &Evaluation, out: &mut Evaluation) -> f64 {
        self.run::<true>(u, Some(du), Some(prev), out)
    }

    fn run<const DELTA: bool>(
        &self,
        u: &[f64],
        du: Option<&[f64]>,
        prev: Option<&Evaluation>,
        out: &mut Evaluation,
    ) -> f64 {
        let n = u.len();
        for k in 0..n {
            out.e[k] = gauss(u[k]);
            out.grad[k] = 0.0;
            out.wsum[k] = 0.0;
        }
        // In step mode only the energy difference is accumulated; the new
        // energy is the previous one plus that difference.
        let mut acc = Compensated::default();
        let du = du.unwrap_or(u);
        let (ptri, pedge, pj) = match prev {
            Some(p) if DELTA => {
                for k in 0..n {
                    out.de[k] = gauss_delta(p.e[k], u[k] - du[k], du[k]);
                }
                (&p.tri[..], &p.edge_d[..], p.energy)
            }
            _ => (&[][..], &[][..], 0.0),
        };
        let e = &out.e;
        let de = &out.de;
        let grad = &mut out.grad;
        let wsum = &mut out.wsum;
        for (ti, t) in self.tris.iter().enumerate() {
            let (p, qs, qt) = (t.p as usize, t.qs as usize, t.qt as usize);
            let (up, us, ut) = (u[p], u[qs], u[qt]);
            let ds = us - up;
            let dt = ut - up;
            let w = (1.0 + t.a * ds * ds + t.b * dt * dt).sqrt();
            let (ep, es, et) = (e[p], e[qs], e[qt]);
            let m = t.w * (ep + es + et);
            if DELTA {
                let [pds, pdt, pw] = ptri[ti];
                let dds = du[qs] - du[p];
                let ddt = du[qt] - du[p];
                let dq = t.a * dds * (ds + pds) + t.b * ddt * (dt + pdt);
                let dm = t.w * (de[p] + de[qs] + de[qt]);
                acc.add(m * dq / (w + pw) + dm * pw);
            } else {
                acc.add(m * w);
            }
            let g = m / w;
            let gs = g * t.a * ds;
            let gt = g * t.b * dt;
            let tw = t.w * w;
            grad[qs] += gs - tw * us * es;
            grad[qt] += gt - tw * ut * et;
            grad[p] += -gs - gt - tw * up * ep;
            wsum[p] += w;
            wsum[qs] += w;
            wsum[qt] += w;
            out.tri[ti] = [ds, dt, w];
        }
        for (ei, edge) in self.edges.iter().enumerate() {
            let (a, b) = (edge.n0 as usize, edge.n1 as usize);
            let d = u[b] - u[a];
            if DELTA {
                acc.add(0.5 * edge.gamma * (du[b] - du[a]) * (d + pedge[ei]));
            } else {
                acc.add(0.5 * edge.gamma * d * d);
            }
            grad[b] += edge.gamma * d;
            grad[a] -= edge.gamma * d;
            out.edge_d[ei] = d;
        }
        for k in 0..n {
            if self.beta[k] != 0.0 {
                acc.add(self.beta[k] * if DELTA { de[k] } else { e[k] });
                grad[k] -= self.beta[k] * u[k] * e[k];
            }
        }
        let nt = self.grid.ntheta();
        let mut res: f64 = 0.0;
        let mut w_max: f64 = 1.0;
        let mut diss = Compensated::default();
        for k in 0..n {
            let wn = wsum[k] / self.count[k].max(1.0);
            out.w_node[k] = wn;
            if self.interior[k] {
                // v = -(W / (mu e)) dJ/du, and mu e v^2 / W = -v dJ/du
                let g = grad[k];
                let v = -wn * g / (self.mu_row[k / nt] * e[k]);
                out.velocity[k] = v;
                res = res.max(v.abs());
                w_max = w_max.max(wn);
                diss.add(v * g);
            } else {
                out.velocity[k] = 0.0;
            }
        }
        out.residual = res;
        out.w_max = w_max;
        out.dissipation = self.scale * diss.value();
        let value = self.scale * acc.value();
        if DELTA {
            out.energy = pj + value;
            value
        } else {
            out.energy = value;
            0.0
        }
    }

    /// Discrete counterpart of -int (du)^2 / sqrt(1+|Du|^2) e^{-(r^2+u^2)/2}:
    /// equals d J_h / d tau when du is the flow velocity.
    pub fn dissipation(&self, ev: &Evaluation, du: &[f64]) -> f64 {
        let nt = self.grid.ntheta();
        let mut s = Compensated::default();
        for k in 0..du.len() {
            if self.interior[k] {
                s.add(self.mu_row[k / nt] * ev.e[k] * du[k] * du[k] / ev.w_node[k]);
            }
        }
        -self.scale * s.value()
    }
}
