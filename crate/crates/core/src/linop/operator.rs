use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::domain::stencil::{Stencils, DRIFT_PECLET_LIMIT};

/// Whether the drift term at a node with radius `r` and inner spacing `dm`
/// uses the backward difference.
#[inline]
pub fn drift_upwind(r: f64, dm: f64) -> bool {
    r > 0.0 && (r - 1.0 / r) * dm > DRIFT_PECLET_LIMIT
}

/// Three-point radial part of L = Delta - xi.D + 1,
/// u_rr + u_r / r - r u_r, on a set of radii. Row i couples to i-1 with
/// `lo[i]` and to i+1 with `hi[i]`; the diagonal is -(lo + hi) so constants
/// are annihilated exactly. Rows 0 and n-1 are unused.
#[derive(Clone, Debug)]
pub struct RadialOperator {
    pub r: Vec<f64>,
    pub lo: Vec<f64>,
    pub hi: Vec<f64>,
    pub upwind: Vec<bool>,
}

impl RadialOperator {
    pub fn from_nodes(r: &[f64]) -> Self {
        let n = r.len();
        let mut lo = vec![0.0; n];
        let mut hi = vec![0.0; n];
        let mut upwind = vec![false; n];
        for i in 1..n.saturating_sub(1) {
            let (dm, dp) = (r[i] - r[i - 1], r[i + 1] - r[i]);
            let ri = r[i];
            let s = dm + dp;
            // u_rr
            let mut l = 2.0 / (dm * s);
            let mut h = 2.0 / (dp * s);
            // u_r / r, centered
            l += -dp / (dm * s) / ri;
            h += dm / (dp * s) / ri;
            // -r u_r
            let up = drift_upwind(ri, dm);
            upwind[i] = up;
            if up {
                l += ri / dm;
            } else {
                l -= -ri * dp / (dm * s);
                h -= ri * dm / (dp * s);
            }
            lo[i] = l;
            hi[i] = h;
        }
        Self { r: r.to_vec(), lo, hi, upwind }
    }

    pub fn new(grid: &SectorGrid) -> Self {
        Self::from_nodes(grid.r())
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Linear operator L on a fixed grid.
#[derive(Clone, Debug)]
pub struct LinearOperator {
    pub radial: RadialOperator,
    /// Coefficient of u_{j+-1} - u_j in u_tt / r^2, per row.
    pub ang: Vec<f64>,
}

impl LinearOperator {
    pub fn new(grid: &SectorGrid) -> Self {
        let c = Stencils::theta_coupling(grid);
        let ang = grid.r().iter().map(|&r| if r > 0.0 { c / (r * r) } else { 0.0 }).collect();
        Self { radial: RadialOperator::new(grid), ang }
    }

    /// L u at interior node (i, j).
    #[inline]
    pub fn at(&self, v: &[f64], nt: usize, i: usize, j: usize) -> f64 {
        let k = i * nt + j;
        let (l, h, a) = (self.radial.lo[i], self.radial.hi[i], self.ang[i]);
        let c = v[k];
        l * (v[k - nt] - c) + h * (v[k + nt] - c) + a * (v[k - 1] + v[k + 1] - 2.0 * c) + c
    }
}

/// L u at interior nodes; boundary nodes are set to zero.
pub fn apply_l(u: &Field, op: &LinearOperator) -> Field {
    let g = u.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let v = u.data();
    let mut out = vec![0.0; g.len()];
    for i in 1..nr - 1 {
        for j in 1..nt - 1 {
            out[i * nt + j] = op.at(v, nt, i, j);
        }
    }
    Field::from_vec(u.grid_arc().clone(), out).expect("same shape")
}
