//! Extension of a sector field to the whole exterior of the disk.
//!
//! The sector field is continued by u(-theta) = -u(theta) and
//! u(pi/N - theta) = u(theta). Evaluation folds any angle into the
//! fundamental interval [0, pi/(2N)] and interpolates with tensor cubic
//! Lagrange stencils in (s, theta).

use std::f64::consts::PI;

use crate::domain::field::Field;
use crate::error::{Error, Result};

#[derive(Clone, Debug)]
pub struct PlaneExtension<'a> {
    u: &'a Field,
    odd_sign: f64,
    shift: isize,
}

fn lagrange4(x: f64) -> [f64; 4] {
    // nodes at -1, 0, 1, 2
    [
        -x * (x - 1.0) * (x - 2.0) / 6.0,
        (x + 1.0) * (x - 1.0) * (x - 2.0) / 2.0,
        -(x + 1.0) * x * (x - 2.0) / 2.0,
        (x + 1.0) * x * (x - 1.0) / 6.0,
    ]
}

impl<'a> PlaneExtension<'a> {
    pub fn new(u: &'a Field) -> Self {
        Self { u, odd_sign: -1.0, shift: 0 }
    }

    /// Test hook: replaces the sign used under theta -> -theta. Any value
    /// other than -1 produces a corrupted extension.
    pub fn with_reflection_sign(mut self, s: f64) -> Self {
        self.odd_sign = s;
        self
    }

    /// Shifts every interpolation stencil by `k` nodes. Comparing shifted and
    /// unshifted evaluations estimates the interpolation error.
    pub fn with_stencil_shift(mut self, k: isize) -> Self {
        self.shift = k;
        self
    }

    pub fn field(&self) -> &Field {
        self.u
    }

    /// Maps theta into [0, pi/(2N)] and returns (theta', sign).
    pub fn fold(&self, theta: f64) -> (f64, f64) {
        let w = PI / self.u.grid().n() as f64;
        let mut t = theta.rem_euclid(2.0 * w);
        let mut sign = 1.0;
        if t >= w {
            // u(theta + pi/N) = -u(theta)
            t -= w;
            sign = self.odd_sign;
        }
        if t > 0.5 * w {
            t = w - t;
        }
        (t, sign)
    }

    fn node_value(&self, i: usize, j: isize) -> f64 {
        let g = self.u.grid();
        let last = g.ntheta() as isize - 1;
        let (jj, s) = if j < 0 {
            (-j, self.odd_sign)
        } else if j > last {
            (2 * last - j, self.odd_sign)
        } else {
            (j, 1.0)
        };
        s * self.u.at(i, jj as usize)
    }

    /// Value at polar coordinates with R <= r <= R_max and any theta.
    pub fn eval(&self, r: f64, theta: f64) -> Result<f64> {
        let g = self.u.grid();
        let tol = 1e-12 * g.r_max();
        if !(r >= g.r_inner() - tol && r <= g.r_max() + tol) {
            return Err(Error::InvalidConfig(format!(
                "radius {r} outside [{}, {}]",
                g.r_inner(),
                g.r_max()
            )));
        }
        let (t, sign) = self.fold(theta);
        Ok(sign * self.interp(r, t))
    }

    pub fn eval_xy(&self, x: f64, y: f64) -> Result<f64> {
        self.eval(x.hypot(y), y.atan2(x))
    }

    fn interp(&self, r: f64, t: f64) -> f64 {
        let g = self.u.grid();
        let (nr, nt) = (g.nr() as isize, g.ntheta() as isize);
        let s0 = g.s_of(g.r()[0]);
        let xs = ((g.s_of(r.max(g.r()[0]).max(1e-300)) - s0) / g.ds()).clamp(0.0, (nr - 1) as f64);
        let xt = t / g.dtheta();
        let snap = |x: f64| {
            let n = x.round();
            if (x - n).abs() < 1e-9 {
                n
            } else {
                x
            }
        };
        let (xs, xt) = (snap(xs), snap(xt));
        let is = (xs.floor() as isize).min(nr - 2);
        let jt = (xt.floor() as isize).min(nt - 2);
        let fs = xs - is as f64;
        let ft = xt - jt as f64;
        if fs == 0.0 && ft == 0.0 && self.shift == 0 {
            return self.node_value(is as usize, jt);
        }
        // radial stencil nodes base..base+3, clamped to the grid
        let base = (is - 1 + self.shift).clamp(0, nr - 4);
        let ws = lagrange4(xs - (base + 1) as f64);
        let tbase = jt - 1 + self.shift;
        let wt = lagrange4(xt - (tbase + 1) as f64);
        let mut v = 0.0;
        for (a, wa) in ws.iter().enumerate() {
            let i = (base + a as isize) as usize;
            let mut row = 0.0;
            for (b, wb) in wt.iter().enumerate() {
                row += wb * self.node_value(i, tbase + b as isize);
            }
            v += wa * row;
        }
        v
    }
}

/// Maximum disagreement of the extended field with its own symmetry
/// relations, sampled at every node and its images under the symmetry group.
pub fn symmetry_deviation(ext: &PlaneExtension<'_>) -> f64 {
    let g = ext.field().grid();
    let w = g.width();
    let mut worst: f64 = 0.0;
    let angles = g.theta();
    for &r in g.r() {
        for &t in angles {
            let base = match ext.eval(r, t) {
                Ok(v) => v,
                Err(_) => return f64::INFINITY,
            };
            let checks = [
                (ext.eval(r, -t), -base),
                (ext.eval(r, w - t), base),
                (ext.eval(r, t + 2.0 * w), base),
                (ext.eval(r, t + w), -base),
                (ext.eval(r, t - 4.0 * w), base),
            ];
            for (got, want) in checks {
                let got = got.unwrap_or(f64::INFINITY);
                worst = worst.max((got - want).abs());
            }
        }
    }
    worst
}
