use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Radial node placement.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Spacing {
    /// Equal steps in r.
    Uniform,
    /// Equal steps in s = ln r.
    LogGraded,
}

/// Largest outer radius accepted. Beyond this the Gaussian weight
/// e^{-r^2/2} underflows double precision.
pub const R_MAX_LIMIT: f64 = 36.0;

/// Tensor-product polar grid on the sector R <= r <= R_max, 0 <= theta <= pi/N.
///
/// Nodes are stored row-major: index `i * ntheta + j` is (r_i, theta_j).
#[derive(Clone, Debug, PartialEq)]
pub struct SectorGrid {
    n: u32,
    r_inner: f64,
    r_max: f64,
    spacing: Spacing,
    r: Vec<f64>,
    theta: Vec<f64>,
    ds: f64,
    dtheta: f64,
}

impl SectorGrid {
    /// Builds the grid on Omega_{R,N} truncated at `r_max`.
    pub fn new(
        r_inner: f64,
        r_max: f64,
        nr: usize,
        ntheta: usize,
        n: u32,
        spacing: Spacing,
    ) -> Result<Self> {
        if !(r_inner > 0.0) || !r_inner.is_finite() {
            return Err(Error::InvalidGrid(format!("inner radius must be positive, got {r_inner}")));
        }
        Self::build(r_inner, r_max, nr, ntheta, n, spacing)
    }

    /// Uniform grid with r_0 = 0, used for the full wedge Omega_{0,N} in
    /// spectral checks. Derivatives are not evaluated on the origin row; it
    /// carries zero quadrature weight.
    pub fn wedge(r_max: f64, nr: usize, ntheta: usize, n: u32) -> Result<Self> {
        Self::build(0.0, r_max, nr, ntheta, n, Spacing::Uniform)
    }

    fn build(
        r_inner: f64,
        r_max: f64,
        nr: usize,
        ntheta: usize,
        n: u32,
        spacing: Spacing,
    ) -> Result<Self> {
        if !(r_max > r_inner) || !r_max.is_finite() {
            return Err(Error::InvalidGrid(format!(
                "outer radius {r_max} must exceed inner radius {r_inner}"
            )));
        }
        if r_max > R_MAX_LIMIT {
            return Err(Error::InvalidGrid(format!(
                "outer radius {r_max} exceeds the supported limit {R_MAX_LIMIT}"
            )));
        }
        if nr < 3 || ntheta < 3 {
            return Err(Error::InvalidGrid(format!(
                "need at least 3 nodes per direction, got nr={nr}, ntheta={ntheta}"
            )));
        }
        if n < 1 {
            return Err(Error::InvalidGrid("symmetry order N must be >= 1".into()));
        }
        let m = (nr - 1) as f64;
        let (r, ds) = match spacing {
            Spacing::Uniform => {
                let ds = (r_max - r_inner) / m;
                let mut r: Vec<f64> = (0..nr).map(|i| r_inner + i as f64 * ds).collect();
                r[nr - 1] = r_max;
                (r, ds)
            }
            Spacing::LogGraded => {
                if r_inner <= 0.0 {
                    return Err(Error::InvalidGrid("log grading needs a positive inner radius".into()));
                }
                let s0 = r_inner.ln();
                let ds = (r_max.ln() - s0) / m;
                let mut r: Vec<f64> = (0..nr).map(|i| (s0 + i as f64 * ds).exp()).collect();
                r[0] = r_inner;
                r[nr - 1] = r_max;
                (r, ds)
            }
        };
        let width = PI / n as f64;
        let dtheta = width / (ntheta - 1) as f64;
        let mut theta: Vec<f64> = (0..ntheta).map(|j| j as f64 * dtheta).collect();
        theta[ntheta - 1] = width;
        Ok(Self { n, r_inner, r_max, spacing, r, theta, ds, dtheta })
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn r_inner(&self) -> f64 {
        self.r_inner
    }
    pub fn r_max(&self) -> f64 {
        self.r_max
    }
    pub fn spacing(&self) -> Spacing {
        self.spacing
    }
    pub fn nr(&self) -> usize {
        self.r.len()
    }
    pub fn ntheta(&self) -> usize {
        self.theta.len()
    }
    pub fn len(&self) -> usize {
        self.r.len() * self.theta.len()
    }
    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
    pub fn r(&self) -> &[f64] {
        &self.r
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    /// Step of the grid coordinate s (s = r for uniform, s = ln r for log).
    pub fn ds(&self) -> f64 {
        self.ds
    }
    pub fn dtheta(&self) -> f64 {
        self.dtheta
    }
    /// Opening angle pi/N.
    pub fn width(&self) -> f64 {
        PI / self.n as f64
    }
    pub fn has_origin(&self) -> bool {
        self.r_inner == 0.0
    }

    /// dr/ds at row i.
    pub fn r_s(&self, i: usize) -> f64 {
        match self.spacing {
            Spacing::Uniform => 1.0,
            Spacing::LogGraded => self.r[i],
        }
    }

    /// Grid coordinate of a radius.
    pub fn s_of(&self, r: f64) -> f64 {
        match self.spacing {
            Spacing::Uniform => r,
            Spacing::LogGraded => r.ln(),
        }
    }

    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        i * self.theta.len() + j
    }

    /// Mesh parameter: the larger of the relative radial step and the
    /// angular step.
    pub fn h(&self) -> f64 {
        let mut hr: f64 = 0.0;
        for i in 0..self.nr() - 1 {
            let base = if self.r[i] > 0.0 { self.r[i] } else { self.r[i + 1] };
            hr = hr.max((self.r[i + 1] - self.r[i]) / base);
        }
        hr.max(self.dtheta)
    }

    /// Radial cell width adjacent to the inner boundary.
    pub fn first_cell(&self) -> f64 {
        self.r[1] - self.r[0]
    }

    /// Rows whose radius does not exceed `r`.
    pub fn rows_up_to(&self, r: f64) -> usize {
        self.r.iter().take_while(|&&ri| ri <= r * (1.0 + 1e-14)).count()
    }

    /// True when the two grids have identical node sets.
    pub fn same_nodes(&self, other: &SectorGrid) -> bool {
        self == other
    }
}

/// Convenience wrapper matching the configuration vocabulary.
pub fn build_grid(
    r_inner: f64,
    r_max: f64,
    nr: usize,
    ntheta: usize,
    n: u32,
    spacing: Spacing,
) -> Result<SectorGrid> {
    SectorGrid::new(r_inner, r_max, nr, ntheta, n, spacing)
}
