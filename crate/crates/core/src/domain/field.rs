use std::io::{BufRead, Write};
use std::sync::Arc;

use crate::domain::grid::SectorGrid;
use crate::error::{Error, Result};

/// Nodal values on a sector grid, row-major in (i, j).
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<SectorGrid>,
    data: Vec<f64>,
}

impl Field {
    pub fn zeros(grid: Arc<SectorGrid>) -> Self {
        let n = grid.len();
        Self { grid, data: vec![0.0; n] }
    }

    pub fn from_vec(grid: Arc<SectorGrid>, data: Vec<f64>) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::ShapeMismatch { expected: grid.len(), got: data.len() });
        }
        Ok(Self { grid, data })
    }

    /// Samples `f(r, theta)` at every node.
    pub fn from_fn(grid: Arc<SectorGrid>, f: impl Fn(f64, f64) -> f64) -> Self {
        let mut data = Vec::with_capacity(grid.len());
        for &r in grid.r() {
            for &t in grid.theta() {
                data.push(f(r, t));
            }
        }
        Self { grid, data }
    }

    pub fn grid(&self) -> &SectorGrid {
        &self.grid
    }
    pub fn grid_arc(&self) -> &Arc<SectorGrid> {
        &self.grid
    }
    pub fn data(&self) -> &[f64] {
        &self.data
    }
    pub fn data_mut(&mut self) -> &mut [f64] {
        &mut self.data
    }
    pub fn into_vec(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.data[self.grid.idx(i, j)]
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    pub fn same_grid(&self, other: &Field) -> bool {
        Arc::ptr_eq(&self.grid, &other.grid) || self.grid.same_nodes(&other.grid)
    }

    pub fn check_grid(&self, other: &Field) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch)
        }
    }

    /// Elementwise a*self + b*other.
    pub fn combine(&self, a: f64, other: &Field, b: f64) -> Result<Field> {
        self.check_grid(other)?;
        let data = self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect();
        Ok(Field { grid: self.grid.clone(), data })
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Field {
        Field { grid: self.grid.clone(), data: self.data.iter().map(|&v| f(v)).collect() }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// sup |self - other| over all nodes.
    pub fn max_abs_diff(&self, other: &Field) -> Result<f64> {
        self.check_grid(other)?;
        Ok(self.data.iter().zip(&other.data).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// sup |self - other| over rows with r <= r_cut.
    pub fn max_abs_diff_within(&self, other: &Field, r_cut: f64) -> Result<f64> {
        self.check_grid(other)?;
        let rows = self.grid.rows_up_to(r_cut);
        let nt = self.grid.ntheta();
        Ok(self.data[..rows * nt]
            .iter()
            .zip(&other.data[..rows * nt])
            .fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// Exact zeros on both angular edges.
    pub fn is_symmetric_dirichlet(&self) -> bool {
        let nt = self.grid.ntheta();
        (0..self.grid.nr()).all(|i| self.at(i, 0) == 0.0 && self.at(i, nt - 1) == 0.0)
    }

    /// Writes `r,theta,u` rows with 17 significant digits.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "r,theta,u")?;
        let g = &self.grid;
        for (i, &r) in g.r().iter().enumerate() {
            for (j, &t) in g.theta().iter().enumerate() {
                writeln!(w, "{:.16e},{:.16e},{:.16e}", r, t, self.data[g.idx(i, j)])?;
            }
        }
        Ok(())
    }

    /// Reads a field written by [`Field::write_csv`] and checks that the
    /// node coordinates match `grid`.
    pub fn read_csv<R: BufRead>(grid: Arc<SectorGrid>, r: R) -> Result<Field> {
        let mut lines = r.lines();
        match lines.next() {
            Some(Ok(h)) if h.trim() == "r,theta,u" => {}
            Some(Ok(h)) => return Err(Error::Parse(format!("unexpected header {h:?}"))),
            Some(Err(e)) => return Err(e.into()),
            None => return Err(Error::Parse("empty field file".into())),
        }
        let mut data = Vec::with_capacity(grid.len());
        for (k, line) in lines.enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let parts: Vec<&str> = line.split(',').collect();
            if parts.len() != 3 {
                return Err(Error::Parse(format!("line {}: expected 3 columns", k + 2)));
            }
            let parse = |s: &str| {
                s.trim().parse::<f64>().map_err(|e| Error::Parse(format!("line {}: {e}", k + 2)))
            };
            let (rv, tv, uv) = (parse(parts[0])?, parse(parts[1])?, parse(parts[2])?);
            let n = data.len();
            if n >= grid.len() {
                return Err(Error::ShapeMismatch { expected: grid.len(), got: n + 1 });
            }
            let (i, j) = (n / grid.ntheta(), n % grid.ntheta());
            let tol = 1e-12 * grid.r_max();
            if (rv - grid.r()[i]).abs() > tol || (tv - grid.theta()[j]).abs() > 1e-12 {
                return Err(Error::Parse(format!("line {}: node ({rv}, {tv}) not on grid", k + 2)));
            }
            data.push(uv);
        }
        Field::from_vec(grid, data)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::Spacing;

    #[test]
    fn csv_round_trip_is_exact() {
        let g = Arc::new(SectorGrid::new(1.0, 8.0, 9, 5, 5, Spacing::LogGraded).unwrap());
        let u = Field::from_fn(g.clone(), |r, t| (r * 1.234567).sin() * (5.0 * t).sin() / 3.0);
        let mut buf = Vec::new();
        u.write_csv(&mut buf).unwrap();
        let v = Field::read_csv(g, buf.as_slice()).unwrap();
        assert_eq!(u.data(), v.data());
    }

    #[test]
    fn grid_mismatch_detected() {
        let g1 = Arc::new(SectorGrid::new(1.0, 8.0, 9, 5, 5, Spacing::LogGraded).unwrap());
        let g2 = Arc::new(SectorGrid::new(1.0, 8.0, 9, 7, 5, Spacing::LogGraded).unwrap());
        let a = Field::zeros(g1);
        let b = Field::zeros(g2);
        assert!(a.max_abs_diff(&b).is_err());
    }
}
