use crate::domain::grid::{SectorGrid, Spacing};
use crate::error::{Error, Result};
use crate::linop::operator::RadialOperator;

/// Angular symbol replacing -d^2/dtheta^2 on sin(m theta).
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum AngularSymbol {
    /// m^2, the symbol of the continuous operator.
    Continuous,
    /// Symbol of the grid's angular second difference, so that modal
    /// solutions are exact discrete solutions of L u = 0.
    Discrete { dtheta: f64 },
}

impl AngularSymbol {
    pub fn for_grid(grid: &SectorGrid) -> Self {
        AngularSymbol::Discrete { dtheta: grid.dtheta() }
    }

    pub fn value(&self, m: f64) -> f64 {
        match *self {
            AngularSymbol::Continuous => m * m,
            AngularSymbol::Discrete { dtheta } => (1.0 - (m * dtheta).cos()) / (1.0 - dtheta.cos()),
        }
    }
}

/// Accuracy of a radial mode solve.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ModeAccuracy {
    /// Second-order solve on the grid nodes.
    Grid,
    /// Richardson extrapolation against a solve on the bisected node set.
    Extrapolated,
}

/// Solves a_i f_{i-1} + b_i f_i + c_i f_{i+1} = 0 on interior rows with
/// f_0 = value and the cone row f_{n-1} = f_{n-2} r_{n-1}/r_{n-2}.
fn solve_rows(op: &RadialOperator, symbol: f64, value: f64) -> Result<Vec<f64>> {
    let n = op.len();
    if n < 4 {
        return Err(Error::Resolution("mode solve needs at least 4 radial nodes".into()));
    }
    let r = &op.r;
    let m = n - 2;
    let cone = r[n - 1] / r[n - 2];
    let mut a = vec![0.0; m];
    let mut b = vec![0.0; m];
    let mut c = vec![0.0; m];
    let mut d = vec![0.0; m];
    for k in 0..m {
        let i = k + 1;
        a[k] = op.lo[i];
        c[k] = op.hi[i];
        b[k] = -(op.lo[i] + op.hi[i]) - symbol / (r[i] * r[i]) + 1.0;
    }
    d[0] = -a[0] * value;
    a[0] = 0.0;
    b[m - 1] += c[m - 1] * cone;
    c[m - 1] = 0.0;
    // Thomas elimination
    for k in 1..m {
        let w = a[k] / b[k - 1];
        b[k] -= w * c[k - 1];
        d[k] -= w * d[k - 1];
    }
    let mut f = vec![0.0; n];
    f[0] = value;
    f[m] = d[m - 1] / b[m - 1];
    for k in (0..m - 1).rev() {
        f[k + 1] = (d[k] - c[k] * f[k + 2]) / b[k];
    }
    f[n - 1] = f[n - 2] * cone;
    if f.iter().any(|x| !x.is_finite()) {
        return Err(Error::Resolution("mode solve produced non-finite values".into()));
    }
    Ok(f)
}

/// Nodes with every interval bisected in the grid coordinate.
pub fn bisect_nodes(r: &[f64], spacing: Spacing) -> Vec<f64> {
    let mut out = Vec::with_capacity(2 * r.len() - 1);
    for w in r.windows(2) {
        out.push(w[0]);
        out.push(match spacing {
            Spacing::Uniform => 0.5 * (w[0] + w[1]),
            Spacing::LogGraded => (w[0] * w[1]).sqrt(),
        });
    }
    out.push(*r.last().unwrap());
    out
}

/// Radial profile f of the modal solution f(r) sin(m theta) of L u = 0 with
/// f(R) = a, sampled at the grid radii.
pub fn solve_linear_mode(
    grid: &SectorGrid,
    m: f64,
    a: f64,
    symbol: AngularSymbol,
    accuracy: ModeAccuracy,
) -> Result<Vec<f64>> {
    let s = symbol.value(m);
    let coarse = solve_rows(&RadialOperator::new(grid), s, a)?;
    match accuracy {
        ModeAccuracy::Grid => Ok(coarse),
        ModeAccuracy::Extrapolated => {
            let fine_r = bisect_nodes(grid.r(), grid.spacing());
            let fine = solve_rows(&RadialOperator::from_nodes(&fine_r), s, a)?;
            Ok(coarse
                .iter()
                .enumerate()
                .map(|(i, &fc)| (4.0 * fine[2 * i] - fc) / 3.0)
                .collect())
        }
    }
}
