use std::f64::consts::{FRAC_PI_2, PI};

use crate::error::{Error, Result};

/// Number of sample intervals on [0, pi/N] used for the C^4 norm.
pub const C4_SAMPLES: usize = 4096;

/// Boundary data f(theta) = sum_k a_k sin(k N theta) with odd k only, so that
/// f is odd about 0 and even about pi/(2N).
#[derive(Clone, Debug, PartialEq)]
pub struct BoundaryData {
    n: u32,
    modes: Vec<(u32, f64)>,
}

impl BoundaryData {
    pub fn new(n: u32, modes: Vec<(u32, f64)>) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidBoundary("symmetry order N must be >= 1".into()));
        }
        let mut seen = std::collections::BTreeSet::new();
        for &(k, a) in &modes {
            if k == 0 || k % 2 == 0 {
                return Err(Error::InvalidBoundary(format!(
                    "mode k={k} breaks the reflection symmetry; only odd k are allowed"
                )));
            }
            if !a.is_finite() {
                return Err(Error::InvalidBoundary(format!("coefficient of mode {k} is not finite")));
            }
            if !seen.insert(k) {
                return Err(Error::InvalidBoundary(format!("mode k={k} listed twice")));
            }
        }
        let mut modes = modes;
        modes.sort_by_key(|m| m.0);
        Ok(Self { n, modes })
    }

    /// a * sin(N theta).
    pub fn single(n: u32, a: f64) -> Result<Self> {
        Self::new(n, vec![(1, a)])
    }

    pub fn n(&self) -> u32 {
        self.n
    }
    pub fn modes(&self) -> &[(u32, f64)] {
        &self.modes
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self { n: self.n, modes: self.modes.iter().map(|&(k, a)| (k, a * c)).collect() }
    }

    pub fn eval(&self, theta: f64) -> f64 {
        self.derivative(theta, 0)
    }

    /// q-th derivative in theta.
    pub fn derivative(&self, theta: f64, q: u32) -> f64 {
        let mut s = 0.0;
        for &(k, a) in &self.modes {
            let m = (k * self.n) as f64;
            s += a * m.powi(q as i32) * (m * theta + q as f64 * FRAC_PI_2).sin();
        }
        s
    }

    /// max_{q <= 4} sup_theta |f^{(q)}|, sampled on [0, pi/N]. The symmetries
    /// of f make this interval representative of the whole circle.
    pub fn c4_norm(&self) -> f64 {
        let width = PI / self.n as f64;
        let mut best: f64 = 0.0;
        for p in 0..=C4_SAMPLES {
            let t = width * p as f64 / C4_SAMPLES as f64;
            for q in 0..=4 {
                best = best.max(self.derivative(t, q).abs());
            }
        }
        best
    }

    pub fn is_zero(&self) -> bool {
        self.modes.iter().all(|m| m.1 == 0.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn c4_norm_of_single_mode() {
        let f = BoundaryData::single(5, 0.01).unwrap();
        assert!((f.c4_norm() - 6.25).abs() < 1e-12);
    }

    #[test]
    fn even_modes_rejected() {
        assert!(BoundaryData::new(5, vec![(2, 1.0)]).is_err());
    }

    #[test]
    fn zeros_at_edges() {
        let f = BoundaryData::new(5, vec![(1, 1.0), (3, 0.2)]).unwrap();
        assert_eq!(f.eval(0.0), 0.0);
        assert!(f.eval(PI / 5.0).abs() < 1e-15);
        let t = 0.0371;
        assert!((f.eval(t) - f.eval(PI / 5.0 - t)).abs() < 1e-14);
    }
}
