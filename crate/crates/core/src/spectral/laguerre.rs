//! Monic orthogonal polynomials for the weight rho^alpha e^{-rho/2} on
//! (0, inf), built by Gram-Schmidt in exact rational arithmetic from the
//! moments int rho^n e^{-rho/2} d rho = n! 2^{n+1}.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Highest degree supported.
pub const MAX_DEGREE: usize = 40;

/// n! 2^{n+1}.
pub fn moment(n: usize) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= k;
    }
    f << (n + 1)
}

/// Monic polynomial in rho with exact coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct MonicPoly {
    pub exact: Vec<BigRational>,
    pub coeffs: Vec<f64>,
}

impl MonicPoly {
    fn from_exact(exact: Vec<BigRational>) -> Self {
        let coeffs = exact.iter().map(|c| c.to_f64().unwrap_or(f64::NAN)).collect();
        Self { exact, coeffs }
    }

    pub fn degree(&self) -> usize {
        self.exact.len() - 1
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * x + c)
    }
}

fn weighted(p: &[BigRational], q: &[BigRational], alpha: usize, moments: &[BigRational]) -> BigRational {
    let mut s = BigRational::zero();
    for (a, pa) in p.iter().enumerate() {
        if pa.is_zero() {
            continue;
        }
        for (b, qb) in q.iter().enumerate() {
            if !qb.is_zero() {
                s += pa * qb * &moments[a + b + alpha];
            }
        }
    }
    s
}

/// P_0, ..., P_{l_max} for the weight rho^alpha e^{-rho/2}.
pub fn orthogonal_family(alpha: usize, l_max: usize) -> Result<Vec<MonicPoly>> {
    if l_max > MAX_DEGREE {
        return Err(Error::Spectral(format!("degree {l_max} exceeds the cap {MAX_DEGREE}")));
    }
    let moments: Vec<BigRational> =
        (0..=2 * l_max + alpha).map(|n| BigRational::from_integer(moment(n))).collect();
    let mut family: Vec<Vec<BigRational>> = Vec::with_capacity(l_max + 1);
    let mut norms: Vec<BigRational> = Vec::with_capacity(l_max + 1);
    for l in 0..=l_max {
        let mut p = vec![BigRational::zero(); l + 1];
        p[l] = BigRational::one();
        let mono = p.clone();
        for (s, q) in family.iter().enumerate() {
            let c = weighted(&mono, q, alpha, &moments) / &norms[s];
            for (a, qa) in q.iter().enumerate() {
                p[a] -= &c * qa;
            }
        }
        norms.push(weighted(&p, &p, alpha, &moments));
        family.push(p);
    }
    Ok(family.into_iter().map(MonicPoly::from_exact).collect())
}

/// Exact Gram matrix <P_l, P_s> of a family.
pub fn gram_matrix(family: &[MonicPoly], alpha: usize) -> Vec<Vec<BigRational>> {
    let top = family.iter().map(|p| p.degree()).max().unwrap_or(0);
    let moments: Vec<BigRational> =
        (0..=2 * top + alpha).map(|n| BigRational::from_integer(moment(n))).collect();
    family
        .iter()
        .map(|p| family.iter().map(|q| weighted(&p.exact, &q.exact, alpha, &moments)).collect())
        .collect()
}

/// Largest |G_ls| / sqrt(G_ll G_ss) over l != s, evaluated from the exact
/// Gram matrix.
pub fn max_relative_offdiag(gram: &[Vec<BigRational>]) -> f64 {
    let n = gram.len();
    let mut worst: f64 = 0.0;
    for l in 0..n {
        for s in 0..n {
            if l == s {
                continue;
            }
            let num = gram[l][s].to_f64().unwrap_or(f64::INFINITY).abs();
            let den = (gram[l][l].to_f64().unwrap_or(f64::NAN) * gram[s][s].to_f64().unwrap_or(f64::NAN)).sqrt();
            worst = worst.max(num / den);
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_polynomials() {
        let f = orthogonal_family(5, 2).unwrap();
        assert_eq!(f[0].coeffs, vec![1.0]);
        assert_eq!(f[1].coeffs, vec![-12.0, 1.0]);
    }

    #[test]
    fn moments_match_factorials() {
        assert_eq!(moment(0), BigInt::from(2));
        assert_eq!(moment(3), BigInt::from(6 * 16));
    }

    #[test]
    fn degree_cap() {
        assert!(orthogonal_family(5, MAX_DEGREE + 1).is_err());
    }
}
