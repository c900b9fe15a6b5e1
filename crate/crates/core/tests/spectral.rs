use std::f64::consts::PI;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use shrinkerlab::domain::field::Field;
use shrinkerlab::domain::grid::{SectorGrid, Spacing};
use shrinkerlab::domain::quadrature::WeightedNorms;
use shrinkerlab::domain::stencil::Stencils;
use shrinkerlab::spectral::eigen::{verify_eigen, EigenPair};
use shrinkerlab::spectral::expand::{expand, poincare_ratio, random_compact_field, reconstruct};
use shrinkerlab::spectral::laguerre::{gram_matrix, max_relative_offdiag, orthogonal_family};

fn q(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

/// Coefficients (lowest first) of the generalized Laguerre polynomial
/// L_l^{(alpha)}(x) from the three-term recurrence
/// (n+1) L_{n+1} = (2n+1+alpha-x) L_n - (n+alpha) L_{n-1}.
fn laguerre_recurrence(alpha: usize, l: usize) -> Vec<BigRational> {
    let a = alpha as i64;
    let mut prev = vec![q(1)];
    if l == 0 {
        return prev;
    }
    let mut cur = vec![q(1 + a), q(-1)];
    for n in 1..l as i64 {
        let mut next = vec![BigRational::zero(); cur.len() + 1];
        for (i, c) in cur.iter().enumerate() {
            next[i] += c * q(2 * n + 1 + a);
            next[i + 1] -= c;
        }
        for (i, c) in prev.iter().enumerate() {
            next[i] -= c * q(n + a);
        }
        for c in next.iter_mut() {
            *c /= q(n + 1);
        }
        prev = cur;
        cur = next;
    }
    cur
}

/// (-2)^l l! L_l^{(alpha)}(rho / 2) as a polynomial in rho: the monic member.
fn monic_from_laguerre(alpha: usize, l: usize) -> Vec<BigRational> {
    let lag = laguerre_recurrence(alpha, l);
    let mut scale = BigRational::one();
    for k in 1..=l as i64 {
        scale *= q(-2 * k);
    }
    let mut half_pow = BigRational::one();
    lag.iter()
        .map(|c| {
            let v = c * &half_pow * &scale;
            half_pow /= q(2);
            v
        })
        .collect()
}

#[test]
fn eigenvalue_examples() {
    for (k, l, n, want) in [(1, 0, 5, -4.0), (1, 3, 5, -10.0), (3, 0, 7, -20.0)] {
        assert_eq!(EigenPair::new(k, l, n, false).unwrap().lambda, want);
    }
    assert!(EigenPair::new(2, 0, 5, false).is_err());
    assert_eq!(EigenPair::new(2, 1, 5, true).unwrap().lambda, -11.0);
}

#[test]
fn first_radial_polynomial() {
    let p = &orthogonal_family(5, 1).unwrap()[1];
    assert_eq!(p.exact, vec![q(-12), q(1)]);
    let pair = EigenPair::new(1, 1, 5, false).unwrap();
    assert!((pair.eval(2.0, PI / 10.0) + 256.0).abs() < 1e-12);
}

#[test]
fn polynomials_match_laguerre_recurrence() {
    for alpha in [5usize, 6, 7, 15, 21, 25, 35] {
        let fam = orthogonal_family(alpha, 10).unwrap();
        for (l, p) in fam.iter().enumerate() {
            assert_eq!(p.exact, monic_from_laguerre(alpha, l), "alpha={alpha} l={l}");
        }
    }
}

#[test]
fn gram_matrix_is_diagonal() {
    for n in [5u32, 6, 7] {
        for k in 1..=5u32 {
            let alpha = (k * n) as usize;
            let g = gram_matrix(&orthogonal_family(alpha, 10).unwrap(), alpha);
            for (l, row) in g.iter().enumerate() {
                for (s, v) in row.iter().enumerate() {
                    assert_eq!(v.is_zero(), l != s);
                }
            }
            assert_eq!(max_relative_offdiag(&g), 0.0);
        }
    }
}

fn refine_grid(nr: usize, ntheta: usize) -> Arc<SectorGrid> {
    Arc::new(SectorGrid::new(1.0, 8.0, nr, ntheta, 5, Spacing::LogGraded).unwrap())
}

#[test]
fn eigen_residual_second_order() {
    for k in [1u32, 3] {
        for l in [0usize, 2] {
            let pair = EigenPair::new(k, l, 5, false).unwrap();
            let res: Vec<f64> = [(129, 33), (257, 65), (513, 129)]
                .iter()
                .map(|&(nr, nt)| verify_eigen(&pair, &refine_grid(nr, nt.max(8 * k as usize + 1))).unwrap())
                .collect();
            for w in res.windows(2) {
                let ratio = w[0] / w[1];
                assert!((ratio - 4.0).abs() <= 0.5, "k={k} l={l} residuals {res:?}");
            }
        }
    }
}

#[test]
fn wrong_eigenvalue_is_detected() {
    let mut pair = EigenPair::new(1, 2, 5, false).unwrap();
    pair.lambda = -4.0;
    for (nr, nt) in [(129, 33), (257, 65)] {
        assert!(verify_eigen(&pair, &refine_grid(nr, nt)).unwrap() > 1.0);
    }
}

#[test]
fn plane_has_zero_residual() {
    let g = refine_grid(257, 65);
    let u = Field::from_fn(g.clone(), |r, t| r * t.cos());
    let op = shrinkerlab::linop::operator::LinearOperator::new(&g);
    let lu = shrinkerlab::linop::operator::apply_l(&u, &op);
    assert!(lu.max_abs() < 1e-10 * u.max_abs(), "{}", lu.max_abs());
}

fn wedge() -> Arc<SectorGrid> {
    Arc::new(SectorGrid::wedge(12.0, 513, 129, 5).unwrap())
}

#[test]
fn eigenfunctions_are_h_orthogonal() {
    let g = wedge();
    let norms = WeightedNorms::new(&g).unwrap();
    let a = EigenPair::new(1, 0, 5, false).unwrap().sample(&g);
    let b = EigenPair::new(1, 1, 5, false).unwrap().sample(&g);
    let cross = norms.inner_product_h(&a, &b).unwrap();
    let scale = norms.norm_h(&a) * norms.norm_h(&b);
    assert!(cross.abs() < 1e-8 * scale, "{cross} vs {scale}");
}

#[test]
fn expansion_round_trip() {
    let g = wedge();
    let norms = WeightedNorms::new(&g).unwrap();
    let p10 = EigenPair::new(1, 0, 5, false).unwrap().sample(&g);
    let p31 = EigenPair::new(3, 1, 5, false).unwrap().sample(&g);
    let u = p10.combine(1.0, &p31, 2.0).unwrap();
    let e = expand(&u, &norms, 3, 2).unwrap();
    assert!((e.get(1, 0).unwrap() - 1.0).abs() < 1e-6);
    assert!((e.get(3, 1).unwrap() - 2.0).abs() < 1e-6);
    for (p, c) in e.pairs.iter().zip(&e.coeffs) {
        if (p.k, p.l) != (1, 0) && (p.k, p.l) != (3, 1) {
            assert!(c.abs() < 1e-6, "k={} l={} c={c}", p.k, p.l);
        }
    }
    // the round trip is judged where the Gaussian weight is not negligible
    let back = reconstruct(&e, &g);
    let err = back.max_abs_diff_within(&u, 3.0).unwrap() / u.max_abs_diff_within(&Field::zeros(g.clone()), 3.0).unwrap();
    assert!(err < 1e-6, "{err}");

    let three = expand(&p10.map(|x| 3.0 * x), &norms, 3, 2).unwrap();
    assert!((three.get(1, 0).unwrap() - 3.0).abs() < 1e-8);
    let zero = expand(&Field::zeros(g.clone()), &norms, 3, 2).unwrap();
    assert!(zero.coeffs.iter().all(|&c| c == 0.0));
    assert!(expand(&u, &norms, 40, 2).is_err());
}

#[test]
fn poincare_equality_cases() {
    // the O(h^2) error of l = 1 is about 1.4e-3 on the default test wedge
    let g = Arc::new(SectorGrid::wedge(10.0, 1025, 257, 5).unwrap());
    let norms = WeightedNorms::new(&g).unwrap();
    let st = Stencils::new(&g).unwrap();
    for (l, want) in [(0usize, 6.0), (1, 8.0)] {
        let u = EigenPair::new(1, l, 5, false).unwrap().sample(&g);
        let r = poincare_ratio(&u, &norms, &st).unwrap();
        assert!((r - want).abs() < 1e-3, "l={l}: {r}");
    }
    assert!(poincare_ratio(&Field::zeros(g), &norms, &st).is_err());
}

#[test]
fn poincare_bump() {
    let g = wedge();
    let norms = WeightedNorms::new(&g).unwrap();
    let st = Stencils::new(&g).unwrap();
    let bump = |x: f64, a: f64, b: f64| {
        if x <= a || x >= b {
            0.0
        } else {
            let t = (2.0 * x - a - b) / (b - a);
            (-1.0 / (1.0 - t * t)).exp()
        }
    };
    let u = Field::from_fn(g, |r, t| bump(r, 2.0, 3.0) * bump(t, PI / 20.0, 3.0 * PI / 20.0));
    assert!(poincare_ratio(&u, &norms, &st).unwrap() >= 6.0 - 1e-3);
}

#[test]
fn poincare_random_fields() {
    let g = wedge();
    let norms = WeightedNorms::new(&g).unwrap();
    let st = Stencils::new(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..100 {
        let u = random_compact_field(&g, &mut rng);
        let r = poincare_ratio(&u, &norms, &st).unwrap();
        assert!(r >= 6.0 - 1e-3, "{r}");
    }
}

proptest! {
    #[test]
    fn eigenvalue_identity(k in 1u32..=5, l in 0usize..=5, n in 5u32..=7) {
        let p = EigenPair::new(k, l, n, true).unwrap();
        prop_assert_eq!(p.lambda + (k * n + 2 * l as u32) as f64, 1.0);
        prop_assert_eq!(p.poly.degree(), l);
    }

    #[test]
    fn expansion_is_linear(a in -3.0f64..3.0, b in -3.0f64..3.0) {
        let g = Arc::new(SectorGrid::wedge(12.0, 257, 65, 5).unwrap());
        let norms = WeightedNorms::new(&g).unwrap();
        let p = EigenPair::new(1, 0, 5, false).unwrap().sample(&g);
        let s = EigenPair::new(1, 2, 5, false).unwrap().sample(&g);
        let u = p.combine(a, &s, b).unwrap();
        let e = expand(&u, &norms, 1, 2).unwrap();
        prop_assert!((e.get(1, 0).unwrap() - a).abs() < 1e-6 * (1.0 + a.abs() + b.abs()));
        prop_assert!((e.get(1, 2).unwrap() - b).abs() < 1e-6 * (1.0 + a.abs() + b.abs()));
    }
}

#[test]
fn monic_scaling_sanity() {
    // leading coefficient of the recurrence output is (-1)^l / l!
    let lag = laguerre_recurrence(5, 4);
    assert_eq!(lag[4].to_f64().unwrap(), 1.0 / 24.0);
}
