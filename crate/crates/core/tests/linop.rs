use std::sync::Arc;

use proptest::prelude::*;
use shrinkerlab::domain::{BoundaryData, Field, SectorGrid, Spacing};
use shrinkerlab::linop::*;

mod common;
use common::{oracle_at, shooting};

fn grid(nr: usize, nt: usize) -> Arc<SectorGrid> {
    Arc::new(SectorGrid::new(1.0, 16.0, nr, nt, 5, Spacing::LogGraded).unwrap())
}

fn profile_at(g: &SectorGrid, f: &[f64], r: f64) -> f64 {
    let i = g.r().iter().position(|&x| (x - r).abs() < 1e-12).expect("r is a node");
    f[i]
}

#[test]
fn mode_profile_matches_refinement_and_shooting() {
    let oracle = shooting(5.0, 1.0, 16.0, 400_000);
    let want = oracle_at(&oracle, 2.0);
    let mut vals = Vec::new();
    for nr in [257, 513] {
        let g = grid(nr, 65);
        let f = solve_linear_mode(&g, 5.0, 1.0, AngularSymbol::Continuous, ModeAccuracy::Extrapolated).unwrap();
        vals.push(profile_at(&g, &f, 2.0));
    }
    assert!((vals[0] - vals[1]).abs() < 1e-6, "{vals:?}");
    assert!((vals[1] - want).abs() < 1e-6, "{} vs shooting {want}", vals[1]);
}

#[test]
fn zero_mode_amplitude_gives_zero_profile() {
    let g = grid(65, 17);
    let f = solve_linear_mode(&g, 5.0, 0.0, AngularSymbol::Continuous, ModeAccuracy::Grid).unwrap();
    assert!(f.iter().all(|&x| x == 0.0));
}

#[test]
fn profile_is_conical_and_below_three_r() {
    let g = grid(257, 65);
    let f = solve_linear_mode(&g, 5.0, 1.0, AngularSymbol::Continuous, ModeAccuracy::Grid).unwrap();
    let n = f.len();
    let c = f[n - 1] / g.r()[n - 1];
    assert!(c.is_finite() && c > 0.0);
    assert!(((f[n - 10] / g.r()[n - 10]) - c).abs() < 0.05 * c);
    for (x, r) in f.iter().zip(g.r()) {
        assert!(x.abs() <= 3.0 * r);
    }
}

/// v = r - 1/r is radial, so L v = v'' + v'/r - r v' + v in closed form.
fn va_error(nr: usize) -> f64 {
    let g = grid(nr, 17);
    let op = LinearOperator::new(&g);
    let u = Field::from_fn(g.clone(), |r, _| r - 1.0 / r);
    let lu = apply_l(&u, &op);
    let exact = |r: f64| -1.0 / (r * r * r) + (1.0 / r) * (1.0 - 2.0);
    let rows = g.rows_up_to(8.0);
    let mut e: f64 = 0.0;
    for i in 1..rows {
        e = e.max((lu.at(i, 8) - exact(g.r()[i])).abs());
    }
    e
}

#[test]
fn va_closed_form_second_order() {
    let (e1, e2, e3) = (va_error(129), va_error(257), va_error(513));
    let (o1, o2) = ((e1 / e2).log2(), (e2 / e3).log2());
    assert!((o1 - 2.0).abs() < 0.3 && (o2 - 2.0).abs() < 0.3, "orders {o1} {o2} (errors {e1} {e2} {e3})");
}

#[test]
fn va_value_at_two() {
    let g = grid(513, 17);
    let op = LinearOperator::new(&g);
    let u = Field::from_fn(g.clone(), |r, _| r - 1.0 / r);
    let i = g.r().iter().position(|&r| (r - 2.0).abs() < 1e-12).unwrap();
    let v = apply_l(&u, &op).at(i, 8);
    assert!((v + 0.625).abs() < 1e-3, "{v}");
}

#[test]
fn linear_solution_growth_and_comparison() {
    let g = grid(257, 65);
    let f = BoundaryData::single(5, 1e-3).unwrap();
    let sol = solve_linear(&g, &f, AngularSymbol::for_grid(&g), ModeAccuracy::Grid).unwrap();
    assert!(growth_ratio(&sol) <= 1.0);
    assert!(comparison_probe(&sol) <= 0.0);
    for (j, &t) in g.theta().iter().enumerate() {
        assert!((sol.field.at(0, j) - f.eval(t)).abs() <= 1e-18);
    }
}

#[test]
fn zero_data_gives_zero_solution() {
    let g = grid(65, 17);
    let f = BoundaryData::new(5, vec![]).unwrap();
    let sol = solve_linear(&g, &f, AngularSymbol::for_grid(&g), ModeAccuracy::Grid).unwrap();
    assert_eq!(sol.field.max_abs(), 0.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn linear_solution_is_homogeneous(a in -1.0f64..1.0, c in 0.1f64..4.0) {
        let g = grid(65, 17);
        let sym = AngularSymbol::for_grid(&g);
        let f = BoundaryData::new(5, vec![(1, a), (3, 0.1 * a)]).unwrap();
        let u = solve_linear(&g, &f, sym, ModeAccuracy::Grid).unwrap();
        let v = solve_linear(&g, &f.scaled(c), sym, ModeAccuracy::Grid).unwrap();
        for (x, y) in u.field.data().iter().zip(v.field.data()) {
            prop_assert!((c * x - y).abs() <= 1e-13 * (1.0 + y.abs()));
        }
    }

    #[test]
    fn linear_solution_solves_stencil_equation(a in 0.01f64..1.0) {
        let g = grid(65, 17);
        let f = BoundaryData::single(5, a).unwrap();
        let u = solve_linear(&g, &f, AngularSymbol::for_grid(&g), ModeAccuracy::Grid).unwrap();
        let lu = apply_l(&u.field, &LinearOperator::new(&g));
        prop_assert!(lu.max_abs() <= 1e-12 * a);
    }
}
