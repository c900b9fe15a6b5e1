use crate::domain::field::Field;
use crate::domain::stencil::{gradient_hessian, Derivatives, Stencils};
use crate::linop::operator::LinearOperator;

/// Stencil form of E(u) = g^{ij}(Du) D_ij u - xi.Du + u at interior nodes,
/// written as L u - D_iu D_ju D_iju / (1 + |Du|^2) so that its linear part
/// is exactly the stencil operator L.
pub fn apply_e(u: &Field, op: &LinearOperator, st: &Stencils) -> Field {
    let d = gradient_hessian(u, st);
    apply_e_with(u, op, &d)
}

pub fn apply_e_with(u: &Field, op: &LinearOperator, d: &Derivatives) -> Field {
    let g = u.grid();
    let (nr, nt) = (g.nr(), g.ntheta());
    let v = u.data();
    let mut out = vec![0.0; g.len()];
    for i in 1..nr - 1 {
        for j in 1..nt - 1 {
            let k = i * nt + j;
            out[k] = op.at(v, nt, i, j) - d.hess_grad_grad(k) / (1.0 + d.grad_norm2(k));
        }
    }
    Field::from_vec(u.grid_arc().clone(), out).expect("same shape")
}

/// -D_iu D_ju D_iju / (1 + |Du|^2) at every node, boundary rows included
/// (one-sided stencils there). This is E(u) - L(u).
pub fn nonlinear_part(u: &Field, st: &Stencils) -> Field {
    let d = gradient_hessian(u, st);
    let data = (0..u.grid().len()).map(|k| -d.hess_grad_grad(k) / (1.0 + d.grad_norm2(k))).collect();
    Field::from_vec(u.grid_arc().clone(), data).expect("same shape")
}

/// Mean curvature over r of the graph, H = g^{ij} D_ij u / sqrt(1+|Du|^2),
/// at node k.
pub fn mean_curvature(d: &Derivatives, k: usize) -> f64 {
    let w2 = 1.0 + d.grad_norm2(k);
    (d.laplacian(k) - d.hess_grad_grad(k) / w2) / w2.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::{SectorGrid, Spacing};
    use std::sync::Arc;

    #[test]
    fn plane_is_a_solution() {
        let g = Arc::new(SectorGrid::new(1.0, 16.0, 65, 17, 5, Spacing::LogGraded).unwrap());
        let op = LinearOperator::new(&g);
        let st = Stencils::new(&g).unwrap();
        let u = Field::from_fn(g, |r, t| r * t.cos());
        let e = apply_e(&u, &op, &st).max_abs();
        assert!(e < 1e-12, "{e}");
    }
}
