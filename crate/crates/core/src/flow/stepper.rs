use std::sync::Arc;

use crate::domain::field::Field;
use crate::domain::grid::SectorGrid;
use crate::error::{Error, Result};
use crate::flow::energy::{EnergyForm, Evaluation};

/// Snapshot of the flow: time, field, last step size and step count.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub tau: f64,
    pub u: Field,
    pub dtau: f64,
    pub step_count: u64,
}

impl FlowState {
    pub fn new(u: Field) -> Self {
        Self { tau: 0.0, u, dtau: 0.0, step_count: 0 }
    }
}

/// What one accepted step did to the energy.
#[derive(Clone, Copy, Debug)]
pub struct StepInfo {
    pub dtau: f64,
    /// J(u_{n+1}) - J(u_n).
    pub delta_j: f64,
    /// dJ/dtau at u_n.
    pub dissipation: f64,
}

/// Per-node explicit limits: min(dr^2, (r dtheta)^2) / 4 and dr / r.
fn node_limits(grid: &SectorGrid) -> (Vec<f64>, Vec<f64>) {
    let (nr, nt) = (grid.nr(), grid.ntheta());
    let r = grid.r();
    let mut diff = vec![f64::INFINITY; grid.len()];
    let mut adv = vec![f64::INFINITY; grid.len()];
    for i in 1..nr - 1 {
        let dr = (r[i] - r[i - 1]).min(r[i + 1] - r[i]);
        let ra = r[i] * grid.dtheta();
        for j in 1..nt - 1 {
            diff[i * nt + j] = 0.25 * (dr * dr).min(ra * ra);
            adv[i * nt + j] = dr / r[i];
        }
    }
    (diff, adv)
}

/// c * min over nodes of min(dr^2, (r dtheta)^2) / (4 (1 + |Du|^2)) and
/// dr / r, with |Du|^2 supplied per node.
pub fn cfl_dt(grid: &SectorGrid, grad2: impl Fn(usize) -> f64, c_cfl: f64) -> f64 {
    let (diff, adv) = node_limits(grid);
    let mut dt = f64::INFINITY;
    for k in 0..grid.len() {
        if diff[k].is_finite() {
            dt = dt.min(diff[k] / (1.0 + grad2(k))).min(adv[k]);
        }
    }
    c_cfl * dt
}

/// Forward Euler for the discrete gradient flow of the Gaussian area.
///
/// Interior nodes move with the flow velocity; the inner row and both angular
/// edges are never written, and the outer row follows the cone closure
/// u_{nr-1} = u_{nr-2} r_{nr-1} / r_{nr-2}.
pub struct Stepper {
    form: EnergyForm,
    c_cfl: f64,
    diff: f64,
    adv: f64,
    cur: Evaluation,
    next: Evaluation,
    du: Vec<f64>,
    work: Vec<f64>,
}

impl Stepper {
    pub fn new(grid: Arc<SectorGrid>, c_cfl: f64, u: &Field) -> Result<Self> {
        if !(c_cfl > 0.0 && c_cfl <= 1.0) {
            return Err(Error::InvalidConfig(format!("c_cfl = {c_cfl} must lie in (0, 1]")));
        }
        if u.grid_arc().as_ref() != grid.as_ref() {
            return Err(Error::GridMismatch);
        }
        let (diff, adv) = node_limits(&grid);
        let diff = diff.iter().copied().fold(f64::INFINITY, f64::min);
        let adv = adv.iter().copied().fold(f64::INFINITY, f64::min);
        let form = EnergyForm::new(grid)?;
        let mut cur = form.new_evaluation();
        form.evaluate(u.data(), &mut cur);
        let next = cur.clone();
        let n = u.data().len();
        Ok(Self { form, c_cfl, diff, adv, cur, next, du: vec![0.0; n], work: vec![0.0; n] })
    }

    pub fn form(&self) -> &EnergyForm {
        &self.form
    }

    /// Evaluation at the current state.
    pub fn current(&self) -> &Evaluation {
        &self.cur
    }

    /// Time step allowed at the current state. The smallest cell and the
    /// largest discrete sqrt(1 + |Du|^2) are combined even when they sit at
    /// different nodes, which only makes the step smaller.
    pub fn cfl_dt(&self) -> f64 {
        let w = self.cur.w_max;
        self.c_cfl * (self.diff / (w * w)).min(self.adv)
    }

    /// Advances `state` by one step of size `dtau` (the CFL step when None).
    pub fn step(&mut self, state: &mut FlowState, dtau: Option<f64>) -> Result<StepInfo> {
        let limit = self.cfl_dt();
        let dt = dtau.unwrap_or(limit);
        if !(dt > 0.0) || dt > limit * (1.0 + 1e-12) {
            return Err(Error::InvalidConfig(format!("step {dt:e} violates the CFL limit {limit:e}")));
        }
        let g = self.form.grid().clone();
        let (nr, nt) = (g.nr(), g.ntheta());
        let v = &self.cur.velocity;
        let u = state.u.data();
        self.work.copy_from_slice(u);
        for k in 0..u.len() {
            if self.form.is_interior(k) {
                self.work[k] = u[k] + dt * v[k];
            }
        }
        let r = g.r();
        let ratio = r[nr - 1] / r[nr - 2];
        for j in 1..nt - 1 {
            let k = (nr - 1) * nt + j;
            self.work[k] = self.work[k - nt] * ratio;
        }
        for k in 0..u.len() {
            self.du[k] = self.work[k] - u[k];
        }
        if self.work.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite { step: state.step_count, tau: state.tau });
        }
        let dissipation = self.cur.dissipation;
        let delta_j = self.form.evaluate_step(&self.work, &self.du, &self.cur, &mut self.next);
        std::mem::swap(&mut self.cur, &mut self.next);
        state.u.data_mut().copy_from_slice(&self.work);
        state.tau += dt;
        state.dtau = dt;
        state.step_count += 1;
        Ok(StepInfo { dtau: dt, delta_j, dissipation })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::grid::Spacing;

    #[test]
    fn boundary_rows_untouched() {
        let g = Arc::new(SectorGrid::new(1.0, 16.0, 65, 17, 5, Spacing::LogGraded).unwrap());
        let u = Field::from_fn(g.clone(), |r, t| 0.01 * (5.0 * t).sin() / r);
        let mut u = u;
        for i in 0..g.nr() {
            u.data_mut()[i * 17] = 0.0;
            u.data_mut()[i * 17 + 16] = 0.0;
        }
        let before = u.clone();
        let mut st = Stepper::new(g.clone(), 0.4, &u).unwrap();
        let mut s = FlowState::new(u);
        for _ in 0..20 {
            let info = st.step(&mut s, None).unwrap();
            assert!(info.dissipation <= 0.0);
        }
        for j in 0..17 {
            assert_eq!(s.u.at(0, j).to_bits(), before.at(0, j).to_bits());
        }
        for i in 0..g.nr() {
            assert_eq!(s.u.at(i, 0), 0.0);
            assert_eq!(s.u.at(i, 16), 0.0);
        }
    }
}
