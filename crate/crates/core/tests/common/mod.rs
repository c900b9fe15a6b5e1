//! Oracles shared by the integration tests.
#![allow(dead_code)]

/// Mode ODE f'' + (1/r - r) f' + (1 - m^2/r^2) f = 0 in s = ln r,
/// f_ss = r^2 f_s - (r^2 - m^2) f, integrated inward by RK4 from the cone
/// condition f_s = f at R_max (stable: the Gaussian branch decays inward).
/// Returns (r, f) samples normalised to f(1) = a.
pub fn shooting(m: f64, a: f64, r_max: f64, steps: usize) -> Vec<(f64, f64)> {
    let rhs = |s: f64, y: [f64; 2]| {
        let r2 = (2.0 * s).exp();
        [y[1], r2 * y[1] - (r2 - m * m) * y[0]]
    };
    let s_max = r_max.ln();
    let h = -s_max / steps as f64;
    let mut y = [1.0, 1.0];
    let mut s = s_max;
    let mut out = vec![(r_max, y[0])];
    for _ in 0..steps {
        let k1 = rhs(s, y);
        let k2 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k1[0], y[1] + 0.5 * h * k1[1]]);
        let k3 = rhs(s + 0.5 * h, [y[0] + 0.5 * h * k2[0], y[1] + 0.5 * h * k2[1]]);
        let k4 = rhs(s + h, [y[0] + h * k3[0], y[1] + h * k3[1]]);
        for q in 0..2 {
            y[q] += h / 6.0 * (k1[q] + 2.0 * k2[q] + 2.0 * k3[q] + k4[q]);
        }
        s += h;
        out.push((s.exp(), y[0]));
    }
    let scale = a / y[0];
    out.iter().map(|&(r, f)| (r, f * scale)).collect()
}

pub fn oracle_at(samples: &[(f64, f64)], r: f64) -> f64 {
    let i = samples.iter().position(|p| p.0 <= r).unwrap();
    let (r0, f0) = samples[i - 1];
    let (r1, f1) = samples[i];
    f0 + (f1 - f0) * (r - r0) / (r1 - r0)
}
