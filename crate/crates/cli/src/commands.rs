use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use num_rational::BigRational;
use num_traits::ToPrimitive;
use serde::Serialize;

use shrinkerlab::config::SolverConfig;
use shrinkerlab::domain::field::Field;
use shrinkerlab::flow::{write_history, FlowRun};
use shrinkerlab::pipeline::{prepare, sweep, Problem, SweepParam, SweepRun, SWEEP_HEADER};
use shrinkerlab::spectral::{gram_matrix, max_relative_offdiag, orthogonal_family};
use shrinkerlab::verify::{cone_refinement, uniqueness_experiment, VerificationReport};
use shrinkerlab::Error;

use crate::output::{create, ensure_dir, write_json};
use crate::{Cli, Command, Common};

pub const EXIT_FAILED_CHECKS: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_NOT_CONVERGED: u8 = 3;
pub const EXIT_BARRIER: u8 = 4;

/// Marker for a failed barrier certificate.
#[derive(Debug)]
struct BarrierFailure(String);

impl std::fmt::Display for BarrierFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "barrier certificate failed: {}", self.0)
    }
}

impl std::error::Error for BarrierFailure {}

pub fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<BarrierFailure>().is_some() {
        return EXIT_BARRIER;
    }
    match e.downcast_ref::<Error>() {
        Some(Error::NotConverged { .. }) => EXIT_NOT_CONVERGED,
        Some(Error::Io(_)) => EXIT_FAILED_CHECKS,
        Some(_) => EXIT_CONFIG,
        None => EXIT_FAILED_CHECKS,
    }
}

pub fn run(cli: &Cli) -> Result<u8> {
    match &cli.command {
        Command::Solve => {
            let cfg = load_config(&cli.common)?;
            let out = out_dir(&cli.common, &cfg);
            let (problem, run) = solve_to_dir(&cfg, &out)?;
            let report = problem.verify(&run)?;
            write_json(&out.join("verification.json"), &report)?;
            run.ensure_converged()?;
            Ok(0)
        }
        Command::Verify { full } => {
            let cfg = load_config(&cli.common)?;
            let out = out_dir(&cli.common, &cfg);
            let (problem, run) = solve_to_dir(&cfg, &out)?;
            run.ensure_converged()?;
            let mut report = problem.verify(&run)?;
            if *full {
                extra_checks(&problem, &run, &mut report)?;
            }
            write_json(&out.join("verification.json"), &report)?;
            for name in report.failures() {
                eprintln!("check failed: {name}");
            }
            Ok(if report.all_pass() { 0 } else { EXIT_FAILED_CHECKS })
        }
        Command::Spectrum { n, k_max, l_max } => {
            let out = out_dir(&cli.common, &SolverConfig::default());
            spectrum(*n, *k_max, *l_max, &out)?;
            Ok(0)
        }
        Command::Sweep { param, values, drift_cut } => {
            let cfg = load_config(&cli.common)?;
            let out = out_dir(&cli.common, &cfg);
            let p: SweepParam = param.parse()?;
            cmd_sweep(&cfg, p, values, cli.common.jobs, *drift_cut, &out)
        }
    }
}

fn load_config(common: &Common) -> Result<SolverConfig> {
    let mut cfg = match &common.config {
        Some(p) => SolverConfig::load(p).with_context(|| format!("reading config {}", p.display()))?,
        None => SolverConfig::default(),
    };
    if common.force {
        cfg.force = true;
    }
    if let Some(s) = common.snapshot_every {
        cfg.snapshot_every = s;
    }
    if let Some(o) = &common.out {
        cfg.output_dir = o.display().to_string();
    }
    cfg.validate()?;
    Ok(cfg)
}

fn out_dir(common: &Common, cfg: &SolverConfig) -> PathBuf {
    match std::env::var_os("SHRINKERLAB_OUT") {
        Some(v) if !v.is_empty() => PathBuf::from(v),
        _ => common.out.clone().unwrap_or_else(|| PathBuf::from(&cfg.output_dir)),
    }
}

#[derive(Serialize)]
struct Summary<'a> {
    eps: f64,
    eps_max: Option<f64>,
    #[serde(rename = "K1_est")]
    k1_est: Option<f64>,
    #[serde(rename = "K1")]
    k1: Option<f64>,
    converged: bool,
    tau: f64,
    steps: u64,
    residual: f64,
    compatibility_defect: f64,
    max_barrier_violation: f64,
    monotonicity: &'a shrinkerlab::flow::Monotonicity,
}

/// Prepares the problem, writes the certificate, runs the flow with
/// snapshots and writes the history, final field and summary.
fn solve_to_dir(cfg: &SolverConfig, out: &Path) -> Result<(Problem, FlowRun)> {
    let problem = prepare(cfg)?;
    ensure_dir(out)?;
    write_json(&out.join("config.json"), cfg)?;
    if let Some(cert) = &problem.certificate {
        write_json(&out.join("barrier_certificate.json"), cert)?;
        if !cert.pass {
            return Err(BarrierFailure(format!(
                "max E(u+) = {:e}, min E(u-) = {:e}, tolerance {:e}",
                cert.max_e_plus, cert.min_e_minus, cert.tol
            ))
            .into());
        }
    }
    let snap_dir = out.join("snapshots");
    if cfg.snapshot_every > 0 {
        ensure_dir(&snap_dir)?;
    }
    let mut snap_err: Option<anyhow::Error> = None;
    let every = cfg.snapshot_every;
    let run = problem.solve(|s| {
        if every > 0 && s.step_count % every == 0 && snap_err.is_none() {
            let path = snap_dir.join(format!("snapshot_{:09}.csv", s.step_count));
            if let Err(e) = write_field(&path, &s.u) {
                snap_err = Some(e);
            }
        }
    })?;
    if let Some(e) = snap_err {
        return Err(e);
    }
    write_run(&problem, &run, out)?;
    Ok((problem, run))
}

fn write_field(path: &Path, u: &Field) -> Result<()> {
    u.write_csv(create(path)?)?;
    Ok(())
}

fn write_run(problem: &Problem, run: &FlowRun, out: &Path) -> Result<()> {
    write_history(&run.history, create(&out.join("diagnostics.csv"))?)?;
    write_field(&out.join("field.csv"), &run.state.u)?;
    let summary = Summary {
        eps: problem.linear.eps,
        eps_max: problem.eps_max,
        k1_est: problem.k1_est,
        k1: problem.k1,
        converged: run.converged,
        tau: run.state.tau,
        steps: run.state.step_count,
        residual: run.residual,
        compatibility_defect: run.compat_defect,
        max_barrier_violation: run.max_barrier_violation,
        monotonicity: &run.monotonicity,
    };
    write_json(&out.join("summary.json"), &summary)
}

/// Uniqueness experiment and cone refinement against a grid with half the
/// resolution in each direction.
fn extra_checks(problem: &Problem, run: &FlowRun, report: &mut VerificationReport) -> Result<()> {
    let cfg = &problem.config;
    if let Some(bs) = &problem.barriers {
        let u = uniqueness_experiment(&problem.linear, bs, &problem.stencils, &cfg.flow(), 0.5)?;
        report.insert("uniqueness_experiment", u.entry);
    }
    let mut coarse = cfg.clone();
    coarse.nr = (cfg.nr - 1) / 2 + 1;
    coarse.ntheta = (cfg.ntheta - 1) / 2 + 1;
    let cp = prepare(&coarse)?;
    let crun = cp.solve(|_| {})?;
    crun.ensure_converged()?;
    let sup = |r: &FlowRun| r.history.last().map_or(f64::NAN, |d| d.cone_sup);
    report.insert("cone_refinement", cone_refinement(sup(&crun), sup(run)));
    Ok(())
}

fn cmd_sweep(cfg: &SolverConfig, p: SweepParam, values: &[f64], jobs: usize, cut: f64, out: &Path) -> Result<u8> {
    ensure_dir(out)?;
    write_json(&out.join("config.json"), cfg)?;
    let write_err = std::sync::Mutex::new(None::<anyhow::Error>);
    let on_run = |r: &SweepRun| {
        let dir = out.join(format!("run_{:03}", r.index));
        let res = ensure_dir(&dir)
            .and_then(|_| write_json(&dir.join("config.json"), &r.config))
            .and_then(|_| write_run(&r.problem, &r.run, &dir));
        if let Err(e) = res {
            write_err.lock().expect("lock").get_or_insert(e);
        }
    };
    let rows = sweep(cfg, p, values, jobs, cut, &on_run)?;
    if let Some(e) = write_err.into_inner().expect("lock") {
        return Err(e);
    }
    let mut w = create(&out.join("sweep.csv"))?;
    use std::io::Write;
    writeln!(w, "{SWEEP_HEADER}")?;
    for r in &rows {
        writeln!(w, "{}", r.csv())?;
    }
    w.flush()?;
    let failed = rows.iter().filter(|r| r.error.is_some()).count();
    if failed > 0 {
        eprintln!("{failed} of {} sweep runs failed; see the error column", rows.len());
        return Ok(EXIT_NOT_CONVERGED);
    }
    Ok(0)
}

fn spectrum(n: u32, k_max: u32, l_max: usize, out: &Path) -> Result<()> {
    if n == 0 || k_max == 0 {
        bail!(Error::Spectral("N and k_max must be positive".into()));
    }
    ensure_dir(out)?;
    use std::io::Write;
    let mut ev = create(&out.join("eigenvalues.csv"))?;
    let mut pc = create(&out.join("polynomials.csv"))?;
    let mut gm = create(&out.join("gram.csv"))?;
    writeln!(ev, "k,l,m,lambda")?;
    writeln!(pc, "k,l,power,exact,value")?;
    writeln!(gm, "k,l,s,exact,relative")?;
    let mut worst: f64 = 0.0;
    for k in 1..=k_max {
        let alpha = (k * n) as usize;
        let fam = orthogonal_family(alpha, l_max)?;
        for (l, p) in fam.iter().enumerate() {
            writeln!(ev, "{k},{l},{alpha},{}", 1 - (alpha + 2 * l) as i64)?;
            for (a, c) in p.exact.iter().enumerate() {
                writeln!(pc, "{k},{l},{a},{c},{:.16e}", p.coeffs[a])?;
            }
        }
        let g = gram_matrix(&fam, alpha);
        for l in 0..g.len() {
            for s in 0..g.len() {
                let rel = relative(&g, l, s);
                writeln!(gm, "{k},{l},{s},{},{rel:.16e}", g[l][s])?;
            }
        }
        worst = worst.max(max_relative_offdiag(&g));
    }
    ev.flush()?;
    pc.flush()?;
    gm.flush()?;
    eprintln!("largest relative Gram off-diagonal: {worst:e}");
    Ok(())
}

fn relative(g: &[Vec<BigRational>], l: usize, s: usize) -> f64 {
    let d = (g[l][l].to_f64().unwrap_or(f64::NAN) * g[s][s].to_f64().unwrap_or(f64::NAN)).sqrt();
    g[l][s].to_f64().unwrap_or(f64::NAN) / d
}
