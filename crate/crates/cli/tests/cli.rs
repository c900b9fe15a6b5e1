use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use shrinkerlab::config::SolverConfig;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_shrinkerlab"));
    c.env_remove("SHRINKERLAB_OUT");
    c
}

fn write_config(dir: &Path, json: &str) -> PathBuf {
    let p = dir.join("config_in.json");
    fs::write(&p, json).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn read_csv(p: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(p).unwrap().lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

const SMALL: &str = r#"{"nr": 65, "ntheta": 17}"#;

#[test]
fn spectrum_table() {
    let d = tempfile::tempdir().unwrap();
    let out = d.path().join("spectrum");
    let o = run(&["spectrum", "--N", "5", "--k-max", "2", "--l-max", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let ev = read_csv(&out.join("eigenvalues.csv"));
    let lambdas: Vec<i64> = ev.iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(lambdas, vec![-4, -6, -8, -9, -11, -13]);
    for row in read_csv(&out.join("gram.csv")) {
        let rel: f64 = row[4].parse().unwrap();
        if row[1] != row[2] {
            assert!(rel.abs() <= 1e-10);
        } else {
            assert_eq!(rel, 1.0);
        }
    }
    // P_{1,1} = rho - 12
    let pc = read_csv(&out.join("polynomials.csv"));
    let p11: Vec<&str> = pc.iter().filter(|r| r[0] == "1" && r[1] == "1").map(|r| r[3].as_str()).collect();
    assert_eq!(p11, vec!["-12", "1"]);

    let out0 = d.path().join("spectrum0");
    assert_eq!(code(&run(&["spectrum", "--k-max", "3", "--l-max", "0", "--out", out0.to_str().unwrap()])), 0);
    assert_eq!(read_csv(&out0.join("gram.csv")).len(), 3);
}

#[test]
fn zero_data_solves_immediately() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"nr": 65, "ntheta": 17, "coefficients": {}}"#);
    let out = d.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["config.json", "diagnostics.csv", "field.csv", "summary.json", "verification.json"] {
        assert!(out.join(f).exists(), "{f} missing");
    }
    assert!(!out.join("barrier_certificate.json").exists());
    let field = read_csv(&out.join("field.csv"));
    assert!(field.iter().all(|r| r[2].parse::<f64>().unwrap() == 0.0));
    let s: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(s["steps"], 0);
}

#[test]
fn inadmissible_data_is_a_config_error() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"nr": 65, "ntheta": 17, "eps_fraction": 2.0}"#);
    let out = d.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("admissible bound"), "{err}");
    assert!(!out.join("summary.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let d = tempfile::tempdir().unwrap();
    for bad in [r#"{"nr": 65, "bogus": 1}"#, r#"{"coefficients": {"2": 1.0}}"#, r#"{"R": 2.0, "R_max": 1.5}"#, "not json"] {
        let cfg = write_config(d.path(), bad);
        let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", d.path().join("o").to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{bad}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn non_convergence_exits_three() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"nr": 65, "ntheta": 17, "tau_max": 0.01}"#);
    let out = d.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(out.join("diagnostics.csv").exists());
}

#[test]
fn barrier_failure_exits_four() {
    // a large R0 shrinks the barrier amplitude below what forced data needs
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"nr": 65, "ntheta": 17, "R0": 3.0, "eps_scale": 0.05}"#);
    let out = d.path().join("o");
    let o = run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--force"]);
    assert_eq!(code(&o), 4, "{}", String::from_utf8_lossy(&o.stderr));
    let cert: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("barrier_certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["pass"], false);
    assert!(!out.join("field.csv").exists());
}

#[test]
fn environment_overrides_out_flag() {
    let d = tempfile::tempdir().unwrap();
    let env_out = d.path().join("env");
    let flag_out = d.path().join("flag");
    let o = bin()
        .env("SHRINKERLAB_OUT", &env_out)
        .args(["spectrum", "--out", flag_out.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(env_out.join("eigenvalues.csv").exists());
    assert!(!flag_out.exists());
}

fn dir_bytes(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out = Vec::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(p) = stack.pop() {
        for e in fs::read_dir(&p).unwrap() {
            let e = e.unwrap().path();
            if e.is_dir() {
                stack.push(e);
            } else {
                out.push((e.strip_prefix(dir).unwrap().display().to_string(), fs::read(&e).unwrap()));
            }
        }
    }
    out.sort();
    out
}

#[test]
fn reruns_are_byte_identical_and_config_round_trips() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), r#"{"nr": 65, "ntheta": 17, "snapshot_every": 500}"#);
    let mut dirs = Vec::new();
    for name in ["a", "b"] {
        let out = d.path().join(name);
        let o = bin().env("SHRINKERLAB_OUT", &out).args(["verify", "--config", cfg.to_str().unwrap()]).output().unwrap();
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        dirs.push(out);
    }
    let (a, b) = (dir_bytes(&dirs[0]), dir_bytes(&dirs[1]));
    assert!(a.iter().any(|(n, _)| n.starts_with("snapshots")));
    assert_eq!(a.len(), b.len());
    for ((na, ba), (nb, bb)) in a.iter().zip(&b) {
        assert_eq!(na, nb);
        assert!(ba == bb, "{na} differs");
    }

    let written = SolverConfig::load(&dirs[0].join("config.json")).unwrap();
    let want = SolverConfig { nr: 65, ntheta: 17, snapshot_every: 500, ..SolverConfig::default() };
    assert_eq!(written, want);
    let back = SolverConfig::from_json(&written.to_json()).unwrap();
    assert_eq!(back, written);
}

#[test]
fn verify_report_passes_on_small_grid() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("o");
    let o = run(&["verify", "--full", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rep: serde_json::Value = serde_json::from_str(&fs::read_to_string(out.join("verification.json")).unwrap()).unwrap();
    let checks = rep["checks"].as_object().unwrap();
    for name in ["residual", "sandwich", "barrier_certificate", "max_gradient_boundary", "uniqueness_experiment", "cone_refinement"] {
        assert_eq!(checks[name]["pass"], true, "{name}");
    }
    assert_eq!(rep["config"]["nr"], 65);
}

#[test]
fn outputs_carry_seventeen_digits() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("o");
    assert_eq!(code(&run(&["solve", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 0);
    let text = fs::read_to_string(out.join("summary.json")).unwrap();
    let s: serde_json::Value = serde_json::from_str(&text).unwrap();
    let eps = s["eps"].as_f64().unwrap();
    assert!(text.contains(&format!("{eps:.16e}")), "{text}");
    let row = &read_csv(&out.join("diagnostics.csv"))[1];
    assert!(row.iter().all(|x| x.contains('e') && x.split('e').next().unwrap().trim_start_matches('-').len() == 18));
}

#[test]
fn sweep_writes_rows_and_run_directories() {
    let d = tempfile::tempdir().unwrap();
    let cfg = write_config(d.path(), SMALL);
    let out = d.path().join("o");
    let o = run(&[
        "sweep",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
        "--param",
        "eps_fraction",
        "--values",
        "0.4,0.2,0.1",
        "--jobs",
        "2",
    ]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let rows = read_csv(&out.join("sweep.csv"));
    assert_eq!(rows.len(), 3);
    for i in 0..3 {
        assert!(out.join(format!("run_{i:03}")).join("field.csv").exists());
    }
    // gap ratio per halving of eps is cubic
    for r in &rows[1..] {
        let order: f64 = r[12].parse().unwrap();
        assert!((order - 8.0).abs() < 2.0, "{order}");
    }
    let two = run(&["sweep", "--param", "bogus", "--values", "1,2", "--out", d.path().join("t").to_str().unwrap()]);
    assert_eq!(code(&two), 2);
}
