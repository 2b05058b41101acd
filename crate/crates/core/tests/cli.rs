use std::path::Path;
use std::process::{Command, Output};

const BIN: &str = env!("CARGO_BIN_EXE_ccgrowth");

const SMALL_AK: &str = "model.kind = ak\nmodel.L = 0.05\nmodel.sigma = 0.5\nmodel.rho = 0.06\n\
                        grid.kmax = 20\ngrid.nodes = 201\ngrid.tau = 0.08\nsolver.tol = 1e-8\n";

fn run(dir: &Path, cfg: &str, args: &[&str]) -> Output {
    let path = dir.join("run.cfg");
    std::fs::write(&path, cfg).unwrap();
    Command::new(BIN)
        .args(args)
        .arg("--config")
        .arg(&path)
        .arg("--out")
        .arg(dir.join("out"))
        .output()
        .unwrap()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

#[test]
fn solve_writes_tables_and_plots() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), SMALL_AK, &["solve"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let o = d.path().join("out");
    assert_eq!(header(&o.join("value.csv")), "k,V,c_star");
    assert_eq!(header(&o.join("convergence.csv")), "iter,delta");
    assert_eq!(std::fs::read_to_string(o.join("value.csv")).unwrap().lines().count(), 202);
    for svg in ["value.svg", "policy.svg"] {
        let s = std::fs::read_to_string(o.join(svg)).unwrap();
        assert!(s.contains("viewBox=\"0 0 800 500\"") && s.contains("<polyline"));
    }
}

#[test]
fn simulate_and_truncate_demo() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), SMALL_AK, &["simulate", "--k0", "2", "--horizon", "20"]);
    assert_eq!(out.status.code(), Some(0));
    let o = d.path().join("out");
    assert_eq!(header(&o.join("trajectory.csv")), "t,k,c");
    assert!(o.join("trajectory.svg").exists());
    let out = run(d.path(), SMALL_AK, &["truncate-demo"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("U(c^T)"));
    assert_eq!(header(&o.join("truncation_demo.csv")), "t,c,c_T");
}

#[test]
fn oracle_check_base_case_passes() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "model.kind = ak\ngrid.kmax = 20\ngrid.nodes = 801\ngrid.tau = 0.02\n";
    let out = run(d.path(), cfg, &["oracle-check"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let table = std::fs::read_to_string(d.path().join("out/oracle.csv")).unwrap();
    assert!(table.starts_with("k,V,V_oracle,rel_err_V,c,c_oracle,rel_err_c\n"));
    // k from 0.5 to 10 at spacing 0.025
    assert_eq!(table.lines().count(), 1 + 381);
}

#[test]
fn coarse_grid_fails_oracle_check() {
    let d = tempfile::tempdir().unwrap();
    let cfg = "model.kind = ak\ngrid.kmax = 20\ngrid.nodes = 81\ngrid.tau = 0.2\n";
    assert_eq!(run(d.path(), cfg, &["oracle-check"]).status.code(), Some(1));
}

fn injected(d: &Path, bump: bool) -> std::path::PathBuf {
    let b = 0.07f64.powf(-0.5);
    let mut s = String::from("k,V\n");
    for i in 0..801 {
        let k = 20.0 * i as f64 / 800.0;
        let mut v = b * k.sqrt();
        if bump && (200..220).contains(&i) {
            v -= 0.5;
        }
        s.push_str(&format!("{k},{v}\n"));
    }
    let p = d.join(if bump { "bad.csv" } else { "good.csv" });
    std::fs::write(&p, s).unwrap();
    p
}

#[test]
fn verify_injected_values() {
    let d = tempfile::tempdir().unwrap();
    let good = injected(d.path(), false);
    let out = run(d.path(), "model.kind = ak\n", &["verify", "--value", good.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    for f in ["properties.csv", "viscosity.csv", "dpp.csv", "truncation.csv"] {
        assert_eq!(header(&d.path().join("out").join(f)), "check,location,measured,bound,pass");
    }

    let bad = injected(d.path(), true);
    let ccc = "model.kind = ccc\ngrid.tau = 0.01\n";
    let out = run(d.path(), ccc, &["verify", "--value", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stdout).contains("strictly_increasing: 0/1 FAIL"));
}

#[test]
fn config_and_model_errors_exit_2() {
    let d = tempfile::tempdir().unwrap();
    let out = run(d.path(), "grid.spacing = 0.1\n", &["solve"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("grid.spacing"));
    assert_eq!(run(d.path(), "model.rho = 0.01\n", &["solve"]).status.code(), Some(2));
    assert_eq!(run(d.path(), "grid.tau = 1.0\n", &["solve"]).status.code(), Some(2));
    assert_eq!(run(d.path(), "model.kind = ccc\n", &["oracle-check"]).status.code(), Some(2));
    let missing = Command::new(BIN).args(["solve", "--config", "/nonexistent.cfg"]).output().unwrap();
    assert_eq!(missing.status.code(), Some(2));
}
