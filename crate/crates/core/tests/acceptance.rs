mod common;

use ccgrowth::model::{CccParams, ModelSpec};
use ccgrowth::oracle::{ak_policy, ak_value, AkParams};
use ccgrowth::solver::{solve_value, Solution, SolverConfig};
use ccgrowth::verifier::*;
use std::io::Write;
use std::process::Command;
use std::time::Instant;

fn ak() -> ModelSpec {
    ModelSpec::ak(0.05, 0.5, 0.06, None).unwrap()
}

fn ccc() -> ModelSpec {
    ModelSpec::ccc(CccParams::default(), 0.5, 0.06, None).unwrap()
}

fn solve(model: &ModelSpec, nodes: usize, tau: f64, tol: f64) -> Solution {
    let mut cfg = SolverConfig::new(20.0, nodes, tau);
    cfg.tol = tol;
    let sol = solve_value(model, &cfg).unwrap();
    assert!(sol.converged);
    sol
}

/// Max relative value and policy errors against the closed form on [0.5, 10].
fn oracle_errors(sol: &Solution) -> (f64, f64) {
    let p = AkParams::new(0.05, 0.5, 0.06).unwrap();
    let g = sol.value.grid;
    let (mut ev, mut ec) = (0.0f64, 0.0f64);
    for i in 0..g.nodes {
        let k = g.k(i);
        if (0.5 - 1e-12..=10.0 + 1e-12).contains(&k) {
            ev = ev.max((sol.value.values[i] - ak_value(&p, k)).abs() / ak_value(&p, k));
            ec = ec.max((sol.policy.c[i] - ak_policy(&p, k)).abs() / ak_policy(&p, k));
        }
    }
    (ev, ec)
}

fn line(n: usize, pass: bool, detail: String) {
    // written straight to stderr so the line survives output capture
    let mut e = std::io::stderr().lock();
    let _ = writeln!(e, "criterion {n}: {} ({detail})", if pass { "PASS" } else { "FAIL" });
}

fn report_detail(r: &Report) -> String {
    let failed: Vec<String> = r.failures().take(3).map(|f| format!("{} at {}", f.check, f.location)).collect();
    format!("{}/{} rows pass{}", r.rows.iter().filter(|x| x.pass).count(), r.rows.len(),
        if failed.is_empty() { String::new() } else { format!("; first failures: {}", failed.join(", ")) })
}

fn criterion_1() -> (bool, Solution) {
    let (x, b) = common::scalar_ak_iteration(0.05, 0.5, 0.06, 0.1);
    let p = AkParams::new(0.05, 0.5, 0.06).unwrap();
    let provenance = (x - p.m()).abs() < 1e-6 && (b - p.b()).abs() < 1e-9;
    let t = Instant::now();
    let sol = solve(&ak(), 801, 0.02, 1e-9);
    let secs = t.elapsed().as_secs_f64();
    let (ev, ec) = oracle_errors(&sol);
    let pass = provenance && ev <= 0.01 && ec <= 0.03 && secs <= 60.0;
    line(1, pass, format!("m = {x:.8}, B = {b:.8}; value error {ev:.3e} <= 1e-2, policy error {ec:.3e} <= 3e-2, {secs:.1} s <= 60 s"));
    (pass, sol)
}

fn criterion_2(ak_sol: &Solution, ccc_sol: &Solution) -> bool {
    let a = verify_value_properties(&ak(), &ak_sol.value, &PropertyOptions::default());
    let c = verify_value_properties(&ccc(), &ccc_sol.value, &PropertyOptions::default());
    let pass = a.all_pass() && c.all_pass();
    line(2, pass, format!("AK {}; CCC {}", report_detail(&a), report_detail(&c)));
    pass
}

fn criterion_3(ak_sol: &Solution, ccc_sol: &Solution) -> bool {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, m, sol, tau) in [("AK", ak(), ak_sol, 0.02), ("CCC", ccc(), ccc_sol, 0.01)] {
        let tol = viscosity_tolerance(tau, sol.value.grid.dk());
        let r = verify_viscosity(&m, &sol.value, 200, tol);
        let frac = r.rows_named("viscosity_fraction").next().unwrap().measured;
        let nodes = r.rows_named("viscosity_node").count();
        let slopes_ok = r.rows_named("c_plus").count() == 0;
        pass &= frac >= 0.95 && slopes_ok && nodes == 200;
        detail.push(format!("{name} {:.1}% of {nodes} nodes at tol {tol:.2e}, slopes positive: {slopes_ok}", 100.0 * frac));
    }
    line(3, pass, detail.join("; "));
    pass
}

fn criterion_4(ak_sol: &Solution, ccc_sol: &Solution) -> bool {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, m, sol, tau) in [("AK", ak(), ak_sol, 0.02), ("CCC", ccc(), ccc_sol, 0.01)] {
        let opts = DppOptions { tau, nodes: 10, controls: 100, seed: 42, certificate: sol.certificate };
        let r = verify_dpp(&m, &sol.value, &sol.policy, &opts);
        let one = r.rows_named("dpp_one_sided").filter(|x| x.pass).count();
        let pol = r.rows_named("dpp_policy").filter(|x| x.pass).count();
        pass &= r.all_pass() && one == 10 && pol == 10;
        detail.push(format!("{name} one-sided {one}/10 k0 x 100 controls, policy-side {pol}/10"));
    }
    line(4, pass, detail.join("; "));
    pass
}

fn criterion_5() -> bool {
    let mut pass = true;
    let mut detail = Vec::new();
    for (name, m) in [("AK", ak()), ("CCC", ccc())] {
        let t = verify_truncation_gain(&m, 1.0, 2.0, 100, 42);
        let b = verify_bump_gain(&m, 50, 42);
        let o = verify_orbit_bounds(&m, 100, 42);
        let tg = t.rows_named("truncation_gain").filter(|x| x.pass).count();
        let bg = b.rows_named("bump_gain").filter(|x| x.pass).count();
        let pairs = o.rows_named("comparison_weak").count();
        pass &= t.all_pass() && b.all_pass() && o.all_pass() && tg == 100 && bg == 50 && pairs == 100;
        detail.push(format!("{name} truncation {tg}/100, bump {bg}/50, comparison and growth {}", report_detail(&o)));
    }
    line(5, pass, detail.join("; "));
    pass
}

fn criterion_6() -> bool {
    let a = verify_constant_controls(&ak(), 50, 42);
    let c = verify_constant_controls(&ccc(), 50, 42);
    let pass = a.all_pass() && c.all_pass() && a.rows.len() == 50 && c.rows.len() == 50;
    line(6, pass, format!("AK {}; CCC {}", report_detail(&a), report_detail(&c)));
    pass
}

fn criterion_7(base: &Solution) -> bool {
    let m = ak();
    let mut errs = Vec::new();
    let mut dpps = Vec::new();
    for (i, (nodes, tau)) in [(801, 0.02), (1601, 0.01), (3201, 0.005)].into_iter().enumerate() {
        let sol = if i == 0 { base.clone() } else { solve(&m, nodes, tau, 1e-9) };
        errs.push(oracle_errors(&sol).0);
        dpps.push(dpp_policy_residual(&m, &sol.value, &sol.policy, tau, 10));
    }
    let pass = errs.windows(2).all(|w| w[1] < w[0]) && dpps.windows(2).all(|w| w[1] < w[0]);
    line(7, pass, format!("oracle error {:.3e} > {:.3e} > {:.3e}; DPP residual {:.3e} > {:.3e} > {:.3e}",
        errs[0], errs[1], errs[2], dpps[0], dpps[1], dpps[2]));
    pass
}

fn criterion_8() -> bool {
    let bin = env!("CARGO_BIN_EXE_ccgrowth");
    let d = tempfile::tempdir().unwrap();
    let cfg = d.path().join("ak.cfg");
    std::fs::write(&cfg, "model.kind = ak\ngrid.kmax = 20\ngrid.nodes = 801\ngrid.tau = 0.02\nverify.seed = 42\n").unwrap();
    let files = ["value.csv", "convergence.csv", "properties.csv", "viscosity.csv", "dpp.csv", "truncation.csv"];
    let mut outputs = Vec::new();
    for run in ["a", "b"] {
        let out = d.path().join(run);
        for sub in ["solve", "verify"] {
            let st = Command::new(bin).args([sub, "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
            assert_eq!(st.status.code(), Some(0));
        }
        outputs.push(files.map(|f| std::fs::read(out.join(f)).unwrap()));
    }
    let same = files.iter().enumerate().filter(|(i, _)| outputs[0][*i] == outputs[1][*i]).count();
    let pass = same == files.len();
    line(8, pass, format!("{same}/{} CSV files byte-identical across two solve + verify runs", files.len()));
    pass
}

#[test]
fn acceptance() {
    let (c1, ak_sol) = criterion_1();
    let ccc_sol = solve(&ccc(), 801, 0.01, 1e-10);
    let results = [
        c1,
        criterion_2(&ak_sol, &ccc_sol),
        criterion_3(&ak_sol, &ccc_sol),
        criterion_4(&ak_sol, &ccc_sol),
        criterion_5(),
        criterion_6(),
        criterion_7(&ak_sol),
        criterion_8(),
    ];
    let failed: Vec<usize> = (0..8).filter(|&i| !results[i]).map(|i| i + 1).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
