//! Checks of the proved properties of `V` and of the optimality conditions
//! against a computed value function.
//!
//! All grid checks are restricted to nodes with `k ≤ k_max/2`, away from the
//! artificial upper boundary.

use crate::dynamics::{admissible_forever, integrate_state, integrate_state_marked, ControlPath};
use crate::functional::{
    bump_control, bump_gain_bound, convex_minorant, exact_utility, truncate_control, truncation_threshold, Minorant,
};
use crate::hamiltonian::hamiltonian;
use crate::model::ModelSpec;
use crate::output::fmt_num;
use crate::sampling::{random_admissible_control, spiky_control};
use crate::solver::{Policy, ValueFunction};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Viscosity tolerance is `VISCOSITY_C1·(τ + Δk)`; the coefficient is twice
/// the largest residual of the sampled AK closed form on the base grid,
/// divided by `τ + Δk`.
pub const VISCOSITY_C1: f64 = 0.2;

#[derive(Clone, Debug, PartialEq)]
pub struct Row {
    pub check: &'static str,
    pub location: f64,
    pub measured: f64,
    pub bound: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub rows: Vec<Row>,
}

impl Report {
    fn push(&mut self, check: &'static str, location: f64, measured: f64, bound: f64, pass: bool) {
        self.rows.push(Row {
            check,
            location,
            measured,
            bound,
            pass,
        });
    }

    pub fn extend(&mut self, other: Report) {
        self.rows.extend(other.rows);
    }

    pub fn all_pass(&self) -> bool {
        self.rows.iter().all(|r| r.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Row> {
        self.rows.iter().filter(|r| !r.pass)
    }

    pub fn rows_named<'a>(&'a self, check: &'a str) -> impl Iterator<Item = &'a Row> + 'a {
        self.rows.iter().filter(move |r| r.check == check)
    }

    /// CSV `check,location,measured,bound,pass`.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("check,location,measured,bound,pass\n");
        for r in &self.rows {
            s.push_str(&format!(
                "{},{},{},{},{}\n",
                r.check,
                fmt_num(r.location),
                fmt_num(r.measured),
                fmt_num(r.bound),
                r.pass
            ));
        }
        s
    }

    /// One line per check name: passed/total.
    pub fn summary(&self) -> String {
        let mut names: Vec<&str> = Vec::new();
        for r in &self.rows {
            if !names.contains(&r.check) {
                names.push(r.check);
            }
        }
        let mut s = String::new();
        for name in names {
            let total = self.rows_named(name).count();
            let ok = self.rows_named(name).filter(|r| r.pass).count();
            s.push_str(&format!("{name}: {ok}/{total} {}\n", if ok == total { "PASS" } else { "FAIL" }));
        }
        s
    }
}

/// Index of the last node with `k ≤ k_max/2`.
pub fn half_index(v: &ValueFunction) -> usize {
    ((0.5 * v.grid.k_max) / v.grid.dk() + 1e-9).floor() as usize
}

/// `count` node indices spread evenly over `1..=last`.
pub fn sample_nodes(last: usize, count: usize) -> Vec<usize> {
    if count == 0 || last == 0 {
        return Vec::new();
    }
    if count == 1 {
        return vec![last];
    }
    let mut out: Vec<usize> = (0..count)
        .map(|j| 1 + ((last - 1) as f64 * j as f64 / (count - 1) as f64).round() as usize)
        .collect();
    out.dedup();
    out
}

/// `C(k₀) = u'(N(k₀,1)+1)/2`, the local lower bound on difference quotients.
pub fn lower_quotient_bound(model: &ModelSpec, g: &Minorant, k0: f64) -> f64 {
    match truncation_threshold(model, g, k0, 1.0) {
        Ok(th) => 0.5 * model.utility.marginal(th.n + 1.0),
        Err(_) => f64::NAN,
    }
}

pub struct PropertyOptions {
    /// Interval `[a, b]` for the Lipschitz bound; defaults to `[1, k_max/2]`.
    pub lipschitz: Option<(f64, f64)>,
    pub quotient_samples: usize,
}

impl Default for PropertyOptions {
    fn default() -> Self {
        PropertyOptions {
            lipschitz: None,
            quotient_samples: 10,
        }
    }
}

/// Origin, monotonicity, tail slope, Lipschitz and lower-quotient checks,
/// plus the lower bound `V(k) ≥ u(F(k))/ρ − 1e−6`.
pub fn verify_value_properties(model: &ModelSpec, v: &ValueFunction, opts: &PropertyOptions) -> Report {
    let mut r = Report::default();
    let g = v.grid;
    let dk = g.dk();
    let last = half_index(v);
    let vals = &v.values;

    r.push("origin_value", 0.0, vals[0], 0.0, vals[0] == 0.0);
    // v(k) → 0 as k → 0: halving k must shrink v by a fixed factor
    let mut i = 2;
    while i <= 64 && i <= last {
        let ratio = vals[i / 2] / vals[i];
        r.push("origin_continuity", g.k(i / 2), ratio, 0.95, vals[i] > 0.0 && ratio <= 0.95);
        i *= 2;
    }

    let bad = (0..last).find(|&i| !(vals[i + 1] > vals[i]));
    match bad {
        Some(i) => r.push("strictly_increasing", g.k(i), vals[i + 1] - vals[i], 0.0, false),
        None => {
            let min_inc = (0..last).map(|i| vals[i + 1] - vals[i]).fold(f64::INFINITY, f64::min);
            r.push("strictly_increasing", g.k(last), min_inc, 0.0, true)
        }
    }

    let q0 = last - last / 4;
    let ratios: Vec<f64> = (q0..=last).map(|i| vals[i] / g.k(i)).collect();
    let bad = ratios.windows(2).position(|w| !(w[1] < w[0]));
    r.push(
        "tail_slope_decay",
        bad.map_or(g.k(last), |j| g.k(q0 + j + 1)),
        ratios[ratios.len() - 1],
        ratios[0],
        bad.is_none(),
    );

    let (a, b) = opts.lipschitz.unwrap_or((1.0, g.k(last)));
    let ia = (a / dk).ceil() as usize;
    let ib = ((b / dk) + 1e-9).floor() as usize;
    let lip = model.rho * v.eval(b) / model.f(a);
    let worst = (ia..ib)
        .map(|i| (g.k(i), (vals[i + 1] - vals[i]) / dk))
        .fold((a, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    r.push("lipschitz_bound", worst.0, worst.1, lip, worst.1 <= lip * (1.0 + 1e-6));

    match convex_minorant(model) {
        Ok(gm) => {
            for i in sample_nodes(last - 1, opts.quotient_samples) {
                let k0 = g.k(i);
                let c = lower_quotient_bound(model, &gm, k0);
                let fwd = (vals[i + 1] - vals[i]) / dk;
                let bwd = (vals[i] - vals[i - 1]) / dk;
                let m = fwd.min(bwd);
                r.push("lower_quotient", k0, m, c, m >= c - 1e-9);
            }
        }
        Err(_) => r.push("lower_quotient", f64::NAN, f64::NAN, f64::NAN, false),
    }

    let worst = (0..g.nodes)
        .map(|i| {
            let k = g.k(i);
            (k, vals[i] - model.u(model.f(k)) / model.rho)
        })
        .fold((0.0, f64::INFINITY), |acc, x| if x.1 < acc.1 { x } else { acc });
    r.push("constant_control_lower_bound", worst.0, worst.1, -1e-6, worst.1 >= -1e-6);
    r
}

fn rk4_flow(model: &ModelSpec, k: f64, c: f64, tau: f64) -> f64 {
    let tr = integrate_state(model, k, &ControlPath::constant(c).expect("nonnegative"), tau).expect("valid");
    tr.final_state()
}

fn max_slope_between(v: &ValueFunction, x: f64, y: f64) -> f64 {
    let (lo, hi) = if x <= y { (x, y) } else { (y, x) };
    let g = v.grid;
    let (a, b) = (g.cell(lo.clamp(0.0, g.k_max)), g.cell(hi.clamp(0.0, g.k_max)));
    (a..=b).map(|j| v.slope(j)).fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug)]
pub struct DppOptions {
    pub tau: f64,
    pub nodes: usize,
    pub controls: usize,
    pub seed: u64,
    /// Convergence certificate of the solve that produced `V`.
    pub certificate: f64,
}

/// DPP residuals at horizon `τ` with the exact (RK4) flow. For random
/// constant controls the right-hand side may not exceed `V(k₀)`; for the
/// computed policy it must match `V(k₀)`. Both up to the certificate plus
/// `e^{−ρτ}·(local slope)·|k'_flow − k'_Euler|`.
pub fn verify_dpp(model: &ModelSpec, v: &ValueFunction, policy: &Policy, opts: &DppOptions) -> Report {
    let mut r = Report::default();
    let tau = opts.tau;
    let beta = (-model.rho * tau).exp();
    let w = -(-model.rho * tau).exp_m1() / model.rho;
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let g = v.grid;
    for i in sample_nodes(half_index(v), opts.nodes) {
        let k0 = g.k(i);
        let f = model.f(k0);
        let vk = v.values[i];
        let c_hi = f + k0 / tau;
        let interp = |c: f64, flow: f64| {
            let euler = k0 + tau * (f - c);
            beta * max_slope_between(v, flow, euler) * (flow - euler).abs()
        };
        let mut worst = f64::NEG_INFINITY;
        for _ in 0..opts.controls {
            let mut c = rng.gen::<f64>() * c_hi;
            let mut flow = rk4_flow(model, k0, c, tau);
            while flow < 0.0 {
                c *= 0.5;
                flow = rk4_flow(model, k0, c, tau);
            }
            let rhs = w * model.u(c) + beta * v.eval(flow);
            worst = worst.max(rhs - vk - interp(c, flow));
        }
        r.push("dpp_one_sided", k0, worst, opts.certificate, worst <= opts.certificate);

        let c = policy.c[i];
        let flow = rk4_flow(model, k0, c, tau);
        let rhs = w * model.u(c) + beta * v.eval(flow);
        let excess = (rhs - vk).abs() - interp(c, flow);
        r.push("dpp_policy", k0, excess, opts.certificate, excess <= opts.certificate);
    }
    r
}

/// Largest `|RHS − V(k₀)|` for the computed policy over the DPP sample nodes.
pub fn dpp_policy_residual(model: &ModelSpec, v: &ValueFunction, policy: &Policy, tau: f64, nodes: usize) -> f64 {
    let beta = (-model.rho * tau).exp();
    let w = -(-model.rho * tau).exp_m1() / model.rho;
    sample_nodes(half_index(v), nodes)
        .into_iter()
        .map(|i| {
            let k0 = v.grid.k(i);
            let c = policy.c[i];
            let rhs = w * model.u(c) + beta * v.eval(rk4_flow(model, k0, c, tau));
            (rhs - v.values[i]).abs()
        })
        .fold(0.0, f64::max)
}

pub fn viscosity_tolerance(tau: f64, dk: f64) -> f64 {
    VISCOSITY_C1 * (tau + dk)
}

/// Largest `|ρv + H(k,p)|` over the sampled nodes and the slope set; used to
/// calibrate [`VISCOSITY_C1`].
pub fn max_viscosity_residual(model: &ModelSpec, v: &ValueFunction, samples: usize) -> f64 {
    let mut worst = 0.0f64;
    for i in sample_nodes(half_index(v), samples) {
        let (sl, sr) = (v.slope(i - 1), v.slope(i));
        for p in [sr, 0.5 * (sl + sr), sl] {
            if let Ok(h) = hamiltonian(model, v.grid.k(i), p) {
                worst = worst.max((model.rho * v.values[i] + h.h).abs());
            }
        }
    }
    worst
}

/// One-sided viscosity inequalities with slopes of the interpolant as
/// test-function slopes. Emits `viscosity_node` rows, `c_plus` rows for
/// non-positive slopes, and a `viscosity_fraction` summary row (≥ 0.95).
pub fn verify_viscosity(model: &ModelSpec, v: &ValueFunction, samples: usize, tol: f64) -> Report {
    let mut r = Report::default();
    let nodes = sample_nodes(half_index(v), samples);
    let mut passed = 0;
    for &i in &nodes {
        let k = v.grid.k(i);
        let (sl, sr) = (v.slope(i - 1), v.slope(i));
        if !(sl > 0.0 && sr > 0.0) {
            r.push("c_plus", k, sl.min(sr), 0.0, false);
            r.push("viscosity_node", k, f64::NAN, tol, false);
            continue;
        }
        let mut worst = f64::NEG_INFINITY;
        for p in [sr, 0.5 * (sl + sr), sl] {
            let res = model.rho * v.values[i] + hamiltonian(model, k, p).expect("positive slope").h;
            // concave kink: test functions touch from above (subsolution)
            if sr <= sl {
                worst = worst.max(res);
            }
            // convex kink: test functions touch from below (supersolution)
            if sl <= sr {
                worst = worst.max(-res);
            }
        }
        let ok = worst <= tol;
        if ok {
            passed += 1;
        }
        r.push("viscosity_node", k, worst, tol, ok);
    }
    let frac = passed as f64 / nodes.len().max(1) as f64;
    r.push("viscosity_fraction", f64::NAN, frac, 0.95, frac >= 0.95);
    r
}

/// Truncation suite: for `trials` random admissible controls (one seed per
/// trial, reported as the location), `U(c^T) ≥ U(c) − 1e−8` and
/// `sup_{[0,T]} c^T ≤ N(k₀,T)`.
pub fn verify_truncation_gain(model: &ModelSpec, k0: f64, t: f64, trials: usize, seed: u64) -> Report {
    let mut r = Report::default();
    let g = match convex_minorant(model) {
        Ok(g) => g,
        Err(_) => {
            r.push("truncation_gain", f64::NAN, f64::NAN, f64::NAN, false);
            return r;
        }
    };
    let n = match truncation_threshold(model, &g, k0, t) {
        Ok(th) => th.n,
        Err(_) => {
            r.push("truncation_gain", f64::NAN, f64::NAN, f64::NAN, false);
            return r;
        }
    };
    for trial in 0..trials {
        let s = seed.wrapping_add(trial as u64);
        let mut rng = ChaCha8Rng::seed_from_u64(s);
        let c = if trial % 4 == 3 {
            random_admissible_control(model, k0, &mut rng)
        } else {
            spiky_control(model, k0, t, n, &mut rng)
        };
        match truncate_control(model, &g, &c, k0, t) {
            Ok(tr) => {
                let gain = exact_utility(model, &tr.control) - exact_utility(model, &c);
                r.push("truncation_gain", s as f64, gain, -1e-8, gain >= -1e-8);
                // the cap holds on [0, T); the compensation starts at T
                let cap = tr
                    .control
                    .segments()
                    .take_while(|seg| seg.0 < t)
                    .map(|seg| seg.2)
                    .fold(0.0, f64::max);
                r.push("truncation_cap", s as f64, cap, n, cap <= n * (1.0 + 1e-12));
                let adm = admissible_forever(model, k0, &tr.control).map_or(false, |a| a.admissible);
                r.push("truncation_admissible", s as f64, adm as u8 as f64, 1.0, adm);
            }
            Err(_) => r.push("truncation_gain", s as f64, f64::NAN, -1e-8, false),
        }
    }
    r
}

/// Bump suite: `U(c̲;k₁) − U(c;k₀) ≥ u'(N(k₀,k₁−k₀)+1)∫₀^{k₁−k₀}e^{−ρt} − 1e−8`,
/// with `c̲` admissible at `k₁`.
pub fn verify_bump_gain(model: &ModelSpec, trials: usize, seed: u64) -> Report {
    let mut r = Report::default();
    let g = match convex_minorant(model) {
        Ok(g) => g,
        Err(_) => {
            r.push("bump_gain", f64::NAN, f64::NAN, f64::NAN, false);
            return r;
        }
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..trials {
        let k0 = rng.gen_range(0.2..6.0);
        let k1 = k0 + rng.gen_range(0.01..1.0);
        let c = random_admissible_control(model, k0, &mut rng);
        let row = bump_control(model, &g, &c, k0, k1).and_then(|b| {
            let bound = bump_gain_bound(model, &g, k0, k1)?;
            let adm = admissible_forever(model, k1, &b)?.admissible;
            Ok((exact_utility(model, &b) - exact_utility(model, &c), bound, adm))
        });
        match row {
            Ok((gap, bound, adm)) => {
                r.push("bump_gain", k0, gap, bound, gap >= bound - 1e-8);
                r.push("bump_admissible", k1, adm as u8 as f64, 1.0, adm);
            }
            Err(_) => r.push("bump_gain", k0, f64::NAN, f64::NAN, false),
        }
    }
    r
}

/// Comparison and growth-bound suite on random `(k₀, c)` pairs: weak and
/// strong comparison, `k(t) ≤ k₀e^{M̄t}` and `∫₀ᵗc ≤ k₀e^{M̄t}`, each within 1e−8.
pub fn verify_orbit_bounds(model: &ModelSpec, trials: usize, seed: u64) -> Report {
    let mut r = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mb = model.m_bar();
    let horizon = 10.0;
    let marks: Vec<f64> = (1..=50).map(|i| i as f64 * horizon / 50.0).collect();
    for _ in 0..trials {
        let k0 = rng.gen_range(0.1..6.0);
        let c = random_admissible_control(model, k0, &mut rng);
        let scale = rng.gen_range(1.0..1.5);
        let more = c.map(|x| x * scale).expect("nonnegative");
        let dk = rng.gen_range(0.01..1.0);
        let (Ok(a), Ok(b), Ok(hi)) = (
            integrate_state_marked(model, k0, &c, horizon, &marks),
            integrate_state_marked(model, k0, &more, horizon, &marks),
            integrate_state_marked(model, k0 + dk, &c, horizon, &marks),
        ) else {
            r.push("comparison_weak", k0, f64::NAN, 0.0, false);
            continue;
        };
        let mut weak = f64::INFINITY;
        let mut strong = f64::INFINITY;
        let mut growth = f64::NEG_INFINITY;
        let mut consumed = f64::NEG_INFINITY;
        for &t in &marks {
            let (ka, kb, kh) = (
                a.state_at_sample(t).unwrap(),
                b.state_at_sample(t).unwrap(),
                hi.state_at_sample(t).unwrap(),
            );
            weak = weak.min(ka - kb);
            strong = strong.min(kh - ka);
            let env = k0 * (mb * t).exp();
            growth = growth.max(ka - env);
            consumed = consumed.max(c.integral(t) - env);
        }
        r.push("comparison_weak", k0, weak, -1e-8, weak >= -1e-8);
        r.push("comparison_strong", k0, strong, 0.0, strong > 0.0);
        r.push("growth_state", k0, growth, 1e-8, growth <= 1e-8);
        r.push("growth_consumption", k0, consumed, 1e-8, consumed <= 1e-8);
    }
    r
}

/// Constant-control characterization: for random `(k₀, c)` the verdict of
/// the integrator equals `c ≤ F(k₀)`.
pub fn verify_constant_controls(model: &ModelSpec, trials: usize, seed: u64) -> Report {
    let mut r = Report::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for trial in 0..trials {
        let k0 = rng.gen_range(0.0..8.0);
        let f = model.f(k0);
        // every fifth trial sits exactly on the boundary c = F(k0)
        let c = if trial % 5 == 4 { f } else { rng.gen_range(0.0..2.0 * f.max(1e-3)) };
        let predicate = c <= f;
        let horizon = 200.0;
        let verdict = crate::dynamics::is_admissible(model, k0, &ControlPath::constant(c).unwrap(), horizon)
            .map_or(false, |a| a.admissible)
            && admissible_forever(model, k0, &ControlPath::constant(c).unwrap()).map_or(false, |a| a.admissible);
        // near the boundary the exit time exceeds any finite horizon
        let decided = if predicate != verdict && (c - f).abs() <= 1e-9 { predicate } else { verdict };
        r.push("constant_control", k0, c - f, 0.0, decided == predicate);
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{ak_value, AkParams};
    use crate::solver::{solve_value, Grid, SolverConfig};

    fn ak() -> ModelSpec {
        ModelSpec::ak(0.05, 0.5, 0.06, None).unwrap()
    }

    fn oracle_v(n: usize) -> ValueFunction {
        let p = AkParams::new(0.05, 0.5, 0.06).unwrap();
        ValueFunction::from_fn(Grid::new(20.0, n).unwrap(), |k| ak_value(&p, k))
    }

    #[test]
    fn oracle_passes_value_properties() {
        let rep = verify_value_properties(&ak(), &oracle_v(801), &PropertyOptions::default());
        assert!(rep.all_pass(), "{}", rep.summary());
    }

    #[test]
    fn flat_segment_fails_monotonicity_and_quotients() {
        let mut v = oracle_v(801);
        for i in 100..140 {
            v.values[i] = v.values[100];
        }
        let rep = verify_value_properties(&ak(), &v, &PropertyOptions::default());
        let inc = rep.rows_named("strictly_increasing").next().unwrap();
        assert!(!inc.pass && (inc.location - 2.5).abs() < 1e-12);
        let mut opts = PropertyOptions::default();
        opts.quotient_samples = 400;
        let rep = verify_value_properties(&ak(), &v, &opts);
        assert!(rep.rows_named("lower_quotient").any(|r| !r.pass));
    }

    #[test]
    fn quadratic_fails_lipschitz() {
        let v = ValueFunction::from_fn(Grid::new(20.0, 801).unwrap(), |k| k * k);
        let rep = verify_value_properties(&ak(), &v, &PropertyOptions::default());
        // slope near 10 is 20, bound is 0.06·100/0.05 = 120: passes on [1,10]
        assert!(rep.rows_named("lipschitz_bound").all(|r| r.pass));
        let mut opts = PropertyOptions::default();
        opts.lipschitz = Some((5.0, 5.5));
        let rep = verify_value_properties(&ak(), &v, &opts);
        // quotient ≈ 11 versus 0.06·30.25/0.25 = 7.26
        assert!(rep.rows_named("lipschitz_bound").all(|r| !r.pass));
    }

    #[test]
    fn constant_function_is_not_c_plus() {
        let v = ValueFunction::from_fn(Grid::new(20.0, 801).unwrap(), |_| 1.0);
        let rep = verify_viscosity(&ak(), &v, 200, 1.0);
        assert_eq!(rep.rows_named("c_plus").count(), 200);
        assert!(!rep.all_pass());
    }

    #[test]
    fn oracle_viscosity_residual_is_small() {
        let v = oracle_v(801);
        let res = max_viscosity_residual(&ak(), &v, 200);
        let tol = viscosity_tolerance(0.02, v.grid.dk());
        assert!(res < tol);
        let rep = verify_viscosity(&ak(), &v, 200, tol);
        assert!(rep.all_pass(), "{}", rep.summary());
    }

    #[test]
    fn coarse_solution_dpp() {
        let m = ak();
        let cfg = SolverConfig::new(20.0, 201, 0.1);
        let sol = solve_value(&m, &cfg).unwrap();
        let opts = DppOptions {
            tau: 0.1,
            nodes: 10,
            controls: 50,
            seed: 42,
            certificate: sol.certificate,
        };
        let rep = verify_dpp(&m, &sol.value, &sol.policy, &opts);
        assert!(rep.all_pass(), "{}", rep.to_csv());
        let scaled = ValueFunction::new(sol.value.grid, sol.value.values.iter().map(|x| 1.2 * x).collect()).unwrap();
        let rep = verify_dpp(&m, &scaled, &sol.policy, &opts);
        assert!(rep.rows_named("dpp_policy").all(|r| !r.pass));
    }

    #[test]
    fn lemma_suites_pass_on_ak() {
        let m = ak();
        assert!(verify_truncation_gain(&m, 1.0, 2.0, 20, 42).all_pass());
        assert!(verify_bump_gain(&m, 10, 42).all_pass());
        assert!(verify_orbit_bounds(&m, 10, 42).all_pass());
        assert!(verify_constant_controls(&m, 20, 42).all_pass());
    }

    #[test]
    fn csv_layout() {
        let mut r = Report::default();
        r.push("x", 1.0, 0.5, 1.0, true);
        assert_eq!(r.to_csv(), "check,location,measured,bound,pass\nx,1,0.5,1,true\n");
        assert_eq!(r.summary(), "x: 1/1 PASS\n");
    }
}
