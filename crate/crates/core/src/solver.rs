//! Semi-Lagrangian value iteration for
//! `v(k) = max_c { w·u(c) + e^{−ρτ} v(k + τ(F(k) − c)) }`, `w = (1 − e^{−ρτ})/ρ`,
//! on a uniform grid over `[0, k_max]` with piecewise-linear continuation.

use crate::dynamics::{max_step, Trajectory, TOL_STATE};
use crate::model::ModelSpec;
use crate::output::fmt_num;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("value iterate is not monotone: v[{node}] > v[{}]", node + 1)]
    State { node: usize },
    #[error("control search failed at node {node}")]
    Search { node: usize },
    #[error("closed-loop trajectory left the state space: k({t}) = {k}")]
    Trajectory { t: f64, k: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Grid {
    pub k_max: f64,
    pub nodes: usize,
}

impl Grid {
    pub fn new(k_max: f64, nodes: usize) -> Result<Self, SolverError> {
        if nodes < 64 {
            return Err(SolverError::Config(format!("grid needs at least 64 nodes, got {nodes}")));
        }
        if !(k_max > 0.0 && k_max.is_finite()) {
            return Err(SolverError::Config(format!("k_max must be positive, got {k_max}")));
        }
        Ok(Grid { k_max, nodes })
    }

    pub fn dk(&self) -> f64 {
        self.k_max / (self.nodes - 1) as f64
    }

    pub fn k(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.k_max
        } else {
            i as f64 * self.dk()
        }
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.nodes).map(|i| self.k(i)).collect()
    }

    /// Cell `j` with `k_j ≤ x ≤ k_{j+1}`, clamped to the grid.
    pub fn cell(&self, x: f64) -> usize {
        let j = (x / self.dk()).floor();
        if j <= 0.0 {
            0
        } else {
            (j as usize).min(self.nodes - 2)
        }
    }
}

/// Nodal values with piecewise-linear interpolation.
#[derive(Clone, Debug, PartialEq)]
pub struct ValueFunction {
    pub grid: Grid,
    pub values: Vec<f64>,
}

impl ValueFunction {
    pub fn new(grid: Grid, values: Vec<f64>) -> Result<Self, SolverError> {
        if values.len() != grid.nodes {
            return Err(SolverError::Config(format!("{} values for {} nodes", values.len(), grid.nodes)));
        }
        Ok(ValueFunction { grid, values })
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        ValueFunction {
            values: grid.points().into_iter().map(f).collect(),
            grid,
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.grid.k_max);
        let j = self.grid.cell(x);
        let t = (x - self.grid.k(j)) / self.grid.dk();
        self.values[j] + t * (self.values[j + 1] - self.values[j])
    }

    /// Slope on cell `j`.
    pub fn slope(&self, j: usize) -> f64 {
        (self.values[j + 1] - self.values[j]) / self.grid.dk()
    }

    /// First node where the values decrease, if any.
    pub fn first_decrease(&self) -> Option<usize> {
        let scale = self.values.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        self.values.windows(2).position(|w| w[1] < w[0] - 1e-12 * scale)
    }

    /// CSV `k,V,c_star`.
    pub fn to_csv(&self, policy: &Policy) -> String {
        let mut s = String::from("k,V,c_star\n");
        for i in 0..self.grid.nodes {
            s.push_str(&format!(
                "{},{},{}\n",
                fmt_num(self.grid.k(i)),
                fmt_num(self.values[i]),
                fmt_num(policy.c[i])
            ));
        }
        s
    }
}

/// Feedback consumption at the grid nodes.
#[derive(Clone, Debug, PartialEq)]
pub struct Policy {
    pub grid: Grid,
    pub c: Vec<f64>,
}

impl Policy {
    pub fn eval(&self, x: f64) -> f64 {
        let x = x.clamp(0.0, self.grid.k_max);
        let j = self.grid.cell(x);
        let t = (x - self.grid.k(j)) / self.grid.dk();
        self.c[j] + t * (self.c[j + 1] - self.c[j])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ControlSearch {
    /// Closed-form maximizer of the concave objective on each cell of the
    /// continuation, scanning cells downward from `c = c_min`.
    Foc,
    /// Best of `m` equally spaced next states.
    GridScan(usize),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SolverConfig {
    pub tau: f64,
    pub tol: f64,
    pub max_iters: usize,
    pub k_max: f64,
    pub nodes: usize,
    pub control_search: ControlSearch,
}

impl SolverConfig {
    pub fn new(k_max: f64, nodes: usize, tau: f64) -> Self {
        SolverConfig {
            tau,
            tol: 1e-9,
            max_iters: 200_000,
            k_max,
            nodes,
            control_search: ControlSearch::Foc,
        }
    }

    pub fn grid(&self) -> Result<Grid, SolverError> {
        Grid::new(self.k_max, self.nodes)
    }

    /// Checks `tol > 0`, the grid, and the monotonicity restriction
    /// `τ ≤ Δk / max_i F(k_i)`.
    pub fn validate(&self, model: &ModelSpec) -> Result<Grid, SolverError> {
        let grid = self.grid()?;
        if !(self.tol > 0.0) {
            return Err(SolverError::Config(format!("tol must be positive, got {}", self.tol)));
        }
        if !(self.tau > 0.0 && self.tau.is_finite()) {
            return Err(SolverError::Config(format!("tau must be positive, got {}", self.tau)));
        }
        if let ControlSearch::GridScan(m) = self.control_search {
            if m < 2 {
                return Err(SolverError::Config("grid scan needs at least 2 points".into()));
            }
        }
        let drift = grid.points().iter().map(|&k| model.f(k)).fold(0.0, f64::max);
        let limit = grid.dk() / drift;
        if self.tau > limit {
            return Err(SolverError::Config(format!(
                "tau = {} exceeds dk / max F = {limit}",
                self.tau
            )));
        }
        Ok(grid)
    }
}

struct Ctx<'a> {
    model: &'a ModelSpec,
    grid: Grid,
    tau: f64,
    w: f64,
    beta: f64,
    f: Vec<f64>,
    search: ControlSearch,
}

impl<'a> Ctx<'a> {
    fn new(model: &'a ModelSpec, cfg: &SolverConfig) -> Result<Self, SolverError> {
        let grid = cfg.validate(model)?;
        let beta = (-model.rho * cfg.tau).exp();
        Ok(Ctx {
            model,
            grid,
            tau: cfg.tau,
            w: -(-model.rho * cfg.tau).exp_m1() / model.rho,
            beta,
            f: grid.points().iter().map(|&k| model.f(k)).collect(),
            search: cfg.control_search,
        })
    }

    fn sweep(&self, v: &ValueFunction, out: &mut [f64], pol: &mut [f64]) -> Result<f64, SolverError> {
        if let Some(node) = v.first_decrease() {
            return Err(SolverError::State { node });
        }
        let n = self.grid.nodes;
        let slopes: Vec<f64> = (0..n - 1).map(|j| v.slope(j)).collect();
        let mut prefix_min = slopes.clone();
        for j in 1..n - 1 {
            prefix_min[j] = prefix_min[j].min(prefix_min[j - 1]);
        }
        out[0] = 0.0;
        pol[0] = 0.0;
        let mut delta = (v.values[0]).abs();
        for i in 1..n {
            let (c, val) = match self.search {
                ControlSearch::Foc => self.foc_search(i, v, &slopes, &prefix_min),
                ControlSearch::GridScan(m) => self.grid_scan(i, v, m),
            }
            .ok_or(SolverError::Search { node: i })?;
            out[i] = val;
            pol[i] = c;
            delta = delta.max((val - v.values[i]).abs());
        }
        Ok(delta)
    }

    /// `(c_min, c_max)` keeping the Euler next state in `[0, k_max]`.
    fn bounds(&self, i: usize) -> (f64, f64) {
        let k = self.grid.k(i);
        let f = self.f[i];
        let lo = (f - (self.grid.k_max - k) / self.tau).max(0.0);
        (lo, f + k / self.tau)
    }

    fn objective(&self, v: &ValueFunction, i: usize, c: f64) -> f64 {
        let next = self.grid.k(i) + self.tau * (self.f[i] - c);
        self.w * self.model.u(c) + self.beta * v.eval(next)
    }

    fn grid_scan(&self, i: usize, v: &ValueFunction, m: usize) -> Option<(f64, f64)> {
        let (c_lo, c_hi) = self.bounds(i);
        let mut best: Option<(f64, f64)> = None;
        for s in 0..m {
            let c = c_lo + (c_hi - c_lo) * s as f64 / (m - 1) as f64;
            let val = self.objective(v, i, c);
            if best.map_or(true, |b| val > b.1) {
                best = Some((c, val));
            }
        }
        best
    }

    fn foc_search(&self, i: usize, v: &ValueFunction, slopes: &[f64], prefix_min: &[f64]) -> Option<(f64, f64)> {
        let k = self.grid.k(i);
        let f = self.f[i];
        let tau = self.tau;
        let u = &self.model.utility;
        let (c_lo, c_hi) = self.bounds(i);
        let c_of = |x: f64| f + (k - x) / tau;
        let hi = k + tau * (f - c_lo);
        let u_max = self.w * u.value(c_hi);
        let mut best: Option<(f64, f64)> = None;
        let mut j = self.grid.cell(hi);
        loop {
            let kj = self.grid.k(j);
            let kt = self.grid.k(j + 1).min(hi);
            let c_t = if kt >= hi { c_lo } else { c_of(kt) };
            if let Some((_, bv)) = best {
                // upper bound over every next state ≤ kt, i.e. every c ≥ c_t
                let vt = v.eval(kt);
                let crude = u_max + self.beta * vt;
                let gain = self.w * u.marginal(c_t) / tau - self.beta * prefix_min[j];
                let base = self.w * u.value(c_t) + self.beta * vt;
                let lin = if gain <= 0.0 { base } else { base + kt * gain };
                if crude.min(lin) <= bv {
                    break;
                }
            }
            let c_b = c_of(kj).min(c_hi);
            let s = slopes[j];
            let c = if s > 0.0 {
                u.inverse_marginal(self.beta * tau * s / self.w)
            } else {
                f64::INFINITY
            };
            let c = c.clamp(c_t, c_b);
            let next = k + tau * (f - c);
            let val = self.w * u.value(c) + self.beta * (v.values[j] + s * (next - kj));
            if best.map_or(true, |b| val > b.1) {
                best = Some((c, val));
            }
            if j == 0 {
                break;
            }
            j -= 1;
        }
        best
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Sweep {
    pub value: ValueFunction,
    pub policy: Policy,
    pub delta: f64,
}

/// One application of the discrete Bellman operator.
pub fn bellman_sweep(model: &ModelSpec, v: &ValueFunction, cfg: &SolverConfig) -> Result<Sweep, SolverError> {
    let ctx = Ctx::new(model, cfg)?;
    if v.grid != ctx.grid {
        return Err(SolverError::Config("value function grid does not match the configuration".into()));
    }
    let mut out = vec![0.0; ctx.grid.nodes];
    let mut pol = vec![0.0; ctx.grid.nodes];
    let delta = ctx.sweep(v, &mut out, &mut pol)?;
    Ok(Sweep {
        value: ValueFunction::new(ctx.grid, out)?,
        policy: Policy { grid: ctx.grid, c: pol },
        delta,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Solution {
    pub value: ValueFunction,
    pub policy: Policy,
    pub iterations: usize,
    pub final_delta: f64,
    pub converged: bool,
    /// `δ·q/(1−q)` with `q = e^{−ρτ}`: bound on the distance to the discrete
    /// fixed point.
    pub certificate: f64,
    /// `(iteration, delta)` for every sweep.
    pub history: Vec<(usize, f64)>,
}

impl Solution {
    /// CSV `iter,delta`.
    pub fn convergence_csv(&self) -> String {
        let mut s = String::from("iter,delta\n");
        for &(i, d) in &self.history {
            s.push_str(&format!("{i},{}\n", fmt_num(d)));
        }
        s
    }
}

/// Iterates the Bellman operator from `v ≡ 0` until `delta < tol` or
/// `max_iters` sweeps.
pub fn solve_value(model: &ModelSpec, cfg: &SolverConfig) -> Result<Solution, SolverError> {
    let ctx = Ctx::new(model, cfg)?;
    let n = ctx.grid.nodes;
    let mut v = ValueFunction::new(ctx.grid, vec![0.0; n])?;
    let mut next = vec![0.0; n];
    let mut pol = vec![0.0; n];
    let mut history = Vec::new();
    let mut delta = f64::INFINITY;
    let mut iterations = 0;
    while iterations < cfg.max_iters {
        delta = ctx.sweep(&v, &mut next, &mut pol)?;
        iterations += 1;
        std::mem::swap(&mut v.values, &mut next);
        history.push((iterations, delta));
        if delta < cfg.tol {
            break;
        }
    }
    let q = ctx.beta;
    Ok(Solution {
        value: v,
        policy: Policy { grid: ctx.grid, c: pol },
        iterations,
        final_delta: delta,
        converged: delta < cfg.tol,
        certificate: delta * q / (1.0 - q),
        history,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct ClosedLoop {
    pub trajectory: Trajectory,
    /// Set when the state left `[0, k_max]` and the policy was evaluated at
    /// the clamped state.
    pub clamped: bool,
}

/// Integrates `k̇ = F(k) − c(k)` with `c` the interpolated policy (RK4).
pub fn synthesize_trajectory(
    model: &ModelSpec,
    policy: &Policy,
    k0: f64,
    horizon: f64,
) -> Result<ClosedLoop, SolverError> {
    synthesize_with(model, |k| policy.eval(k), policy.grid.k_max, k0, horizon)
}

/// Closed loop for an arbitrary feedback rule `c(k)`.
pub fn synthesize_with(
    model: &ModelSpec,
    rule: impl Fn(f64) -> f64,
    k_max: f64,
    k0: f64,
    horizon: f64,
) -> Result<ClosedLoop, SolverError> {
    if !(k0 >= 0.0) || !(horizon > 0.0) {
        return Err(SolverError::Config(format!("need k0 >= 0 and horizon > 0 (k0={k0}, horizon={horizon})")));
    }
    let mut clamped = false;
    let mut c_of = |k: f64| {
        if !(0.0..=k_max).contains(&k) {
            clamped = true;
        }
        rule(k.clamp(0.0, k_max))
    };
    let steps = (horizon / max_step(model)).ceil() as usize;
    let h = horizon / steps as f64;
    let mut times = Vec::with_capacity(steps + 1);
    let mut states = Vec::with_capacity(steps + 1);
    let mut controls = Vec::with_capacity(steps + 1);
    let mut k = k0;
    for s in 0..=steps {
        let t = if s == steps { horizon } else { s as f64 * h };
        times.push(t);
        states.push(k);
        controls.push(c_of(k));
        if s == steps {
            break;
        }
        let mut rhs = |x: f64| model.f(x) - c_of(x);
        let a = rhs(k);
        let b = rhs(k + 0.5 * h * a);
        let c = rhs(k + 0.5 * h * b);
        let d = rhs(k + h * c);
        k += h / 6.0 * (a + 2.0 * b + 2.0 * c + d);
        if !k.is_finite() || k < -TOL_STATE {
            return Err(SolverError::Trajectory { t: t + h, k });
        }
    }
    let min_state = states.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(ClosedLoop {
        trajectory: Trajectory {
            times,
            states,
            controls,
            min_state,
            exit_time: None,
        },
        clamped,
    })
}

/// Candidate thresholds on `k ≤ k_max/2`: midpoints of policy jumps larger
/// than five times the median jump, and midpoints of intervals where the
/// closed-loop drift `F(k) − c(k)` changes sign.
pub fn detect_threshold(model: &ModelSpec, policy: &Policy) -> Vec<f64> {
    let g = policy.grid;
    let last = g.cell(0.5 * g.k_max).max(2);
    let jumps: Vec<f64> = (1..last).map(|i| (policy.c[i + 1] - policy.c[i]).abs()).collect();
    let mut sorted = jumps.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = sorted[sorted.len() / 2];
    let mut out: Vec<f64> = Vec::new();
    for (idx, &jmp) in jumps.iter().enumerate() {
        let i = idx + 1;
        if jmp > 5.0 * median && jmp > 1e-12 {
            out.push(0.5 * (g.k(i) + g.k(i + 1)));
        }
    }
    let drift: Vec<f64> = (1..=last).map(|i| model.f(g.k(i)) - policy.c[i]).collect();
    for (idx, w) in drift.windows(2).enumerate() {
        if w[0] != 0.0 && w[1] != 0.0 && w[0].signum() != w[1].signum() {
            let i = idx + 1;
            out.push(0.5 * (g.k(i) + g.k(i + 1)));
        }
    }
    out.sort_by(|a, b| a.partial_cmp(b).unwrap());
    out.dedup();
    out
}
