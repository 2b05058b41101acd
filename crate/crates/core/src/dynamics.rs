//! Controlled capital dynamics `k̇ = F(k) − c` with piecewise-constant
//! consumption, and the admissibility constraint `k ≥ 0`.

use crate::model::ModelSpec;
use thiserror::Error;

pub const TOL_STATE: f64 = 1e-9;
const ZERO_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DynamicsError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("invalid control path: {0}")]
    Control(String),
    #[error("state blew up at t = {t}")]
    BlowUp { t: f64 },
    #[error("control is not admissible: k({time}) = {state}")]
    Inadmissible { time: f64, state: f64 },
}

/// Piecewise-constant consumption: `values[i]` on `[breaks[i], breaks[i+1])`
/// and `tail` from the last breakpoint on.
#[derive(Clone, Debug, PartialEq)]
pub struct ControlPath {
    breaks: Vec<f64>,
    values: Vec<f64>,
    tail: f64,
}

impl ControlPath {
    pub fn new(breaks: Vec<f64>, values: Vec<f64>, tail: f64) -> Result<Self, DynamicsError> {
        if breaks.first() != Some(&0.0) {
            return Err(DynamicsError::Control("first breakpoint must be 0".into()));
        }
        if values.len() + 1 != breaks.len() {
            return Err(DynamicsError::Control(format!(
                "{} breakpoints need {} segment values, got {}",
                breaks.len(),
                breaks.len() - 1,
                values.len()
            )));
        }
        if breaks.windows(2).any(|w| !(w[1] > w[0])) || breaks.iter().any(|b| !b.is_finite()) {
            return Err(DynamicsError::Control("breakpoints must be finite and strictly increasing".into()));
        }
        if values.iter().chain(std::iter::once(&tail)).any(|v| !(v.is_finite() && *v >= 0.0)) {
            return Err(DynamicsError::Control("consumption values must be finite and nonnegative".into()));
        }
        Ok(ControlPath { breaks, values, tail })
    }

    pub fn constant(c: f64) -> Result<Self, DynamicsError> {
        ControlPath::new(vec![0.0], Vec::new(), c)
    }

    /// Builds a path from `(duration, value)` pieces followed by `tail`.
    pub fn from_pieces(pieces: &[(f64, f64)], tail: f64) -> Result<Self, DynamicsError> {
        let mut breaks = vec![0.0];
        let mut values = Vec::with_capacity(pieces.len());
        let mut t = 0.0;
        for &(d, v) in pieces {
            t += d;
            breaks.push(t);
            values.push(v);
        }
        ControlPath::new(breaks, values, tail)
    }

    pub fn breaks(&self) -> &[f64] {
        &self.breaks
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// Last breakpoint `t_n`; the path is constant afterwards.
    pub fn last_break(&self) -> f64 {
        *self.breaks.last().unwrap()
    }

    pub fn value_at(&self, t: f64) -> f64 {
        if t >= self.last_break() {
            return self.tail;
        }
        let i = self.breaks.partition_point(|&b| b <= t);
        self.values[i.saturating_sub(1)]
    }

    /// `(start, end, value)` triples; the last one ends at `+∞`.
    pub fn segments(&self) -> impl Iterator<Item = (f64, f64, f64)> + '_ {
        let n = self.values.len();
        (0..=n).map(move |i| {
            if i < n {
                (self.breaks[i], self.breaks[i + 1], self.values[i])
            } else {
                (self.breaks[n], f64::INFINITY, self.tail)
            }
        })
    }

    /// `∫₀ᵗ c`.
    pub fn integral(&self, t: f64) -> f64 {
        self.segments()
            .take_while(|s| s.0 < t)
            .map(|(a, b, v)| v * (b.min(t) - a))
            .sum()
    }

    /// Supremum of the path over `[0, t]`.
    pub fn sup_on(&self, t: f64) -> f64 {
        self.segments().take_while(|s| s.0 < t || s.0 == 0.0).map(|s| s.2).fold(0.0, f64::max)
    }

    /// `c(· + τ)`.
    pub fn translate(&self, tau: f64) -> Result<Self, DynamicsError> {
        if !(tau >= 0.0) {
            return Err(DynamicsError::Domain(format!("translation must be nonnegative, got {tau}")));
        }
        if tau == 0.0 {
            return Ok(self.clone());
        }
        let mut breaks = vec![0.0];
        let mut values = Vec::new();
        for (_, b, v) in self.segments() {
            if b <= tau {
                continue;
            }
            if b.is_infinite() {
                break;
            }
            values.push(v);
            breaks.push(b - tau);
        }
        ControlPath::new(breaks, values, self.tail)
    }

    /// Pointwise map over segment values, keeping breakpoints.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Result<Self, DynamicsError> {
        ControlPath::new(self.breaks.clone(), self.values.iter().map(|&v| f(v)).collect(), f(self.tail))
    }

    /// Same path with extra breakpoints inserted (values unchanged).
    pub fn refine(&self, marks: &[f64]) -> Self {
        let mut breaks = self.breaks.clone();
        breaks.extend(marks.iter().copied().filter(|&m| m > 0.0 && m.is_finite()));
        breaks.sort_by(|a, b| a.partial_cmp(b).unwrap());
        breaks.dedup();
        let values = breaks[..breaks.len() - 1].iter().map(|&t| self.value_at(t)).collect();
        ControlPath {
            breaks,
            values,
            tail: self.tail,
        }
    }
}

/// Free-function form of [`ControlPath::translate`].
pub fn translate_control(c: &ControlPath, tau: f64) -> Result<ControlPath, DynamicsError> {
    c.translate(tau)
}

#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<f64>,
    pub controls: Vec<f64>,
    pub min_state: f64,
    pub exit_time: Option<f64>,
}

impl Trajectory {
    pub fn final_state(&self) -> f64 {
        *self.states.last().unwrap()
    }

    /// State at a sample time that was requested as a mark.
    pub fn state_at_sample(&self, t: f64) -> Option<f64> {
        let i = self.times.partition_point(|&s| s < t);
        (i < self.times.len() && (self.times[i] - t).abs() <= 1e-12 * t.max(1.0)).then(|| self.states[i])
    }

    /// CSV with header `t,k`, or `t,k,c` when `with_controls` is set.
    pub fn to_csv(&self, with_controls: bool) -> String {
        use crate::output::fmt_num;
        let mut s = String::from(if with_controls { "t,k,c\n" } else { "t,k\n" });
        for i in 0..self.times.len() {
            s.push_str(&fmt_num(self.times[i]));
            s.push(',');
            s.push_str(&fmt_num(self.states[i]));
            if with_controls {
                s.push(',');
                s.push_str(&fmt_num(self.controls[i]));
            }
            s.push('\n');
        }
        s
    }
}

/// Maximum RK4 step `min(0.01, 0.1/M̄)`.
pub fn max_step(model: &ModelSpec) -> f64 {
    0.01f64.min(0.1 / model.m_bar())
}

fn rk4(model: &ModelSpec, k: f64, c: f64, h: f64) -> f64 {
    let f = |x: f64| model.f(x) - c;
    let k1 = f(k);
    let k2 = f(k + 0.5 * h * k1);
    let k3 = f(k + 0.5 * h * k2);
    let k4 = f(k + h * k3);
    k + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
}

/// Integrates the state equation on `[0, horizon]`.
///
/// RK4 restarts at every control breakpoint and at every time in `marks`, so
/// the trajectory is sampled exactly there.
pub fn integrate_state_marked(
    model: &ModelSpec,
    k0: f64,
    c: &ControlPath,
    horizon: f64,
    marks: &[f64],
) -> Result<Trajectory, DynamicsError> {
    if !(k0 >= 0.0 && k0.is_finite()) {
        return Err(DynamicsError::Domain(format!("initial capital must be nonnegative, got {k0}")));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(DynamicsError::Domain(format!("horizon must be positive, got {horizon}")));
    }
    let h_max = max_step(model);
    let mut cuts: Vec<f64> = c
        .breaks()
        .iter()
        .chain(marks.iter())
        .copied()
        .filter(|&t| t > 0.0 && t < horizon)
        .collect();
    cuts.push(horizon);
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();

    let mut times = vec![0.0];
    let mut states = vec![k0];
    let mut controls = vec![c.value_at(0.0)];
    let mut exit_time = None;
    let mut t0 = 0.0;
    let mut k = k0;
    for &t1 in &cuts {
        let cv = c.value_at(t0);
        let len = t1 - t0;
        let steps = (len / h_max).ceil().max(1.0) as usize;
        let h = len / steps as f64;
        for j in 0..steps {
            let ta = t0 + j as f64 * h;
            let tb = if j + 1 == steps { t1 } else { t0 + (j + 1) as f64 * h };
            let next = rk4(model, k, cv, tb - ta);
            if !next.is_finite() {
                return Err(DynamicsError::BlowUp { t: tb });
            }
            if exit_time.is_none() && k >= 0.0 && next < 0.0 {
                let (s, ks) = locate_zero(model, k, cv, tb - ta);
                if s > 0.0 && s < tb - ta {
                    times.push(ta + s);
                    states.push(ks);
                    controls.push(cv);
                }
                exit_time = Some(ta + s);
            }
            k = next;
            times.push(tb);
            states.push(k);
            controls.push(c.value_at(tb));
        }
        t0 = t1;
    }
    let min_state = states.iter().copied().fold(f64::INFINITY, f64::min);
    Ok(Trajectory {
        times,
        states,
        controls,
        min_state,
        exit_time,
    })
}

fn locate_zero(model: &ModelSpec, k: f64, c: f64, h: f64) -> (f64, f64) {
    let (mut lo, mut hi) = (0.0, h);
    let mut best = (h, rk4(model, k, c, h));
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        let km = rk4(model, k, c, mid);
        best = (mid, km);
        if km.abs() <= ZERO_TOL || mid == lo || mid == hi {
            break;
        }
        if km >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    best
}

pub fn integrate_state(model: &ModelSpec, k0: f64, c: &ControlPath, horizon: f64) -> Result<Trajectory, DynamicsError> {
    integrate_state_marked(model, k0, c, horizon, &[])
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdmissibilityReport {
    pub admissible: bool,
    /// First sampled `(t, k(t))` with `k < −tol_state`.
    pub violation: Option<(f64, f64)>,
}

impl AdmissibilityReport {
    fn from_trajectory(tr: &Trajectory) -> Self {
        let violation = tr
            .states
            .iter()
            .position(|&k| k < -TOL_STATE)
            .map(|i| (tr.times[i], tr.states[i]));
        AdmissibilityReport {
            admissible: violation.is_none(),
            violation,
        }
    }
}

/// Admissibility on `[0, horizon]`.
pub fn is_admissible(
    model: &ModelSpec,
    k0: f64,
    c: &ControlPath,
    horizon: f64,
) -> Result<AdmissibilityReport, DynamicsError> {
    // ControlPath already rejects negative values
    let tr = integrate_state(model, k0, c, horizon)?;
    Ok(AdmissibilityReport::from_trajectory(&tr))
}

/// Admissibility on `[0, ∞)`: integrate to the last breakpoint, after which
/// the tail rate `c̄` keeps `k ≥ 0` forever iff `c̄ ≤ F(k(t_n))`.
pub fn admissible_forever(model: &ModelSpec, k0: f64, c: &ControlPath) -> Result<AdmissibilityReport, DynamicsError> {
    let tn = c.last_break();
    if tn == 0.0 {
        return Ok(constant_verdict(model, k0, c.tail()));
    }
    let tr = integrate_state(model, k0, c, tn)?;
    let mut rep = AdmissibilityReport::from_trajectory(&tr);
    if rep.admissible {
        let kn = tr.final_state().max(0.0);
        if c.tail() > model.f(kn) + TOL_STATE * model.m_bar() {
            rep = AdmissibilityReport {
                admissible: false,
                violation: Some((f64::INFINITY, kn)),
            };
        }
    }
    Ok(rep)
}

fn constant_verdict(model: &ModelSpec, k0: f64, c: f64) -> AdmissibilityReport {
    let admissible = c <= model.f(k0);
    AdmissibilityReport {
        admissible,
        violation: (!admissible).then_some((f64::INFINITY, k0)),
    }
}

/// Constant controls admissible at `k0`: the interval `[0, F(k0)]`.
pub fn constant_control_interval(model: &ModelSpec, k0: f64) -> (f64, f64) {
    (0.0, model.f(k0))
}
