//! The discounted utility functional and the control surgeries used in the
//! regularity arguments: the convex minorant `g` of `u'`, the consumption cap
//! `N(k₀,T)`, truncation `c ↦ c^T` and the bump control.

use crate::dynamics::{admissible_forever, is_admissible, ControlPath, DynamicsError};
use crate::model::{ModelSpec, UtilityFunction};
use crate::numeric::tanh_sinh;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionalError {
    #[error(transparent)]
    Dynamics(#[from] DynamicsError),
    #[error("growth condition violated: {0}")]
    Growth(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("model error: {0}")]
    Model(String),
    #[error("internal error: {0}")]
    Internal(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FunctionalValue {
    /// `∫₀^T e^{−ρt} u(c)`.
    pub value: f64,
    /// Upper bound on the remainder `∫_T^∞ e^{−ρt} u(c)`.
    pub tail_bound: f64,
}

pub fn default_t_quad(model: &ModelSpec) -> f64 {
    (10.0 / model.rho).max(50.0)
}

fn segment_discount(rho: f64, a: f64, b: f64) -> f64 {
    // (e^{−ρa} − e^{−ρb})/ρ without cancellation for short segments
    if b.is_infinite() {
        return (-rho * a).exp() / rho;
    }
    (-rho * a).exp() * -(-rho * (b - a)).exp_m1() / rho
}

/// `∫₀^T e^{−ρt} u(c(t)) dt`, exact per segment.
pub fn discounted_utility(model: &ModelSpec, c: &ControlPath, t: f64) -> f64 {
    c.segments()
        .take_while(|s| s.0 < t)
        .map(|(a, b, v)| model.u(v) * segment_discount(model.rho, a, b.min(t)))
        .sum()
}

/// `U(c)` over `[0, ∞)` in closed form; exact for piecewise-constant paths
/// because the path is constant after its last breakpoint.
pub fn exact_utility(model: &ModelSpec, c: &ControlPath) -> f64 {
    discounted_utility(model, c, f64::INFINITY)
}

/// Evaluates `U(c;k₀)` truncated at `t_quad`, with a certified bound on the
/// neglected remainder that depends only on `k₀` and the model.
pub fn utility_functional(
    model: &ModelSpec,
    c: &ControlPath,
    k0: f64,
    t_quad: f64,
) -> Result<FunctionalValue, FunctionalError> {
    if !(t_quad >= 10.0 / model.rho) {
        return Err(FunctionalError::Domain(format!(
            "quadrature horizon {t_quad} is shorter than 10/rho = {}",
            10.0 / model.rho
        )));
    }
    let rep = is_admissible(model, k0, c, t_quad)?;
    if let Some((time, state)) = rep.violation {
        return Err(DynamicsError::Inadmissible { time, state }.into());
    }
    let tail_bound = tail_bound(model, k0, t_quad)?;
    Ok(FunctionalValue {
        value: discounted_utility(model, c, t_quad),
        tail_bound,
    })
}

fn check_growth(model: &ModelSpec) -> Result<(), FunctionalError> {
    if model.growth_condition_holds() {
        Ok(())
    } else {
        Err(FunctionalError::Growth(format!(
            "(L+eps0)*gamma = {} is not below rho-eps0 = {}",
            (model.l() + model.eps0) * model.utility.tail_exponent(),
            model.rho - model.eps0
        )))
    }
}

/// `ρ ∫_T^∞ t e^{−ρt} {u(M) + M u(e^{at}) + u(M/(ta))} dt` with
/// `a = L+ε₀` and `M = M(k₀)`.
pub fn tail_bound(model: &ModelSpec, k0: f64, t: f64) -> Result<f64, FunctionalError> {
    check_growth(model)?;
    if !(t > 0.0) {
        return Err(FunctionalError::Domain(format!("tail start must be positive, got {t}")));
    }
    let m = model.envelope_m(k0);
    let a = model.l() + model.eps0;
    let rho = model.rho;
    let um = model.u(m);
    let u = &model.utility;
    let v = integrate_from(model, t, |s| {
        rho * s * ((-rho * s).exp() * (um + u.value(m / (s * a))) + m * (-rho * s + u.ln_value_exp(a * s)).exp())
    });
    finite_or_growth(v)
}

/// `∫_T^∞ h(t) dt` via `s = e^{−ε₀(t−T)}`. The growth condition makes the
/// transformed integrand vanish at `s = 0`.
fn integrate_from(model: &ModelSpec, t0: f64, h: impl Fn(f64) -> f64) -> f64 {
    let e = model.eps0;
    tanh_sinh(
        |s| {
            let t = t0 - s.ln() / e;
            let w = h(t) / (e * s);
            if w.is_finite() {
                w
            } else {
                // e^{ε₀(t−T)} overflowed against a vanishing h
                let ht = h(t);
                if ht == 0.0 {
                    0.0
                } else {
                    w
                }
            }
        },
        0.0,
        1.0,
        1e-12,
    )
}

fn finite_or_growth(v: f64) -> Result<f64, FunctionalError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(FunctionalError::Growth("tail quadrature diverged".into()))
    }
}

/// `γ(k₀) = u(M)/ρ + ρM∫₀^∞ t e^{−ρt} u(e^{at}) dt
///        + ρ u(M/a) {(1−e^{−ρ})/ρ + e^{−ρ}(1/ρ + 1/ρ²)}`.
pub fn gamma_bound(model: &ModelSpec, k0: f64) -> Result<f64, FunctionalError> {
    check_growth(model)?;
    let m = model.envelope_m(k0);
    let a = model.l() + model.eps0;
    let rho = model.rho;
    let u = &model.utility;
    let mid = integrate_from(model, 0.0, |t| t * (-rho * t + u.ln_value_exp(a * t)).exp());
    let head = (1.0 - (-rho).exp()) / rho + (-rho).exp() * (1.0 / rho + 1.0 / (rho * rho));
    finite_or_growth(model.u(m) / rho + rho * m * mid + rho * model.u(m / a) * head)
}

/// A convex, decreasing, positive minorant of `u'`.
#[derive(Clone, Debug, PartialEq)]
pub enum Minorant {
    /// `u'` itself (CRRA marginals are convex).
    Exact(UtilityFunction),
    /// Lower convex hull of samples, linear between vertices, defined on
    /// `[x_first, x_last]`.
    Hull { x: Vec<f64>, y: Vec<f64> },
}

impl Minorant {
    pub fn eval(&self, x: f64) -> Result<f64, FunctionalError> {
        match self {
            Minorant::Exact(u) => Ok(u.marginal(x)),
            Minorant::Hull { x: xs, y } => {
                let (lo, hi) = (xs[0], *xs.last().unwrap());
                if !(x >= lo && x <= hi) {
                    return Err(FunctionalError::Domain(format!("minorant evaluated at {x} outside [{lo}, {hi}]")));
                }
                let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
                let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                Ok(y[i - 1] + t * (y[i] - y[i - 1]))
            }
        }
    }
}

/// Lower convex hull of the sample graph `(x_i, y_i)`.
pub fn convex_hull_minorant(x: &[f64], y: &[f64]) -> Result<Minorant, FunctionalError> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(FunctionalError::Model("need at least two samples of equal length".into()));
    }
    if x.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(FunctionalError::Model("sample abscissae must increase".into()));
    }
    if y.iter().any(|v| !(v.is_finite() && *v > 0.0)) || y.windows(2).any(|w| w[1] > w[0]) {
        return Err(FunctionalError::Model("marginal utility samples must be positive and decreasing".into()));
    }
    // monotone chain, lower hull
    let mut hx: Vec<f64> = Vec::new();
    let mut hy: Vec<f64> = Vec::new();
    for (&px, &py) in x.iter().zip(y) {
        while hx.len() >= 2 {
            let n = hx.len();
            let cross = (hx[n - 1] - hx[n - 2]) * (py - hy[n - 2]) - (hy[n - 1] - hy[n - 2]) * (px - hx[n - 2]);
            if cross <= 0.0 {
                hx.pop();
                hy.pop();
            } else {
                break;
            }
        }
        hx.push(px);
        hy.push(py);
    }
    Ok(Minorant::Hull { x: hx, y: hy })
}

/// The minorant `g` for the model's utility. Tabulated utilities use the
/// hull of `(x_i, u'(x_{i+1}))` on a log grid over `[1e-9, 1e9]`; shifting
/// each sample to its right neighbour keeps the chords below the decreasing
/// `u'`.
pub fn convex_minorant(model: &ModelSpec) -> Result<Minorant, FunctionalError> {
    match &model.utility {
        u @ UtilityFunction::Crra { .. } => Ok(Minorant::Exact(u.clone())),
        u @ UtilityFunction::Tabulated(_) => {
            let n = 2000;
            let xs: Vec<f64> = (0..=n).map(|i| 1e-9 * 10f64.powf(18.0 * i as f64 / n as f64)).collect();
            let ys: Vec<f64> = xs.iter().map(|&x| u.marginal(x)).collect();
            let lowered: Vec<f64> = (0..n).map(|i| ys[i + 1]).collect();
            convex_hull_minorant(&xs[..n], &lowered)
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Threshold {
    pub beta: f64,
    pub alpha: f64,
    pub n: f64,
}

/// `β = ln(1+M̄)/M̄`, `α = β e^{−ρ(T+β)} g[k₀(e^{M̄(T+β)}/β + e^{M̄T})]` and
/// `N(k₀,T) = (u')⁻¹(α)`.
pub fn truncation_threshold(model: &ModelSpec, g: &Minorant, k0: f64, t: f64) -> Result<Threshold, FunctionalError> {
    if !(k0 > 0.0 && t > 0.0) {
        return Err(FunctionalError::Domain(format!("need k0 > 0 and T > 0, got k0={k0}, T={t}")));
    }
    let mb = model.m_bar();
    let beta = (1.0 + mb).ln() / mb;
    let arg = k0 * ((mb * (t + beta)).exp() / beta + (mb * t).exp());
    let alpha = beta * (-model.rho * (t + beta)).exp() * g.eval(arg)?;
    if !(alpha > 0.0) {
        return Err(FunctionalError::Internal(format!("alpha = {alpha} is not positive")));
    }
    Ok(Threshold {
        beta,
        alpha,
        n: model.utility.inverse_marginal(alpha),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct Truncation {
    pub control: ControlPath,
    pub threshold: Threshold,
    /// `I_T = ∫₀^T e^{−ρt}(c − c∧N)`.
    pub i_t: f64,
    pub changed: bool,
}

/// `c^T`: `c∧N` on `[0,T]`, `c + I_T` on `(T, T+β]`, `c` afterwards.
pub fn truncate_control(
    model: &ModelSpec,
    g: &Minorant,
    c: &ControlPath,
    k0: f64,
    t: f64,
) -> Result<Truncation, FunctionalError> {
    let rep = admissible_forever(model, k0, c)?;
    if let Some((time, state)) = rep.violation {
        return Err(DynamicsError::Inadmissible { time, state }.into());
    }
    let th = truncation_threshold(model, g, k0, t)?;
    if c.sup_on(t) <= th.n {
        return Ok(Truncation {
            control: c.clone(),
            threshold: th,
            i_t: 0.0,
            changed: false,
        });
    }
    let r = c.refine(&[t, t + th.beta]);
    let i_t: f64 = r
        .segments()
        .take_while(|s| s.0 < t)
        .map(|(a, b, v)| (v - th.n).max(0.0) * segment_discount(model.rho, a, b.min(t)))
        .sum();
    let values = r
        .segments()
        .map(|(a, _, v)| {
            if a < t {
                v.min(th.n)
            } else if a < t + th.beta {
                v + i_t
            } else {
                v
            }
        })
        .collect::<Vec<_>>();
    let n = values.len();
    let control = ControlPath::new(r.breaks().to_vec(), values[..n - 1].to_vec(), values[n - 1])?;
    Ok(Truncation {
        control,
        threshold: th,
        i_t,
        changed: true,
    })
}

/// `c^{k₁−k₀} + 1` on `[0, k₁−k₀)`, `c^{k₁−k₀}` afterwards.
pub fn bump_control(
    model: &ModelSpec,
    g: &Minorant,
    c: &ControlPath,
    k0: f64,
    k1: f64,
) -> Result<ControlPath, FunctionalError> {
    if !(k1 > k0) {
        return Err(FunctionalError::Domain(format!("need k1 > k0, got k0={k0}, k1={k1}")));
    }
    let t = k1 - k0;
    let ct = truncate_control(model, g, c, k0, t)?.control.refine(&[t]);
    let values: Vec<f64> = ct.segments().map(|(a, _, v)| if a < t { v + 1.0 } else { v }).collect();
    let n = values.len();
    Ok(ControlPath::new(ct.breaks().to_vec(), values[..n - 1].to_vec(), values[n - 1])?)
}

/// Lower bound `u'(N(k₀,k₁−k₀)+1) ∫₀^{k₁−k₀} e^{−ρt} dt` on the gain of the
/// bump control.
pub fn bump_gain_bound(model: &ModelSpec, g: &Minorant, k0: f64, k1: f64) -> Result<f64, FunctionalError> {
    let t = k1 - k0;
    let th = truncation_threshold(model, g, k0, t)?;
    Ok(model.utility.marginal(th.n + 1.0) * segment_discount(model.rho, 0.0, t))
}
