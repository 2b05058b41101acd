//! `H(k,p) = −sup_{c≥0} {[F(k) − c]p + u(c)} = −F(k)p − u*(p)` with the
//! utility conjugate `u*(p) = sup_c {u(c) − cp}`.

use crate::model::{ModelSpec, UtilityFunction};
use crate::numeric::golden_section_max;
use thiserror::Error;

#[derive(Debug, Error, Clone, Copy, PartialEq)]
pub enum HamiltonianError {
    #[error("costate must be positive, got p = {0}")]
    CostateDomain(f64),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HamiltonianEval {
    pub k: f64,
    pub p: f64,
    pub h: f64,
    pub c_star: f64,
}

fn check(p: f64) -> Result<(), HamiltonianError> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(HamiltonianError::CostateDomain(p))
    }
}

/// `c* = (u')⁻¹(p)`.
pub fn greedy_consumption(u: &UtilityFunction, p: f64) -> Result<f64, HamiltonianError> {
    check(p)?;
    Ok(u.inverse_marginal(p))
}

/// `u*(p) = u(c*) − c*p`.
pub fn utility_conjugate(u: &UtilityFunction, p: f64) -> Result<f64, HamiltonianError> {
    let c = greedy_consumption(u, p)?;
    Ok(u.value(c) - c * p)
}

/// `(c*, u*(p))` by golden-section search on `[(u')⁻¹(10³p), (u')⁻¹(10⁻³p)]`.
pub fn conjugate_numeric(u: &UtilityFunction, p: f64) -> Result<(f64, f64), HamiltonianError> {
    check(p)?;
    let lo = u.inverse_marginal(1e3 * p);
    let hi = u.inverse_marginal(1e-3 * p);
    Ok(golden_section_max(|c| u.value(c) - c * p, lo, hi, 200, 0.0))
}

pub fn hamiltonian(model: &ModelSpec, k: f64, p: f64) -> Result<HamiltonianEval, HamiltonianError> {
    let c_star = greedy_consumption(&model.utility, p)?;
    let conj = model.u(c_star) - c_star * p;
    Ok(HamiltonianEval {
        k,
        p,
        h: -model.f(k) * p - conj,
        c_star,
    })
}
