//! Problem data: production `F`, utility `u`, discount `ρ`, growth margin `ε₀`,
//! and the structural constants derived from them.

mod production;
mod utility;
mod validate;

pub use production::{marginal_sup, CccParams, ProductionFunction};
pub use utility::{TabulatedUtility, UtilityFunction};
pub use validate::{detect_curvature_breakpoints, validate_model, CheckOutcome, Curvature, Probe, ValidationReport};

use crate::numeric::bisect;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("production shape: {0}")]
    Shape(String),
    #[error("model evaluation error: {what} is not finite at {at}")]
    Evaluation { what: &'static str, at: f64 },
    #[error("probe resolution error: {0}")]
    Resolution(String),
    #[error("invalid probe: {0}")]
    Probe(String),
}

/// Constants consumed by the bounds and lemmas.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DerivedConstants {
    /// `M̄ = sup F'`.
    pub m_bar: f64,
    /// `M₀`: `F(x) ≤ (L+ε₀)x` for every `x ≥ M₀`.
    pub m0: f64,
    /// `M̂ = max_{[0,M₀]} F`, so that `F(x) ≤ (L+ε₀)x + M̂` everywhere.
    pub m_hat: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    pub production: ProductionFunction,
    pub utility: UtilityFunction,
    pub rho: f64,
    pub eps0: f64,
    pub constants: DerivedConstants,
}

/// Default growth margin `ε₀ = min(0.1ρ, ½(ρ − Lγ)/(1+γ))`, where `γ` is the
/// utility's tail exponent (`1−σ` for CRRA).
pub fn default_eps0(rho: f64, l: f64, tail_exponent: f64) -> f64 {
    let g = tail_exponent;
    (0.1 * rho).min(0.5 * (rho - l * g) / (1.0 + g))
}

impl ModelSpec {
    /// Assembles a model. `eps0 = None` selects [`default_eps0`].
    ///
    /// Only the scalar preconditions (`ρ > 0`, `ε₀ > 0`) are enforced here;
    /// the full set of structural assumptions is checked by
    /// [`validate_model`].
    pub fn new(
        production: ProductionFunction,
        utility: UtilityFunction,
        rho: f64,
        eps0: Option<f64>,
    ) -> Result<Self, ModelError> {
        if !(rho.is_finite() && rho > 0.0) {
            return Err(ModelError::Parameter(format!("rho must be positive, got {rho}")));
        }
        let l = production.asymptotic_slope();
        let eps0 = eps0.unwrap_or_else(|| default_eps0(rho, l, utility.tail_exponent()));
        if !(eps0.is_finite() && eps0 > 0.0) {
            return Err(ModelError::Parameter(format!("eps0 must be positive, got {eps0}")));
        }
        let constants = derive_constants(&production, eps0);
        Ok(ModelSpec {
            production,
            utility,
            rho,
            eps0,
            constants,
        })
    }

    /// AK model `F(k) = Lk`, `u(c) = c^{1−σ}`.
    pub fn ak(l: f64, sigma: f64, rho: f64, eps0: Option<f64>) -> Result<Self, ModelError> {
        ModelSpec::new(ProductionFunction::linear(l)?, UtilityFunction::crra(sigma)?, rho, eps0)
    }

    /// CCC production with CRRA utility.
    pub fn ccc(params: CccParams, sigma: f64, rho: f64, eps0: Option<f64>) -> Result<Self, ModelError> {
        ModelSpec::new(ProductionFunction::ccc(params)?, UtilityFunction::crra(sigma)?, rho, eps0)
    }

    pub fn l(&self) -> f64 {
        self.production.asymptotic_slope()
    }

    pub fn m_bar(&self) -> f64 {
        self.constants.m_bar
    }

    pub fn f(&self, k: f64) -> f64 {
        self.production.value(k)
    }

    pub fn u(&self, c: f64) -> f64 {
        self.utility.value(c)
    }

    /// `(L+ε₀)·γ < ρ − ε₀`: equivalent to
    /// `e^{ε₀t} e^{−ρt} u(e^{(L+ε₀)t}) → 0` for power-tailed utilities.
    pub fn growth_condition_holds(&self) -> bool {
        (self.l() + self.eps0) * self.utility.tail_exponent() < self.rho - self.eps0
    }

    /// `M(k₀) = 1 + max{(L+ε₀)k₀, M̂}`.
    pub fn envelope_m(&self, k0: f64) -> f64 {
        1.0 + ((self.l() + self.eps0) * k0).max(self.constants.m_hat)
    }
}

fn derive_constants(production: &ProductionFunction, eps0: f64) -> DerivedConstants {
    let m_bar = production.marginal_sup();
    let slope = production.asymptotic_slope() + eps0;
    let excess = |x: f64| production.value(x) - slope * x;
    // F(x) − (L+ε₀)x ≤ excess_bound − ε₀x, negative beyond this abscissa
    let x_hi = production.excess_bound() / eps0;
    let m0 = if x_hi <= 0.0 {
        0.0
    } else {
        let n = 8192;
        let last_positive = (0..=n).rev().map(|i| x_hi * i as f64 / n as f64).find(|&x| excess(x) > 0.0);
        match last_positive {
            None => 0.0,
            Some(x) => {
                let step = x_hi / n as f64;
                bisect(excess, x, x + step, 1e-12 * x_hi, 200).unwrap_or(x + step)
            }
        }
    };
    // F is increasing on [0, ∞)
    let m_hat = production.value(m0).max(0.0);
    DerivedConstants { m_bar, m0, m_hat }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_eps0_matches_formula() {
        let m = ModelSpec::ak(0.05, 0.5, 0.06, None).unwrap();
        // min(0.006, 0.5·0.035/1.5)
        assert!((m.eps0 - 0.006).abs() < 1e-15);
        assert!(m.growth_condition_holds());
    }

    #[test]
    fn ak_constants() {
        let m = ModelSpec::ak(0.05, 0.5, 0.06, Some(0.001)).unwrap();
        assert_eq!(m.constants.m_bar, 0.05);
        assert_eq!(m.constants.m0, 0.0);
        assert_eq!(m.constants.m_hat, 0.0);
    }

    #[test]
    fn ccc_sublinear_envelope_holds() {
        let m = ModelSpec::ccc(CccParams::default(), 0.5, 0.06, None).unwrap();
        let c = m.constants;
        assert!(c.m0 > 0.0 && c.m_hat > 0.0);
        for i in 0..20_000 {
            let x = i as f64 * 0.05;
            assert!(m.f(x) <= (m.l() + m.eps0) * x + c.m_hat + 1e-12, "x={x}");
        }
        for i in 0..2000 {
            let x = c.m0 + i as f64 * 0.5;
            assert!(m.f(x) <= (m.l() + m.eps0) * x + 1e-12);
        }
    }

    #[test]
    fn rejects_nonpositive_rho() {
        assert!(ModelSpec::ak(0.05, 0.5, 0.0, None).is_err());
        assert!(ModelSpec::ak(0.05, 0.5, 0.06, Some(-1.0)).is_err());
    }
}
