//! Closed-form benchmark for `F(k) = Lk`, `u(c) = c^{1−σ}`.
//!
//! Substituting `V = Bk^{1−σ}` into `ρV = max_c {u(c) + V'(Lk − c)}` gives
//! the consumption ratio `m = (ρ − (1−σ)L)/σ`, `c = mk` and `B = m^{−σ}`.

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
#[error("invalid AK parameters: {0}")]
pub struct OracleError(String);

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AkParams {
    pub l: f64,
    pub sigma: f64,
    pub rho: f64,
}

impl AkParams {
    pub fn new(l: f64, sigma: f64, rho: f64) -> Result<Self, OracleError> {
        if !(l > 0.0 && sigma > 0.0 && sigma < 1.0 && rho > 0.0) {
            return Err(OracleError(format!("need L > 0, 0 < sigma < 1, rho > 0 (L={l}, sigma={sigma}, rho={rho})")));
        }
        if !(rho > (1.0 - sigma) * l) {
            return Err(OracleError(format!("rho = {rho} must exceed (1-sigma)L = {}", (1.0 - sigma) * l)));
        }
        Ok(AkParams { l, sigma, rho })
    }

    /// Consumption-to-capital ratio.
    pub fn m(&self) -> f64 {
        (self.rho - (1.0 - self.sigma) * self.l) / self.sigma
    }

    pub fn b(&self) -> f64 {
        self.m().powf(-self.sigma)
    }
}

pub fn ak_value(p: &AkParams, k: f64) -> f64 {
    p.b() * k.powf(1.0 - p.sigma)
}

pub fn ak_slope(p: &AkParams, k: f64) -> f64 {
    p.b() * (1.0 - p.sigma) * k.powf(-p.sigma)
}

pub fn ak_policy(p: &AkParams, k: f64) -> f64 {
    p.m() * k
}

/// Closed-loop capital `k₀ e^{(L−m)t}`.
pub fn ak_trajectory(p: &AkParams, k0: f64, t: f64) -> f64 {
    k0 * ((p.l - p.m()) * t).exp()
}

/// `ρV(k) − u(mk) − V'(k)(L − m)k`.
pub fn hjb_residual(p: &AkParams, k: f64) -> f64 {
    p.rho * ak_value(p, k) - (p.m() * k).powf(1.0 - p.sigma) - ak_slope(p, k) * (p.l - p.m()) * k
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::greedy_consumption;
    use crate::model::UtilityFunction;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn base() -> AkParams {
        AkParams::new(0.05, 0.5, 0.06).unwrap()
    }

    #[test]
    fn base_constants() {
        let p = base();
        assert!((p.m() - 0.07).abs() < 1e-15);
        assert!((ak_value(&p, 1.0) - 0.07f64.powf(-0.5)).abs() < 1e-15);
        assert_eq!(ak_value(&p, 0.0), 0.0);
        assert!((ak_trajectory(&p, 1.0, 10.0) - (-0.2f64).exp()).abs() < 1e-15);
        assert_eq!(ak_trajectory(&p, 2.0, 0.0), 2.0);
    }

    #[test]
    fn rejects_impatience_violation() {
        assert!(AkParams::new(0.05, 0.5, 0.02).is_err());
        assert!(AkParams::new(0.05, 1.0, 0.06).is_err());
    }

    #[test]
    fn hjb_identity_and_greedy_policy() {
        let p = base();
        let u = UtilityFunction::crra(0.5).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..100 {
            let k: f64 = rng.gen_range(1e-3..50.0);
            assert!(hjb_residual(&p, k).abs() < 1e-10 * ak_value(&p, k).max(1.0));
            let c = greedy_consumption(&u, ak_slope(&p, k)).unwrap();
            assert!((c - ak_policy(&p, k)).abs() < 1e-12 * k);
        }
    }
}
