use super::ModelError;
use crate::numeric::bisect;

/// Parameters of the concave-convex-concave production family
///
/// `F(k) = L·k + a·k/(1+k) + s·k³/(b³+k³)`.
///
/// The saturating `a` term makes `F` concave at the origin, the sigmoid `s`
/// term opens a convex window around `b`, and the linear part fixes the
/// asymptotic marginal product `L`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CccParams {
    pub l: f64,
    pub a: f64,
    pub b: f64,
    pub s: f64,
}

impl Default for CccParams {
    fn default() -> Self {
        CccParams {
            l: 0.05,
            a: 0.1,
            b: 4.0,
            s: 1.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum ProductionFunction {
    /// `F(k) = L·k`.
    Linear { l: f64 },
    Ccc(CccParams),
}

impl ProductionFunction {
    pub fn linear(l: f64) -> Result<Self, ModelError> {
        if !(l.is_finite() && l > 0.0) {
            return Err(ModelError::Parameter(format!("L must be positive and finite, got {l}")));
        }
        Ok(ProductionFunction::Linear { l })
    }

    /// Builds a CCC production function and rejects parameterizations whose
    /// analytic `F''` does not change sign exactly twice (negative to
    /// positive, then positive to negative).
    pub fn ccc(params: CccParams) -> Result<Self, ModelError> {
        let CccParams { l, a, b, s } = params;
        for (name, v) in [("L", l), ("a", a), ("b", b), ("s", s)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(ModelError::Parameter(format!("{name} must be positive and finite, got {v}")));
            }
        }
        let f = ProductionFunction::Ccc(params);
        match f.inflection_points() {
            Some(_) => Ok(f),
            None => Err(ModelError::Shape(format!(
                "F'' of the CCC family with L={l}, a={a}, b={b}, s={s} does not have the concave-convex-concave sign pattern"
            ))),
        }
    }

    /// Builds a CCC production function without any shape or sign checks.
    /// Used to construct deliberately invalid models for validation tests.
    pub fn ccc_unchecked(params: CccParams) -> Self {
        ProductionFunction::Ccc(params)
    }

    /// Asymptotic marginal product `L = lim F'(k)`.
    pub fn asymptotic_slope(&self) -> f64 {
        match self {
            ProductionFunction::Linear { l } => *l,
            ProductionFunction::Ccc(p) => p.l,
        }
    }

    /// `F(k)`. For `k < 0` the function is continued linearly with slope
    /// `F'(0)`; the integrator relies on this to follow orbits that leave
    /// the admissible region.
    pub fn value(&self, k: f64) -> f64 {
        if k < 0.0 {
            return self.derivative(0.0) * k;
        }
        match self {
            ProductionFunction::Linear { l } => l * k,
            ProductionFunction::Ccc(CccParams { l, a, b, s }) => {
                let b3 = b * b * b;
                let k3 = k * k * k;
                l * k + a * k / (1.0 + k) + s * k3 / (b3 + k3)
            }
        }
    }

    pub fn derivative(&self, k: f64) -> f64 {
        let k = k.max(0.0);
        match self {
            ProductionFunction::Linear { l } => *l,
            ProductionFunction::Ccc(CccParams { l, a, b, s }) => {
                let b3 = b * b * b;
                let k3 = k * k * k;
                let d = b3 + k3;
                l + a / ((1.0 + k) * (1.0 + k)) + s * 3.0 * k * k * b3 / (d * d)
            }
        }
    }

    /// Analytic `F''(k)` for `k ≥ 0`.
    pub fn second_derivative(&self, k: f64) -> f64 {
        if k < 0.0 {
            return 0.0;
        }
        match self {
            ProductionFunction::Linear { .. } => 0.0,
            ProductionFunction::Ccc(CccParams { a, b, s, .. }) => {
                let b3 = b * b * b;
                let k3 = k * k * k;
                let d = b3 + k3;
                let one = 1.0 + k;
                -2.0 * a / (one * one * one) + s * 6.0 * k * b3 * (b3 - 2.0 * k3) / (d * d * d)
            }
        }
    }

    /// A scale beyond which every feature of `F` has flattened out.
    pub(crate) fn feature_scale(&self) -> f64 {
        match self {
            ProductionFunction::Linear { .. } => 1.0,
            ProductionFunction::Ccc(p) => p.b.abs().max(1.0),
        }
    }

    /// Sign changes of the analytic `F''` on `(0, ∞)`, located by a dense
    /// log-spaced scan refined with bisection to `1e-13`.
    pub fn curvature_roots(&self) -> Vec<f64> {
        if let ProductionFunction::Linear { .. } = self {
            return Vec::new();
        }
        let hi = 50.0 * self.feature_scale();
        let lo = 1e-8_f64;
        let n = 20_000;
        let ratio = (hi / lo).ln() / (n - 1) as f64;
        let mut roots = Vec::new();
        let mut prev_x = lo;
        let mut prev = self.second_derivative(lo);
        for i in 1..n {
            let x = lo * (ratio * i as f64).exp();
            let cur = self.second_derivative(x);
            if prev != 0.0 && cur != 0.0 && prev.signum() != cur.signum() {
                if let Some(r) = bisect(|z| self.second_derivative(z), prev_x, x, 1e-13, 200) {
                    roots.push(r);
                }
            }
            if cur != 0.0 {
                prev = cur;
                prev_x = x;
            }
        }
        roots
    }

    /// The inflection abscissae `(k̲, k̄)` from the analytic `F''`, or `None`
    /// when `F''` does not switch negative → positive → negative exactly once each.
    pub fn inflection_points(&self) -> Option<(f64, f64)> {
        let roots = self.curvature_roots();
        if roots.len() != 2 {
            return None;
        }
        let (k_under, k_bar) = (roots[0], roots[1]);
        let before = self.second_derivative(0.5 * k_under);
        let between = self.second_derivative(0.5 * (k_under + k_bar));
        if before < 0.0 && between > 0.0 && k_under < k_bar {
            Some((k_under, k_bar))
        } else {
            None
        }
    }

    /// `M̄ = sup F'` over `[0, ∞)`.
    ///
    /// Linear: `L`. CCC: `max{F'(0), F'(k̄)}`; for an unchecked CCC
    /// parameterization without the expected shape, the maximum of `F'` over
    /// a dense scan.
    pub fn marginal_sup(&self) -> f64 {
        match self {
            ProductionFunction::Linear { l } => *l,
            ProductionFunction::Ccc(p) => match self.inflection_points() {
                Some((_, k_bar)) => self.derivative(0.0).max(self.derivative(k_bar)),
                None => {
                    let hi = 50.0 * self.feature_scale();
                    (0..=20_000)
                        .map(|i| self.derivative(hi * i as f64 / 20_000.0))
                        .fold(p.l, f64::max)
                }
            },
        }
    }

    /// An upper bound on `F(x) − L·x` over `x ≥ 0`.
    pub(crate) fn excess_bound(&self) -> f64 {
        match self {
            ProductionFunction::Linear { .. } => 0.0,
            ProductionFunction::Ccc(p) => p.a.max(0.0) + p.s.max(0.0),
        }
    }
}

/// Free-function form of [`ProductionFunction::marginal_sup`].
pub fn marginal_sup(f: &ProductionFunction) -> f64 {
    f.marginal_sup()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ccc() -> ProductionFunction {
        ProductionFunction::ccc(CccParams::default()).unwrap()
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let f = ccc();
        for &k in &[0.01f64, 0.3, 0.9, 2.0, 3.5, 7.0, 40.0] {
            let h = 1e-5 * k.max(1.0);
            let d1 = (f.value(k + h) - f.value(k - h)) / (2.0 * h);
            let d2 = (f.derivative(k + h) - f.derivative(k - h)) / (2.0 * h);
            assert!((d1 - f.derivative(k)).abs() < 1e-8, "F' at {k}");
            assert!((d2 - f.second_derivative(k)).abs() < 1e-7, "F'' at {k}");
        }
    }

    #[test]
    fn default_family_has_two_inflections() {
        let (lo, hi) = ccc().inflection_points().unwrap();
        assert!(0.0 < lo && lo < hi);
        assert!(lo > 0.4 && lo < 0.8, "{lo}");
        assert!(hi > 2.0 && hi < 3.2, "{hi}");
    }

    #[test]
    fn marginal_sup_linear_is_l() {
        assert_eq!(ProductionFunction::linear(0.05).unwrap().marginal_sup(), 0.05);
    }

    #[test]
    fn rejects_bad_parameters() {
        assert!(ProductionFunction::linear(0.0).is_err());
        let mut p = CccParams::default();
        p.s = -1.0;
        assert!(ProductionFunction::ccc(p).is_err());
        // without the sigmoid the family is globally concave
        p.s = 1e-9;
        assert!(matches!(ProductionFunction::ccc(p), Err(ModelError::Shape(_))));
    }

    #[test]
    fn negative_branch_is_linear_continuation() {
        let f = ccc();
        assert_eq!(f.value(-2.0), -2.0 * f.derivative(0.0));
        assert_eq!(f.value(0.0), 0.0);
    }
}
