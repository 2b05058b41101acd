use super::ModelError;
use crate::numeric::bisect;

/// Instantaneous utility `u` on `[0, ∞)`.
#[derive(Clone, Debug, PartialEq)]
pub enum UtilityFunction {
    /// `u(c) = c^{1−σ}` with `σ ∈ (0, 1)`.
    Crra { sigma: f64 },
    Tabulated(TabulatedUtility),
}

impl UtilityFunction {
    pub fn crra(sigma: f64) -> Result<Self, ModelError> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return Err(ModelError::Parameter(format!("sigma must lie in (0, 1), got {sigma}")));
        }
        Ok(UtilityFunction::Crra { sigma })
    }

    pub fn value(&self, c: f64) -> f64 {
        match self {
            UtilityFunction::Crra { sigma } => {
                if c <= 0.0 {
                    0.0
                } else {
                    c.powf(1.0 - sigma)
                }
            }
            UtilityFunction::Tabulated(t) => t.value(c),
        }
    }

    /// `u'(c)`; `+∞` at `c = 0`.
    pub fn marginal(&self, c: f64) -> f64 {
        match self {
            UtilityFunction::Crra { sigma } => {
                if c <= 0.0 {
                    f64::INFINITY
                } else {
                    (1.0 - sigma) * c.powf(-sigma)
                }
            }
            UtilityFunction::Tabulated(t) => t.marginal(c),
        }
    }

    /// `(u')⁻¹(p)` for `p > 0`.
    pub fn inverse_marginal(&self, p: f64) -> f64 {
        match self {
            UtilityFunction::Crra { sigma } => ((1.0 - sigma) / p).powf(1.0 / sigma),
            UtilityFunction::Tabulated(t) => t.inverse_marginal(p),
        }
    }

    /// `ln u(e^y)`, exact on the power-law tails so that it stays finite
    /// where `e^y` overflows.
    pub fn ln_value_exp(&self, y: f64) -> f64 {
        match self {
            UtilityFunction::Crra { sigma } => (1.0 - sigma) * y,
            UtilityFunction::Tabulated(t) => {
                let n = t.c.len();
                let (cn, un) = (t.c[n - 1], t.u[n - 1]);
                if y >= cn.ln() {
                    un.ln() + t.tail_exponent * (y - cn.ln())
                } else {
                    t.value(y.exp()).ln()
                }
            }
        }
    }

    /// Exponent `γ` of the power law `u(x) ~ x^γ` as `x → ∞`; it decides the
    /// growth condition `(L+ε₀)·γ < ρ − ε₀`.
    pub fn tail_exponent(&self) -> f64 {
        match self {
            UtilityFunction::Crra { sigma } => 1.0 - sigma,
            UtilityFunction::Tabulated(t) => t.tail_exponent,
        }
    }
}

/// A concave utility given by knots `(c_i, u_i)` with `(c_0, u_0) = (0, 0)`.
///
/// Between the first and the last positive knot `u` is the monotone cubic
/// (Fritsch–Carlson) Hermite interpolant of the knots, differentiated
/// analytically. On `[0, c_1]` and beyond the last knot it is continued by
/// power laws `u_1 (c/c_1)^{γ_h}` and `u_n (c/c_n)^{γ_t}` matching value and
/// slope, so `u(0) = 0`, `u'(0⁺) = ∞` and `u'(∞) = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct TabulatedUtility {
    c: Vec<f64>,
    u: Vec<f64>,
    slopes: Vec<f64>,
    head_exponent: f64,
    tail_exponent: f64,
}

impl TabulatedUtility {
    pub fn new(knots: &[(f64, f64)]) -> Result<Self, ModelError> {
        if knots.len() < 4 {
            return Err(ModelError::Parameter("tabulated utility needs at least 4 knots".into()));
        }
        if knots[0] != (0.0, 0.0) {
            return Err(ModelError::Parameter("first utility knot must be (0, 0)".into()));
        }
        for w in knots.windows(2) {
            if !(w[1].0 > w[0].0 && w[1].1 > w[0].1) || !w[1].0.is_finite() || !w[1].1.is_finite() {
                return Err(ModelError::Parameter(format!(
                    "utility knots must be finite and strictly increasing in both coordinates near c={}",
                    w[1].0
                )));
            }
        }
        let c: Vec<f64> = knots.iter().map(|k| k.0).collect();
        let u: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let n = c.len();
        let secants: Vec<f64> = (0..n - 1).map(|i| (u[i + 1] - u[i]) / (c[i + 1] - c[i])).collect();
        for w in secants.windows(2) {
            if w[1] >= w[0] {
                return Err(ModelError::Parameter("utility knots must be strictly concave".into()));
            }
        }
        // Fritsch–Carlson slopes at interior knots: weighted harmonic means
        let mut slopes = vec![0.0; n];
        for i in 1..n - 1 {
            let h0 = c[i] - c[i - 1];
            let h1 = c[i + 1] - c[i];
            let (d0, d1) = (secants[i - 1], secants[i]);
            let w0 = 2.0 * h1 + h0;
            let w1 = h1 + 2.0 * h0;
            slopes[i] = (w0 + w1) / (w0 / d0 + w1 / d1);
        }
        let last = secants[n - 2];
        let h1 = c[n - 1] - c[n - 2];
        let h0 = c[n - 2] - c[n - 3];
        let end = ((2.0 * h1 + h0) * last - h1 * secants[n - 3]) / (h0 + h1);
        slopes[n - 1] = if end > 0.0 && end <= last { end } else { 0.5 * last };

        let head_exponent = c[1] * slopes[1] / u[1];
        let tail_exponent = c[n - 1] * slopes[n - 1] / u[n - 1];
        Ok(TabulatedUtility {
            c,
            u,
            slopes,
            head_exponent,
            tail_exponent,
        })
    }

    /// Samples `f` at `knots` (which must start at 0 with `f(0) = 0`).
    pub fn from_fn(knots: &[f64], f: impl Fn(f64) -> f64) -> Result<Self, ModelError> {
        let pts: Vec<(f64, f64)> = knots.iter().map(|&c| (c, f(c))).collect();
        Self::new(&pts)
    }

    fn segment(&self, c: f64) -> usize {
        // index i with c_i <= c < c_{i+1}, restricted to 1..=n-2
        let n = self.c.len();
        match self.c.binary_search_by(|x| x.partial_cmp(&c).unwrap()) {
            Ok(i) => i.clamp(1, n - 2),
            Err(i) => (i - 1).clamp(1, n - 2),
        }
    }

    pub fn value(&self, c: f64) -> f64 {
        let n = self.c.len();
        if c <= 0.0 {
            return 0.0;
        }
        if c < self.c[1] {
            return self.u[1] * (c / self.c[1]).powf(self.head_exponent);
        }
        if c >= self.c[n - 1] {
            return self.u[n - 1] * (c / self.c[n - 1]).powf(self.tail_exponent);
        }
        let i = self.segment(c);
        let h = self.c[i + 1] - self.c[i];
        let t = (c - self.c[i]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = 2.0 * t3 - 3.0 * t2 + 1.0;
        let h10 = t3 - 2.0 * t2 + t;
        let h01 = -2.0 * t3 + 3.0 * t2;
        let h11 = t3 - t2;
        h00 * self.u[i] + h10 * h * self.slopes[i] + h01 * self.u[i + 1] + h11 * h * self.slopes[i + 1]
    }

    pub fn marginal(&self, c: f64) -> f64 {
        let n = self.c.len();
        if c <= 0.0 {
            return f64::INFINITY;
        }
        if c < self.c[1] {
            return self.head_exponent * self.u[1] / self.c[1] * (c / self.c[1]).powf(self.head_exponent - 1.0);
        }
        if c >= self.c[n - 1] {
            return self.tail_exponent * self.u[n - 1] / self.c[n - 1]
                * (c / self.c[n - 1]).powf(self.tail_exponent - 1.0);
        }
        let i = self.segment(c);
        let h = self.c[i + 1] - self.c[i];
        let t = (c - self.c[i]) / h;
        let t2 = t * t;
        let d00 = 6.0 * t2 - 6.0 * t;
        let d10 = 3.0 * t2 - 4.0 * t + 1.0;
        let d01 = -6.0 * t2 + 6.0 * t;
        let d11 = 3.0 * t2 - 2.0 * t;
        (d00 * self.u[i] + d01 * self.u[i + 1]) / h + d10 * self.slopes[i] + d11 * self.slopes[i + 1]
    }

    pub fn inverse_marginal(&self, p: f64) -> f64 {
        let n = self.c.len();
        let (c1, u1, gh) = (self.c[1], self.u[1], self.head_exponent);
        let (cn, un, gt) = (self.c[n - 1], self.u[n - 1], self.tail_exponent);
        if p >= self.slopes[1] {
            // p = gh·u1/c1·(c/c1)^{gh−1}
            return c1 * (p * c1 / (gh * u1)).powf(1.0 / (gh - 1.0));
        }
        if p <= self.slopes[n - 1] {
            return cn * (p * cn / (gt * un)).powf(1.0 / (gt - 1.0));
        }
        bisect(|c| self.marginal(c) - p, c1, cn, 1e-14 * cn, 300).unwrap_or(f64::NAN)
    }

    pub fn tail_exponent(&self) -> f64 {
        self.tail_exponent
    }
}
