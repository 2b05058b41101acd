use super::{ModelError, ModelSpec, ProductionFunction, UtilityFunction};

/// Sampling plan for numerical checks: ascending abscissae in `(0, k_probe]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Probe {
    points: Vec<f64>,
}

pub const MIN_PROBE_POINTS: usize = 1000;

impl Probe {
    pub fn new(points: Vec<f64>) -> Result<Self, ModelError> {
        if points.len() < MIN_PROBE_POINTS {
            return Err(ModelError::Probe(format!(
                "probe needs at least {MIN_PROBE_POINTS} points, got {}",
                points.len()
            )));
        }
        if points[0] <= 0.0 || points.windows(2).any(|w| !(w[1] > w[0])) || points.iter().any(|p| !p.is_finite()) {
            return Err(ModelError::Probe("probe points must be positive, finite and strictly increasing".into()));
        }
        Ok(Probe { points })
    }

    pub fn log_spaced(k_min: f64, k_max: f64, n: usize) -> Result<Self, ModelError> {
        if !(k_min > 0.0 && k_max > k_min) || n < 2 {
            return Err(ModelError::Probe(format!("bad log-spaced range [{k_min}, {k_max}]")));
        }
        let r = (k_max / k_min).ln() / (n - 1) as f64;
        let mut points: Vec<f64> = (0..n).map(|i| k_min * (r * i as f64).exp()).collect();
        points[n - 1] = k_max;
        Probe::new(points)
    }

    /// A log-spaced probe on `[1e-4, max(100, 25·scale)]` with 2000 points,
    /// wide enough to contain every feature of `F`.
    pub fn default_for(production: &ProductionFunction) -> Self {
        let hi = (25.0 * production.feature_scale()).max(100.0);
        Probe::log_spaced(1e-4, hi, 2000).expect("static probe range is valid")
    }

    pub fn points(&self) -> &[f64] {
        &self.points
    }

    pub fn k_max(&self) -> f64 {
        *self.points.last().unwrap()
    }
}

/// Result of [`detect_curvature_breakpoints`].
#[derive(Clone, Debug, PartialEq)]
pub enum Curvature {
    /// Two sign changes of `F''`; each estimate is the midpoint of the probe
    /// interval bracketing the change.
    Ccc {
        k_under: f64,
        k_bar: f64,
        under_bracket: (f64, f64),
        bar_bracket: (f64, f64),
    },
    NotCcc { sign_changes: usize },
}

/// Locates the inflections of `F` from central second differences of `F`
/// on the probe grid.
///
/// Differences below the roundoff floor are treated as zero curvature.
/// Errors when a sign run consists of a single sample, i.e. the probe is
/// too coarse to bracket neighbouring changes.
pub fn detect_curvature_breakpoints(f: &ProductionFunction, probe: &Probe) -> Result<Curvature, ModelError> {
    let x = probe.points();
    let mut signs: Vec<(f64, i8)> = Vec::with_capacity(x.len());
    for i in 1..x.len() - 1 {
        let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
        let (f0, f1, f2) = (f.value(x0), f.value(x1), f.value(x2));
        for (v, at) in [(f0, x0), (f1, x1), (f2, x2)] {
            if !v.is_finite() {
                return Err(ModelError::Evaluation { what: "F", at });
            }
        }
        let hm = x1 - x0;
        let hp = x2 - x1;
        let d2 = 2.0 * ((f2 - f1) / hp - (f1 - f0) / hm) / (hp + hm);
        let floor = 1e3 * f64::EPSILON * (f0.abs() + f1.abs() + f2.abs()) / (hm * hp);
        let sign = if d2.abs() <= floor { 0 } else if d2 > 0.0 { 1 } else { -1 };
        signs.push((x1, sign));
    }
    // collapse to runs of non-zero sign
    let mut runs: Vec<(i8, f64, f64, usize)> = Vec::new(); // sign, first x, last x, length
    for &(xi, s) in &signs {
        if s == 0 {
            continue;
        }
        match runs.last_mut() {
            Some(run) if run.0 == s => {
                run.2 = xi;
                run.3 += 1;
            }
            _ => runs.push((s, xi, xi, 1)),
        }
    }
    let changes = runs.len().saturating_sub(1);
    if runs.len() >= 3 {
        if let Some(r) = runs[1..runs.len() - 1].iter().find(|r| r.3 < 2) {
            return Err(ModelError::Resolution(format!(
                "adjacent curvature sign flips near k={}; refine the probe",
                r.1
            )));
        }
    }
    if runs.len() == 3 && runs[0].0 < 0 && runs[1].0 > 0 && runs[2].0 < 0 {
        let under_bracket = (runs[0].2, runs[1].1);
        let bar_bracket = (runs[1].2, runs[2].1);
        return Ok(Curvature::Ccc {
            k_under: 0.5 * (under_bracket.0 + under_bracket.1),
            k_bar: 0.5 * (bar_bracket.0 + bar_bracket.1),
            under_bracket,
            bar_bracket,
        });
    }
    Ok(Curvature::NotCcc { sign_changes: changes })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub pass: bool,
    /// Violating sample (abscissa) when the check fails.
    pub witness: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<CheckOutcome>,
}

impl ValidationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn get(&self, name: &str) -> Option<&CheckOutcome> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckOutcome> {
        self.checks.iter().filter(|c| !c.pass)
    }

    fn push(&mut self, name: &'static str, witness: Option<f64>, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            name,
            pass: witness.is_none(),
            witness,
            detail: detail.into(),
        });
    }

    fn push_bool(&mut self, name: &'static str, pass: bool, detail: impl Into<String>) {
        self.checks.push(CheckOutcome {
            name,
            pass,
            witness: None,
            detail: detail.into(),
        });
    }
}

fn finite(v: f64, what: &'static str, at: f64) -> Result<f64, ModelError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ModelError::Evaluation { what, at })
    }
}

/// Checks every structural assumption on the model data over `probe`.
pub fn validate_model(spec: &ModelSpec, probe: &Probe) -> Result<ValidationReport, ModelError> {
    let mut report = ValidationReport::default();
    let f = &spec.production;
    let u = &spec.utility;
    let l = spec.l();
    let pts = probe.points();

    let f0 = finite(f.value(0.0), "F", 0.0)?;
    report.push("production_origin", (f0 != 0.0).then_some(0.0), format!("F(0) = {f0}"));

    let mut bad = None;
    for &k in pts {
        let d = finite(f.derivative(k), "F'", k)?;
        finite(f.value(k), "F", k)?;
        if d <= 0.0 {
            bad = Some(k);
            break;
        }
    }
    report.push("production_increasing", bad, "F'(k) > 0 on the probe");

    // |F'(k) − L| along a ladder past the probe must shrink and end below 1e-6
    let ladder: Vec<f64> = (1..=4).map(|j| probe.k_max().max(1e3) * 10f64.powi(j)).collect();
    let gaps: Vec<f64> = ladder
        .iter()
        .map(|&k| finite(f.derivative(k), "F'", k).map(|d| (d - l).abs()))
        .collect::<Result<_, _>>()?;
    let trend_ok = gaps.windows(2).all(|w| w[1] <= w[0]);
    let tail_ok = *gaps.last().unwrap() <= 1e-6 * l.max(1.0);
    report.push(
        "production_tail_slope",
        (!(trend_ok && tail_ok)).then_some(*ladder.last().unwrap()),
        format!("|F'(k) - L| = {:e} at k = {:e}", gaps.last().unwrap(), ladder.last().unwrap()),
    );

    match f {
        ProductionFunction::Linear { .. } => report.push_bool("production_shape", true, "linear technology"),
        ProductionFunction::Ccc(_) => match detect_curvature_breakpoints(f, probe) {
            Ok(Curvature::Ccc { k_under, k_bar, .. }) => {
                report.push_bool("production_shape", true, format!("inflections at {k_under:.6} and {k_bar:.6}"))
            }
            Ok(Curvature::NotCcc { sign_changes }) => report.push_bool(
                "production_shape",
                false,
                format!("F'' changes sign {sign_changes} times on the probe"),
            ),
            Err(e) => report.push_bool("production_shape", false, e.to_string()),
        },
    }

    let u0 = finite(u.value(0.0), "u", 0.0)?;
    report.push("utility_origin", (u0 != 0.0).then_some(0.0), format!("u(0) = {u0}"));

    let cs: Vec<f64> = (0..1000).map(|i| 1e-6 * 10f64.powf(12.0 * i as f64 / 999.0)).collect();
    let us: Vec<f64> = cs.iter().map(|&c| finite(u.value(c), "u", c)).collect::<Result<_, _>>()?;
    let inc = cs.iter().zip(us.windows(2)).find(|(_, w)| !(w[1] > w[0])).map(|(&c, _)| c);
    report.push("utility_increasing", inc, "u strictly increasing on [1e-6, 1e6]");
    let secants: Vec<f64> = (0..cs.len() - 1).map(|i| (us[i + 1] - us[i]) / (cs[i + 1] - cs[i])).collect();
    let conc = secants.windows(2).position(|w| !(w[1] < w[0])).map(|i| cs[i + 1]);
    report.push("utility_concave", conc, "secant slopes of u strictly decreasing");

    let m1 = finite(u.marginal(1.0), "u'", 1.0)?;
    let low: Vec<f64> = (0..=12).map(|j| 10f64.powi(-j)).collect();
    let low_m: Vec<f64> = low.iter().map(|&c| finite(u.marginal(c), "u'", c)).collect::<Result<_, _>>()?;
    let ok0 = low_m.windows(2).all(|w| w[1] > w[0]) && *low_m.last().unwrap() > 10.0 * m1;
    report.push("inada_zero", (!ok0).then_some(1e-12), "u' increases without bound as c -> 0");
    let high: Vec<f64> = (0..=12).map(|j| 10f64.powi(j)).collect();
    let high_m: Vec<f64> = high.iter().map(|&c| finite(u.marginal(c), "u'", c)).collect::<Result<_, _>>()?;
    let ok_inf = high_m.windows(2).all(|w| w[1] < w[0]) && *high_m.last().unwrap() < 0.1 * m1;
    report.push("inada_infinity", (!ok_inf).then_some(1e12), "u' decreases toward 0 as c -> infinity");

    report.push_bool("discount_positive", spec.rho > 0.0, format!("rho = {}", spec.rho));
    report.push_bool("margin_positive", spec.eps0 > 0.0, format!("eps0 = {}", spec.eps0));

    let lhs = (l + spec.eps0) * u.tail_exponent();
    let rhs = spec.rho - spec.eps0;
    report.push_bool(
        "growth_condition",
        spec.growth_condition_holds(),
        format!("(L+eps0)*gamma = {lhs} vs rho-eps0 = {rhs}"),
    );

    let c = spec.constants;
    let env = pts
        .iter()
        .copied()
        .find(|&k| f.value(k) > (l + spec.eps0) * k + c.m_hat + 1e-12 * (1.0 + f.value(k)));
    report.push("sublinear_envelope", env, format!("F(k) <= (L+eps0)k + {}", c.m_hat));

    let lip = pts.iter().copied().find(|&k| {
        let tol = 1.0 + 1e-12;
        f.derivative(k) > c.m_bar * tol || f.value(k) > c.m_bar * k * tol
    });
    report.push("lipschitz_bound", lip, format!("F' <= M = {} and F(k) <= M k", c.m_bar));

    if let UtilityFunction::Tabulated(_) = u {
        // the growth condition above uses the fitted tail exponent
        debug_assert!(u.tail_exponent() > 0.0);
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::CccParams;

    #[test]
    fn probe_requires_thousand_points() {
        assert!(Probe::log_spaced(1e-3, 10.0, 999).is_err());
        assert!(Probe::log_spaced(1e-3, 10.0, 1000).is_ok());
        assert!(Probe::new(vec![1.0; 1000]).is_err());
    }

    #[test]
    fn ak_model_passes_every_check() {
        let spec = ModelSpec::ak(0.05, 0.5, 0.06, Some(0.001)).unwrap();
        let report = validate_model(&spec, &Probe::default_for(&spec.production)).unwrap();
        assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
    }

    #[test]
    fn default_models_pass_every_check() {
        for spec in [
            ModelSpec::ak(0.05, 0.5, 0.06, None).unwrap(),
            ModelSpec::ccc(CccParams::default(), 0.5, 0.06, None).unwrap(),
        ] {
            let report = validate_model(&spec, &Probe::default_for(&spec.production)).unwrap();
            assert!(report.all_pass(), "{:?}", report.failures().collect::<Vec<_>>());
        }
    }

    #[test]
    fn growth_condition_failure_is_reported() {
        // 0.051·0.5 = 0.0255 > 0.02 − 0.001
        let spec = ModelSpec::ak(0.05, 0.5, 0.02, Some(0.001)).unwrap();
        let report = validate_model(&spec, &Probe::default_for(&spec.production)).unwrap();
        assert!(!report.get("growth_condition").unwrap().pass);
        assert_eq!(report.failures().count(), 1);
    }

    #[test]
    fn vanishing_marginal_product_has_witness() {
        let p = CccParams { s: -1.0, ..CccParams::default() };
        let spec = ModelSpec::new(
            ProductionFunction::ccc_unchecked(p),
            UtilityFunction::crra(0.5).unwrap(),
            0.06,
            None,
        )
        .unwrap();
        let report = validate_model(&spec, &Probe::default_for(&spec.production)).unwrap();
        let check = report.get("production_increasing").unwrap();
        assert!(!check.pass);
        let k = check.witness.unwrap();
        assert!(spec.production.derivative(k) <= 0.0);
    }

    #[test]
    fn linear_is_not_ccc() {
        let f = ProductionFunction::linear(0.05).unwrap();
        let probe = Probe::log_spaced(1e-4, 100.0, 2000).unwrap();
        assert_eq!(detect_curvature_breakpoints(&f, &probe).unwrap(), Curvature::NotCcc { sign_changes: 0 });
    }

    #[test]
    fn ccc_breakpoints_bracket_analytic_roots() {
        let f = ProductionFunction::ccc(CccParams::default()).unwrap();
        let (lo, hi) = f.inflection_points().unwrap();
        let probe = Probe::default_for(&f);
        match detect_curvature_breakpoints(&f, &probe).unwrap() {
            Curvature::Ccc {
                under_bracket,
                bar_bracket,
                ..
            } => {
                let w0 = under_bracket.1 - under_bracket.0;
                let w1 = bar_bracket.1 - bar_bracket.0;
                assert!(under_bracket.0 - w0 <= lo && lo <= under_bracket.1 + w0);
                assert!(bar_bracket.0 - w1 <= hi && hi <= bar_bracket.1 + w1);
            }
            other => panic!("expected CCC, got {other:?}"),
        }
    }

    #[test]
    fn window_past_k_bar_is_not_ccc() {
        let f = ProductionFunction::ccc(CccParams::default()).unwrap();
        let (_, hi) = f.inflection_points().unwrap();
        let probe = Probe::log_spaced(hi * 1.01, 1e3, 2000).unwrap();
        assert!(matches!(
            detect_curvature_breakpoints(&f, &probe).unwrap(),
            Curvature::NotCcc { .. }
        ));
    }
}
