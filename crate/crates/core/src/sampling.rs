//! Random admissible consumption paths for the randomized checks.

use crate::dynamics::{integrate_state, ControlPath};
use crate::model::ModelSpec;
use rand::Rng;

/// State after holding `c` for `d` time units from `k`, if it stays `≥ 0`.
fn hold(model: &ModelSpec, k: f64, c: f64, d: f64) -> Option<f64> {
    let tr = integrate_state(model, k, &ControlPath::constant(c).ok()?, d).ok()?;
    (tr.min_state >= 0.0).then(|| tr.final_state())
}

/// Largest of `c, c/2, c/4, …` (or 0) that keeps `k` nonnegative over `d`.
fn admissible_level(model: &ModelSpec, k: f64, mut c: f64, d: f64) -> (f64, f64) {
    for _ in 0..60 {
        if let Some(next) = hold(model, k, c, d) {
            return (c, next);
        }
        c *= 0.5;
    }
    (0.0, hold(model, k, 0.0, d).unwrap_or(k))
}

/// A path with 1 to 5 random segments followed by a sustainable tail; it is
/// admissible on `[0, ∞)` by construction.
pub fn random_admissible_control<R: Rng + ?Sized>(model: &ModelSpec, k0: f64, rng: &mut R) -> ControlPath {
    let segments = rng.gen_range(1..=5);
    let mut pieces = Vec::with_capacity(segments);
    let mut k = k0;
    for _ in 0..segments {
        let d = rng.gen_range(0.1..3.0);
        let cap = model.f(k) + k / d;
        let (c, next) = admissible_level(model, k, rng.gen::<f64>() * cap, d);
        pieces.push((d, c));
        k = next;
    }
    let tail = rng.gen::<f64>() * model.f(k);
    ControlPath::from_pieces(&pieces, tail).expect("sampled path is valid")
}

/// A path with one short spike of height `n·U(1.5, 5)` starting inside
/// `[0, t/2)`, with random moderate consumption around it.
pub fn spiky_control<R: Rng + ?Sized>(model: &ModelSpec, k0: f64, t: f64, n: f64, rng: &mut R) -> ControlPath {
    let mut pieces = Vec::new();
    let mut k = k0;
    let start = rng.gen_range(0.0..0.5 * t);
    if start > 0.0 {
        let (c, next) = admissible_level(model, k, rng.gen::<f64>() * model.f(k), start);
        pieces.push((start, c));
        k = next;
    }
    let amp = n * rng.gen_range(1.5..5.0);
    let mut d = rng.gen_range(0.3..0.9) * k / amp;
    let mut after = None;
    for _ in 0..60 {
        if d <= 0.0 {
            break;
        }
        if let Some(next) = hold(model, k, amp, d) {
            after = Some(next);
            break;
        }
        d *= 0.5;
    }
    if let (Some(next), true) = (after, d > 0.0) {
        pieces.push((d, amp));
        k = next;
    }
    let rest = rng.gen_range(0.1..2.0);
    let (c, next) = admissible_level(model, k, rng.gen::<f64>() * model.f(k), rest);
    pieces.push((rest, c));
    let tail = rng.gen::<f64>() * model.f(next);
    ControlPath::from_pieces(&pieces, tail).expect("sampled path is valid")
}
