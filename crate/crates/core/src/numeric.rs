//! Small one-dimensional numerical kernels shared by the modules: golden-section
//! maximization, bisection root finding and double-exponential (tanh-sinh)
//! quadrature on finite intervals.

const INV_PHI: f64 = 0.618_033_988_749_894_9;

/// Maximizes a unimodal `f` on `[lo, hi]` by golden-section search.
///
/// Returns `(argmax, max)`. The bracket shrinks by `1/φ` per iteration; the
/// loop stops after `iters` iterations or once the bracket is below `xtol`.
pub fn golden_section_max<F>(mut f: F, lo: f64, hi: f64, iters: usize, xtol: f64) -> (f64, f64)
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = if lo <= hi { (lo, hi) } else { (hi, lo) };
    let mut x1 = b - INV_PHI * (b - a);
    let mut x2 = a + INV_PHI * (b - a);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    for _ in 0..iters {
        if (b - a).abs() <= xtol {
            break;
        }
        // ties move toward the lower abscissa
        if f1 >= f2 {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - INV_PHI * (b - a);
            f1 = f(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + INV_PHI * (b - a);
            f2 = f(x2);
        }
    }
    let candidates = [(a, f(a)), (x1, f1), (x2, f2), (b, f(b))];
    let mut best = candidates[0];
    for &(x, fx) in &candidates[1..] {
        if fx > best.1 {
            best = (x, fx);
        }
    }
    best
}

/// Finds a root of `f` in `[lo, hi]` by bisection. `f(lo)` and `f(hi)` must
/// have opposite signs (or one of them be zero); returns `None` otherwise.
pub fn bisect<F>(mut f: F, lo: f64, hi: f64, xtol: f64, max_iter: usize) -> Option<f64>
where
    F: FnMut(f64) -> f64,
{
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let fb = f(b);
    if !(fa.is_finite() && fb.is_finite()) {
        return None;
    }
    if fa == 0.0 {
        return Some(a);
    }
    if fb == 0.0 {
        return Some(b);
    }
    if fa.signum() == fb.signum() {
        return None;
    }
    for _ in 0..max_iter {
        let m = 0.5 * (a + b);
        if (b - a).abs() <= xtol || m == a || m == b {
            return Some(m);
        }
        let fm = f(m);
        if fm == 0.0 {
            return Some(m);
        }
        if fm.signum() == fa.signum() {
            a = m;
            fa = fm;
        } else {
            b = m;
        }
    }
    Some(0.5 * (a + b))
}

/// Tanh-sinh quadrature of `f` over `[a, b]`.
///
/// Tolerates integrable endpoint singularities: `f` is never evaluated at
/// the endpoints themselves. Refines the step by halving until successive
/// estimates agree to `rel_tol` (relative) or the level cap is reached.
pub fn tanh_sinh<F>(mut f: F, a: f64, b: f64, rel_tol: f64) -> f64
where
    F: FnMut(f64) -> f64,
{
    use std::f64::consts::FRAC_PI_2;
    if a == b {
        return 0.0;
    }
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    const T_MAX: f64 = 4.0;

    // Node at abscissa parameter t; returns the weighted contribution of the
    // symmetric pair (t, -t), or of the centre node when t == 0.
    let mut pair = |t: f64| -> f64 {
        let s = FRAC_PI_2 * t.sinh();
        let cs = s.cosh();
        let w = FRAC_PI_2 * t.cosh() / (cs * cs);
        // distance from the nearer endpoint, computed without cancellation
        let d = half / (s.exp() * cs);
        if t == 0.0 {
            return w * f(mid);
        }
        if d <= 0.0 || w == 0.0 {
            return 0.0;
        }
        let left = a + d;
        let right = b - d;
        let mut acc = 0.0;
        if left > a && left < b {
            acc += f(left);
        }
        if right > a && right < b {
            acc += f(right);
        }
        w * acc
    };

    let mut h = 0.5;
    let mut sum = pair(0.0);
    let mut k = 1;
    while (k as f64) * h <= T_MAX {
        sum += pair(k as f64 * h);
        k += 1;
    }
    let mut estimate = half * h * sum;
    for _level in 0..12 {
        h *= 0.5;
        // new nodes are the odd multiples of the halved step
        let mut k = 1;
        while (k as f64) * h <= T_MAX {
            sum += pair(k as f64 * h);
            k += 2;
        }
        let next = half * h * sum;
        let diff = (next - estimate).abs();
        estimate = next;
        if diff <= rel_tol * estimate.abs().max(1e-300) {
            break;
        }
    }
    estimate
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, fx) = golden_section_max(|x| -(x - 1.3) * (x - 1.3) + 2.0, -4.0, 7.0, 200, 1e-14);
        assert!((x - 1.3).abs() < 1e-7);
        assert!((fx - 2.0).abs() < 1e-12);
    }

    #[test]
    fn golden_section_returns_boundary_for_monotone() {
        let (x, _) = golden_section_max(|x| x, 0.0, 3.0, 200, 1e-14);
        assert!((x - 3.0).abs() < 1e-9);
    }

    #[test]
    fn bisect_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15, 200).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, 0.0, 2.0, 1e-15, 200).is_none());
    }

    #[test]
    fn tanh_sinh_smooth_and_singular() {
        let v = tanh_sinh(|x| x.exp(), 0.0, 1.0, 1e-14);
        assert!((v - (1f64.exp() - 1.0)).abs() < 1e-13);
        // 1/sqrt(x) on (0,1] integrates to 2
        let v = tanh_sinh(|x| 1.0 / x.sqrt(), 0.0, 1.0, 1e-13);
        assert!((v - 2.0).abs() < 1e-10, "{v}");
        // log singularity: ∫ -ln x = 1
        let v = tanh_sinh(|x| -x.ln(), 0.0, 1.0, 1e-13);
        assert!((v - 1.0).abs() < 1e-11, "{v}");
    }
}
