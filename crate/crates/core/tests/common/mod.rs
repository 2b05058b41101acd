#![allow(dead_code)]

/// Bellman iteration on the coefficient `B` of `V = B·k^{1−σ}` for the AK
/// model, with the exact flow `k(t) = k·e^{(L−x)t}` under `c = x·k`:
/// `B' = max_x x^{1−σ}(1−e^{−rτ})/r + B·e^{−rτ}`, `r = ρ − (1−σ)(L−x)`.
/// Returns `(x*, B)`.
pub fn scalar_ak_iteration(l: f64, sigma: f64, rho: f64, tau: f64) -> (f64, f64) {
    let gain = |x: f64, b: f64| {
        let r = rho - (1.0 - sigma) * (l - x);
        x.powf(1.0 - sigma) * (1.0 - (-r * tau).exp()) / r + b * (-r * tau).exp()
    };
    let (x_lo, x_hi) = (1e-4, 1.0);
    let n = 20_000;
    let mut b = 0.0;
    let mut x_best = 0.0;
    for _ in 0..100_000 {
        let mut best = f64::NEG_INFINITY;
        let mut j_best = 0;
        for j in 0..=n {
            let x = x_lo + (x_hi - x_lo) * j as f64 / n as f64;
            let g = gain(x, b);
            if g > best {
                best = g;
                j_best = j;
            }
        }
        // refine the bracketing pair of grid cells by ternary search
        let h = (x_hi - x_lo) / n as f64;
        let (mut a, mut c) = (x_lo + h * (j_best as f64 - 1.0), x_lo + h * (j_best as f64 + 1.0));
        for _ in 0..200 {
            let m1 = a + (c - a) / 3.0;
            let m2 = c - (c - a) / 3.0;
            if gain(m1, b) < gain(m2, b) {
                a = m1;
            } else {
                c = m2;
            }
        }
        x_best = 0.5 * (a + c);
        let next = gain(x_best, b).max(best);
        let done = (next - b).abs() < 1e-13;
        b = next;
        if done {
            break;
        }
    }
    (x_best, b)
}

/// Composite Simpson rule with `n` (even) panels.
pub fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        s += f(a + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    s * h / 3.0
}
