//! Thin wrappers over double-exponential quadrature.

/// `int_a^b f` split into `panels` equal pieces, each integrated by the
/// double-exponential rule.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, panels: usize) -> f64 {
    let panels = panels.max(1);
    let h = (b - a) / panels as f64;
    (0..panels)
        .map(|i| {
            let lo = a + i as f64 * h;
            let hi = if i + 1 == panels { b } else { lo + h };
            quadrature::integrate(&f, lo, hi, 1e-16).integral
        })
        .sum()
}

/// `int_a^inf f` through `x = a + u / (1 - u)`, `u` in `[0, 1)`.
pub fn integrate_to_infinity<F: Fn(f64) -> f64>(f: F, a: f64, panels: usize) -> f64 {
    let g = |u: f64| {
        if u >= 1.0 {
            return 0.0;
        }
        let w = 1.0 - u;
        let v = f(a + u / w) / (w * w);
        if v.is_finite() {
            v
        } else {
            0.0
        }
    };
    integrate(g, 0.0, 1.0, panels)
}
