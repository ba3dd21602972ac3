//! Gauss–Hermite nodes/weights and a composite Simpson helper.

/// Gauss–Hermite rule of order `n` for ∫ e^{−x²} f(x) dx ≈ Σ w_i f(x_i).
///
/// Nodes are the roots of the physicists' Hermite polynomial H_n, located by
/// a sign-change scan plus Newton refinement on the *orthonormal* recurrence
/// (which stays O(1) in magnitude, so no overflow up to the orders used
/// here). Weights come from the Christoffel identity
/// w_i = √π / Σ_{k<n} φ_k(x_i)².
pub fn gauss_hermite(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1 && n <= 256);
    // Orthonormal Hermite values φ_0..φ_n at x.
    let phi_all = |x: f64| -> Vec<f64> {
        let mut v = Vec::with_capacity(n + 1);
        let mut prev = std::f64::consts::PI.powf(-0.25); // φ_0
        let mut cur = std::f64::consts::SQRT_2 * x * prev; // φ_1
        v.push(prev);
        if n >= 1 {
            v.push(cur);
        }
        for k in 1..n {
            let next = x * (2.0 / (k as f64 + 1.0)).sqrt() * cur
                - (k as f64 / (k as f64 + 1.0)).sqrt() * prev;
            v.push(next);
            prev = cur;
            cur = next;
        }
        v
    };
    let phi_n = |x: f64| phi_all(x)[n];
    // φ_n' = √(2n) φ_{n−1}
    let dphi_n = |x: f64| (2.0 * n as f64).sqrt() * phi_all(x)[n - 1];

    // All roots lie inside |x| < sqrt(2n+1); scan positive half (symmetry).
    let upper = (2.0 * n as f64 + 1.0).sqrt() + 0.5;
    let scan_step = 0.5 * std::f64::consts::PI / (2.0 * n as f64 + 1.0).sqrt();
    let mut roots = Vec::with_capacity(n);
    let mut x_prev = if n % 2 == 1 { 0.0 } else { 1e-12 };
    if n % 2 == 1 {
        roots.push(0.0);
        x_prev = scan_step * 0.25;
    }
    let mut f_prev = phi_n(x_prev);
    let mut x = x_prev;
    while x < upper {
        x += scan_step * 0.5;
        let f = phi_n(x);
        if f_prev != 0.0 && f_prev.signum() != f.signum() {
            // Newton refinement from the midpoint.
            let mut r = 0.5 * (x_prev + x);
            for _ in 0..60 {
                let step = phi_n(r) / dphi_n(r);
                r -= step;
                if step.abs() < 1e-15 * (1.0 + r.abs()) {
                    break;
                }
            }
            roots.push(r);
        }
        x_prev = x;
        f_prev = f;
    }
    debug_assert_eq!(roots.len(), n.div_ceil(2), "missed Hermite roots");

    let mut nodes = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    for &r in roots.iter().rev() {
        if r > 0.0 {
            nodes.push(-r);
        }
    }
    for &r in &roots {
        if r > 0.0 || n % 2 == 1 {
            nodes.push(r);
        }
    }
    nodes.sort_by(|a, b| a.partial_cmp(b).unwrap());
    for &xi in &nodes {
        let phis = phi_all(xi);
        let s: f64 = phis[..n].iter().map(|p| p * p).sum();
        weights.push(1.0 / s);
    }
    (nodes, weights)
}

/// Composite Simpson on [a, b] with an even number of panels.
pub fn simpson<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64, panels: usize) -> f64 {
    assert!(panels >= 2 && panels % 2 == 0, "Simpson needs an even panel count");
    let h = (b - a) / panels as f64;
    let mut sum = f(a) + f(b);
    for i in 1..panels {
        let x = a + h * i as f64;
        sum += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    sum * h / 3.0
}
