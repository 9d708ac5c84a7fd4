//! Gauss-Legendre nodes and weights via Newton iteration on the
//! three-term recurrence.

use std::f64::consts::PI;

/// Legendre polynomial P_n and its derivative at `x`.
fn legendre_pd(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for j in 2..=n {
        let jf = j as f64;
        let p2 = ((2.0 * jf - 1.0) * x * p1 - (jf - 1.0) * p0) / jf;
        p0 = p1;
        p1 = p2;
    }
    // interior nodes satisfy |x| < 1, so the denominator is safe
    let dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, dp)
}

/// Nodes and weights of the `n`-point Gauss-Legendre rule on [-1, 1],
/// in ascending node order.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1, "quadrature order must be at least 1");
    if n == 1 {
        return (vec![0.0], vec![2.0]);
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-like initial guess, descending from +1
        let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        for _ in 0..50 {
            let (p, dp) = legendre_pd(n, x);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, dp) = legendre_pd(n, x);
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[n - 1 - i] = x;
        nodes[i] = -x;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
    (nodes, weights)
}

/// Integrate `f` over [a, b] with the given rule.
pub fn integrate<E>(
    nodes: &[f64],
    weights: &[f64],
    a: f64,
    b: f64,
    mut f: impl FnMut(f64) -> Result<num_complex::Complex64, E>,
) -> Result<num_complex::Complex64, E> {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = num_complex::Complex64::new(0.0, 0.0);
    for (&t, &w) in nodes.iter().zip(weights) {
        acc += w * f(mid + half * t)?;
    }
    Ok(acc * half)
}
