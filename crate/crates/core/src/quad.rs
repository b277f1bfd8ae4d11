//! Gauss-Legendre quadrature and the panel decompositions used for the
//! low-dimensional integral oracles.
//!
//! The penalized densities `exp(-|x|_Q^2 - d_K^2/eps)` are smooth except for
//! a C^1 kink at the boundary and a boundary layer of width sqrt(eps), so all
//! integrators here split panels at the boundary and grade them on the
//! sqrt(eps) scale.

/// Nodes and weights of the `n`-point Gauss-Legendre rule on `[-1, 1]`,
/// computed by Newton iteration on the Legendre recurrence.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    assert!(n >= 1);
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let m = n.div_ceil(2);
    for i in 0..m {
        // Chebyshev-based initial guess
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_and_deriv(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-15 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
        let (_, d) = legendre_and_deriv(n, 0.0);
        weights[n / 2] = 2.0 / (d * d);
    }
    (nodes, weights)
}

fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Integrate `f` over `[a, b]` with an `n`-point rule.
pub fn integrate_gl(f: &mut dyn FnMut(f64) -> f64, a: f64, b: f64, n: usize) -> f64 {
    let (xs, ws) = gauss_legendre(n);
    let c = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    let mut s = 0.0;
    for (x, w) in xs.iter().zip(&ws) {
        s += w * f(mid + c * x);
    }
    c * s
}

/// Composite rule over consecutive panels given by `breaks`.
pub fn integrate_panels(f: &mut dyn FnMut(f64) -> f64, breaks: &[f64], n_per_panel: usize) -> f64 {
    let mut s = 0.0;
    for w in breaks.windows(2) {
        if w[1] > w[0] {
            s += integrate_gl(f, w[0], w[1], n_per_panel);
        }
    }
    s
}

/// Panel breakpoints for integrands with a kink at `+-edge` and a boundary
/// layer of width `sqrt(eps)` just outside, on the interval `[-reach, reach]`.
pub fn layered_breaks(edge: f64, eps: f64, reach: f64) -> Vec<f64> {
    let s = eps.sqrt();
    let mut right = vec![edge];
    for c in [1.0, 3.0, 8.0, 20.0, 45.0] {
        let x = edge + c * s;
        if x < reach {
            right.push(x);
        }
    }
    right.push(reach);
    let inner = 8;
    let mut breaks: Vec<f64> = right.iter().rev().map(|x| -x).collect();
    for i in 1..inner {
        breaks.push(-edge + 2.0 * edge * i as f64 / inner as f64);
    }
    breaks.extend(right);
    breaks
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gl_nodes_integrate_polynomials_exactly() {
        // n-point rule is exact through degree 2n-1
        let mut f = |x: f64| x.powi(9) + 3.0 * x.powi(4) + 1.0;
        let v = integrate_gl(&mut f, -1.0, 1.0, 5);
        assert!((v - (6.0 / 5.0 + 2.0)).abs() < 1e-14);
    }

    #[test]
    fn gl_weights_sum_to_interval_length() {
        for n in [1, 2, 7, 32, 64, 129] {
            let (_, ws) = gauss_legendre(n);
            let s: f64 = ws.iter().sum();
            assert!((s - 2.0).abs() < 1e-12, "n={n}: {s}");
        }
    }

    #[test]
    fn gaussian_integral_over_panels() {
        let sd = 0.7071067811865476_f64;
        let mut f = |x: f64| (-x * x / (2.0 * sd * sd)).exp() / (sd * (2.0 * std::f64::consts::PI).sqrt());
        let breaks = layered_breaks(1.0, 1e-2, 12.0 * sd);
        let v = integrate_panels(&mut f, &breaks, 32);
        assert!((v - 1.0).abs() < 1e-12, "{v}");
    }
}
