//! Test functions for the verification checks: multivariate polynomials,
//! real/imaginary parts of `exp(i<h,x>)`, and custom evaluators. Each carries
//! value/gradient/Hessian evaluators plus declared sup bounds that the Monte
//! Carlo checks spot-verify on their own samples.

use std::fmt;
use std::sync::Arc;

type DynField = Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>;
type DynGrad = Arc<dyn Fn(&[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone)]
pub enum TestKind {
    /// Sum of monomials `coef * prod_k x_k^{pow[k]}`.
    Polynomial(Vec<(f64, Vec<u32>)>),
    /// `cos(<h, x>)`
    ExpCos(Vec<f64>),
    /// `sin(<h, x>)`
    ExpSin(Vec<f64>),
    Custom { value: DynField, grad: DynGrad },
}

#[derive(Clone)]
pub struct TestFunction {
    pub kind: TestKind,
    pub label: String,
    /// Declared `sup |phi|` over the working region.
    pub sup_value: f64,
    /// Declared `sup |D phi|` over the working region.
    pub sup_grad: f64,
}

impl fmt::Debug for TestFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "TestFunction({})", self.label)
    }
}

impl TestFunction {
    pub fn polynomial(terms: Vec<(f64, Vec<u32>)>, label: impl Into<String>) -> Self {
        Self { kind: TestKind::Polynomial(terms), label: label.into(), sup_value: f64::INFINITY, sup_grad: f64::INFINITY }
    }

    /// Univariate polynomial `sum_m coeffs[m] x^m` acting on coordinate `k`.
    pub fn poly1d(coeffs: &[f64], dim: usize, k: usize, label: impl Into<String>) -> Self {
        let terms = coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| **c != 0.0)
            .map(|(m, c)| {
                let mut pow = vec![0u32; dim];
                pow[k] = m as u32;
                (*c, pow)
            })
            .collect();
        Self::polynomial(terms, label)
    }

    pub fn exp_cos(h: Vec<f64>) -> Self {
        let hn = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        let label = format!("cos<h,x>, |h|={hn:.3}");
        Self { kind: TestKind::ExpCos(h), label, sup_value: 1.0, sup_grad: hn }
    }

    pub fn exp_sin(h: Vec<f64>) -> Self {
        let hn = h.iter().map(|v| v * v).sum::<f64>().sqrt();
        let label = format!("sin<h,x>, |h|={hn:.3}");
        Self { kind: TestKind::ExpSin(h), label, sup_value: 1.0, sup_grad: hn }
    }

    pub fn custom(
        value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
        grad: impl Fn(&[f64]) -> Vec<f64> + Send + Sync + 'static,
        label: impl Into<String>,
    ) -> Self {
        Self {
            kind: TestKind::Custom { value: Arc::new(value), grad: Arc::new(grad) },
            label: label.into(),
            sup_value: f64::INFINITY,
            sup_grad: f64::INFINITY,
        }
    }

    /// Set declared bounds (used by Monte Carlo estimators and truncation
    /// budgets).
    pub fn with_bounds(mut self, sup_value: f64, sup_grad: f64) -> Self {
        self.sup_value = sup_value;
        self.sup_grad = sup_grad;
        self
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        match &self.kind {
            TestKind::Polynomial(terms) => terms
                .iter()
                .map(|(c, pow)| c * monomial(x, pow))
                .sum(),
            TestKind::ExpCos(h) => dot(h, x).cos(),
            TestKind::ExpSin(h) => dot(h, x).sin(),
            TestKind::Custom { value, .. } => value(x),
        }
    }

    pub fn grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            TestKind::Polynomial(terms) => {
                let mut g = vec![0.0; x.len()];
                for (c, pow) in terms {
                    for k in 0..x.len() {
                        if pow[k] == 0 {
                            continue;
                        }
                        let mut dp = pow.clone();
                        dp[k] -= 1;
                        g[k] += c * pow[k] as f64 * monomial(x, &dp);
                    }
                }
                g
            }
            TestKind::ExpCos(h) => {
                let s = -dot(h, x).sin();
                h.iter().map(|hk| hk * s).collect()
            }
            TestKind::ExpSin(h) => {
                let c = dot(h, x).cos();
                h.iter().map(|hk| hk * c).collect()
            }
            TestKind::Custom { grad, .. } => grad(x),
        }
    }

    /// Row-major Hessian. The custom kind falls back to central differences
    /// of the gradient.
    pub fn hess(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        match &self.kind {
            TestKind::Polynomial(terms) => {
                let mut h = vec![0.0; n * n];
                for (c, pow) in terms {
                    for i in 0..n {
                        if pow[i] == 0 {
                            continue;
                        }
                        // diagonal
                        if pow[i] >= 2 {
                            let mut dp = pow.clone();
                            dp[i] -= 2;
                            h[i * n + i] +=
                                c * (pow[i] * (pow[i] - 1)) as f64 * monomial(x, &dp);
                        }
                        for j in i + 1..n {
                            if pow[j] == 0 {
                                continue;
                            }
                            let mut dp = pow.clone();
                            dp[i] -= 1;
                            dp[j] -= 1;
                            let v = c * (pow[i] * pow[j]) as f64 * monomial(x, &dp);
                            h[i * n + j] += v;
                            h[j * n + i] += v;
                        }
                    }
                }
                h
            }
            TestKind::ExpCos(hv) => {
                let c = -dot(hv, x).cos();
                outer(hv, c)
            }
            TestKind::ExpSin(hv) => {
                let s = -dot(hv, x).sin();
                outer(hv, s)
            }
            TestKind::Custom { grad, .. } => {
                let mut h = vec![0.0; n * n];
                let step = 1e-5;
                for k in 0..n {
                    let mut xp = x.to_vec();
                    let mut xm = x.to_vec();
                    xp[k] += step;
                    xm[k] -= step;
                    let gp = grad(&xp);
                    let gm = grad(&xm);
                    for r in 0..n {
                        h[r * n + k] = (gp[r] - gm[r]) / (2.0 * step);
                    }
                }
                // symmetrize
                for r in 0..n {
                    for c2 in r + 1..n {
                        let v = 0.5 * (h[r * n + c2] + h[c2 * n + r]);
                        h[r * n + c2] = v;
                        h[c2 * n + r] = v;
                    }
                }
                h
            }
        }
    }

    pub fn hess_trace(&self, x: &[f64]) -> f64 {
        let n = x.len();
        let h = self.hess(x);
        (0..n).map(|k| h[k * n + k]).sum()
    }

    /// Check declared bounds on a set of points; returns the first violation.
    pub fn check_bounds(&self, points: &[Vec<f64>]) -> Option<String> {
        for p in points {
            let v = self.value(p).abs();
            if v > self.sup_value * (1.0 + 1e-12) {
                return Some(format!("|{}({p:?})| = {v} exceeds declared sup {}", self.label, self.sup_value));
            }
            let g = self.grad(p);
            let gn = g.iter().map(|v| v * v).sum::<f64>().sqrt();
            if gn > self.sup_grad * (1.0 + 1e-12) {
                return Some(format!("|D{}({p:?})| = {gn} exceeds declared sup {}", self.label, self.sup_grad));
            }
        }
        None
    }
}

fn monomial(x: &[f64], pow: &[u32]) -> f64 {
    x.iter().zip(pow).map(|(v, p)| v.powi(*p as i32)).product()
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn outer(h: &[f64], scale: f64) -> Vec<f64> {
    let n = h.len();
    let mut m = vec![0.0; n * n];
    for i in 0..n {
        for j in 0..n {
            m[i * n + j] = scale * h[i] * h[j];
        }
    }
    m
}

/// The fixed, versioned 1D polynomial family (degree <= 4), acting on
/// coordinate 0 of a `dim`-dimensional model.
pub fn polynomial_family_1d(dim: usize) -> Vec<TestFunction> {
    let coeff_sets: [(&str, &[f64]); 10] = [
        ("1", &[1.0]),
        ("x", &[0.0, 1.0]),
        ("x^2", &[0.0, 0.0, 1.0]),
        ("x^3", &[0.0, 0.0, 0.0, 1.0]),
        ("x^4", &[0.0, 0.0, 0.0, 0.0, 1.0]),
        ("1 + x^2", &[1.0, 0.0, 1.0]),
        ("x - x^3", &[0.0, 1.0, 0.0, -1.0]),
        ("x^2 - x^4", &[0.0, 0.0, 1.0, 0.0, -1.0]),
        ("x + x^2", &[0.0, 1.0, 1.0]),
        ("1 + x/2 + x^4/4", &[1.0, 0.5, 0.0, 0.0, 0.25]),
    ];
    coeff_sets
        .iter()
        .map(|(label, cs)| TestFunction::poly1d(cs, dim, 0, *label))
        .collect()
}

/// Exponential family: `cos<h,x>` and `sin<h,x>` for `h` on a small lattice
/// of coordinate directions.
pub fn exponential_family(dim: usize) -> Vec<TestFunction> {
    let mut fns = Vec::new();
    for k in 0..dim.min(2) {
        for m in [1.0, 2.0] {
            let mut h = vec![0.0; dim];
            h[k] = m;
            fns.push(TestFunction::exp_cos(h.clone()));
            fns.push(TestFunction::exp_sin(h));
        }
    }
    fns
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        // phi = x0^2 x1 + 3 x1^4
        let phi = TestFunction::polynomial(
            vec![(1.0, vec![2, 1]), (3.0, vec![0, 4])],
            "x0^2 x1 + 3 x1^4",
        );
        let x = [1.5, -0.5];
        assert!((phi.value(&x) - (1.5f64.powi(2) * -0.5 + 3.0 * 0.5f64.powi(4))).abs() < 1e-14);
        let g = phi.grad(&x);
        assert!((g[0] - 2.0 * 1.5 * -0.5).abs() < 1e-14);
        assert!((g[1] - (1.5f64.powi(2) + 12.0 * (-0.5f64).powi(3))).abs() < 1e-14);
        let h = phi.hess(&x);
        assert!((h[0] - 2.0 * -0.5).abs() < 1e-14); // d2/dx0^2
        assert!((h[1] - 2.0 * 1.5).abs() < 1e-14); // mixed
        assert!((h[3] - 36.0 * 0.25).abs() < 1e-14); // d2/dx1^2 = 36 x1^2
        assert!((phi.hess_trace(&x) - (h[0] + h[3])).abs() < 1e-14);
    }

    #[test]
    fn exponential_derivatives_match_finite_differences() {
        let phi = TestFunction::exp_cos(vec![1.0, 2.0]);
        let x = [0.3, -0.7];
        let g = phi.grad(&x);
        let step = 1e-6;
        for k in 0..2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += step;
            xm[k] -= step;
            let fd = (phi.value(&xp) - phi.value(&xm)) / (2.0 * step);
            assert!((fd - g[k]).abs() < 1e-8);
        }
        assert_eq!(phi.sup_value, 1.0);
        assert!((phi.sup_grad - 5.0f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn bound_check_flags_violations() {
        let phi = TestFunction::poly1d(&[0.0, 1.0], 1, 0, "x").with_bounds(0.5, 1.0);
        let bad = phi.check_bounds(&[vec![0.9]]);
        assert!(bad.is_some());
        let ok = phi.check_bounds(&[vec![0.4]]);
        assert!(ok.is_none());
    }
}
