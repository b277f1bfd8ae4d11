//! Geometry of the convex set `K = {g <= 1}`: membership, Euclidean
//! projection, distance, exterior normal and the Moreau penalty gradient.
//!
//! The projection of an exterior point solves the KKT system
//! `y = x - t Dg(y)`, `g(y) = 1`, `t > 0` by a damped Newton iteration,
//! warm-started on the ray through `x` (all presets contain the origin in
//! their interior). tol_proj = 1e-12 and max_iter = 100; Newton steps are
//! halved while the residual does not decrease.

use crate::error::{Error, Result};
use crate::linalg::solve_dense;
use crate::quad::gauss_legendre;
use serde::{Deserialize, Serialize};

pub const TOL_PROJ: f64 = 1e-12;
pub const TOL_SURFACE: f64 = 1e-6;
pub const TOL_PSD: f64 = 1e-6;
const MAX_ITER: usize = 100;

/// A smooth convex functional with gradient and Hessian evaluators.
pub trait Functional: Sync {
    fn value(&self, x: &[f64]) -> f64;
    fn grad(&self, x: &[f64]) -> Vec<f64>;
    /// Row-major dense Hessian.
    fn hess(&self, x: &[f64]) -> Vec<f64>;
}

/// Level functionals available as presets.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "snake_case")]
pub enum BodyKind {
    /// `g(x) = |x|^2 / radius^2`
    Ball { radius: f64 },
    /// `g(x) = sum_k w_k x_k^2`
    Ellipsoid { weights: Vec<f64> },
    /// `g(x) = (1/budget) int_0^length j(u(xi)) dxi` for `u = sum_k x_k e_k`
    /// on the Dirichlet sine basis `e_k(xi) = sqrt(2/length) sin(k pi xi/length)`,
    /// with `j` an even-degree polynomial given by its coefficients
    /// (`j_coeffs[m]` multiplies `r^m`).
    Integrand {
        j_coeffs: Vec<f64>,
        budget: f64,
        length: f64,
    },
}

/// Immutable convex body `K = {g <= 1}` for a fixed truncation dimension.
#[derive(Clone, Debug)]
pub struct ConvexBody {
    kind: BodyKind,
    dim: usize,
    /// xi-quadrature for the integrand preset: (node weights, basis values
    /// `basis[q * dim + k] = e_k(xi_q)`).
    xi_quad: Option<(Vec<f64>, Vec<f64>)>,
}

/// Result of projecting a point onto `K`.
#[derive(Clone, Debug)]
pub struct Projection {
    pub point: Vec<f64>,
    pub distance: f64,
    /// Exterior unit normal at the projected point; `None` for interior points.
    pub normal: Option<Vec<f64>>,
}

impl ConvexBody {
    pub fn new(kind: BodyKind, dim: usize) -> Result<Self> {
        match &kind {
            BodyKind::Ball { radius } => {
                if *radius <= 0.0 {
                    return Err(Error::InvalidParameter("ball radius must be positive".into()));
                }
            }
            BodyKind::Ellipsoid { weights } => {
                if weights.len() != dim {
                    return Err(Error::DimensionMismatch { expected: dim, got: weights.len() });
                }
                if weights.iter().any(|w| *w <= 0.0) {
                    return Err(Error::InvalidParameter("ellipsoid weights must be positive".into()));
                }
            }
            BodyKind::Integrand { j_coeffs, budget, length } => {
                if *budget <= 0.0 || *length <= 0.0 {
                    return Err(Error::InvalidParameter("integrand budget and length must be positive".into()));
                }
                if j_coeffs.is_empty() {
                    return Err(Error::InvalidParameter("integrand needs polynomial coefficients".into()));
                }
            }
        }
        let xi_quad = match &kind {
            BodyKind::Integrand { length, .. } => {
                let (nodes, weights) = gauss_legendre(128);
                let half = length / 2.0;
                let mut w = Vec::with_capacity(nodes.len());
                let mut basis = Vec::with_capacity(nodes.len() * dim);
                let scale = (2.0 / length).sqrt();
                for (x, wt) in nodes.iter().zip(&weights) {
                    let xi = half * (x + 1.0);
                    w.push(wt * half);
                    for k in 1..=dim {
                        basis.push(scale * (k as f64 * std::f64::consts::PI * xi / length).sin());
                    }
                }
                Some((w, basis))
            }
            _ => None,
        };
        Ok(Self { kind, dim, xi_quad })
    }

    pub fn ball(dim: usize, radius: f64) -> Self {
        Self::new(BodyKind::Ball { radius }, dim).unwrap()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &BodyKind {
        &self.kind
    }

    pub fn g(&self, x: &[f64]) -> f64 {
        match &self.kind {
            BodyKind::Ball { radius } => x.iter().map(|v| v * v).sum::<f64>() / (radius * radius),
            BodyKind::Ellipsoid { weights } => {
                x.iter().zip(weights).map(|(v, w)| w * v * v).sum()
            }
            BodyKind::Integrand { j_coeffs, budget, .. } => {
                let (w, basis) = self.xi_quad.as_ref().unwrap();
                let mut s = 0.0;
                for (q, wq) in w.iter().enumerate() {
                    let u = self.field_at(basis, q, x);
                    s += wq * poly_eval(j_coeffs, u);
                }
                s / budget
            }
        }
    }

    pub fn g_grad(&self, x: &[f64]) -> Vec<f64> {
        match &self.kind {
            BodyKind::Ball { radius } => x.iter().map(|v| 2.0 * v / (radius * radius)).collect(),
            BodyKind::Ellipsoid { weights } => {
                x.iter().zip(weights).map(|(v, w)| 2.0 * w * v).collect()
            }
            BodyKind::Integrand { j_coeffs, budget, .. } => {
                let (w, basis) = self.xi_quad.as_ref().unwrap();
                let mut grad = vec![0.0; self.dim];
                for (q, wq) in w.iter().enumerate() {
                    let u = self.field_at(basis, q, x);
                    let jp = poly_eval_deriv(j_coeffs, u);
                    for k in 0..self.dim {
                        grad[k] += wq * jp * basis[q * self.dim + k];
                    }
                }
                for gk in &mut grad {
                    *gk /= budget;
                }
                grad
            }
        }
    }

    pub fn g_hess(&self, x: &[f64]) -> Vec<f64> {
        let n = self.dim;
        match &self.kind {
            BodyKind::Ball { radius } => {
                let c = 2.0 / (radius * radius);
                let mut h = vec![0.0; n * n];
                for k in 0..n {
                    h[k * n + k] = c;
                }
                h
            }
            BodyKind::Ellipsoid { weights } => {
                let mut h = vec![0.0; n * n];
                for k in 0..n {
                    h[k * n + k] = 2.0 * weights[k];
                }
                h
            }
            BodyKind::Integrand { j_coeffs, budget, .. } => {
                let (w, basis) = self.xi_quad.as_ref().unwrap();
                let mut h = vec![0.0; n * n];
                for (q, wq) in w.iter().enumerate() {
                    let u = self.field_at(basis, q, x);
                    let jpp = poly_eval_second(j_coeffs, u);
                    for k in 0..n {
                        let ek = basis[q * n + k];
                        for l in k..n {
                            h[k * n + l] += wq * jpp * ek * basis[q * n + l];
                        }
                    }
                }
                for k in 0..n {
                    for l in 0..k {
                        h[k * n + l] = h[l * n + k];
                    }
                    for l in k..n {
                        h[k * n + l] /= budget;
                    }
                }
                for k in 0..n {
                    for l in 0..k {
                        h[k * n + l] = h[l * n + k];
                    }
                }
                h
            }
        }
    }

    fn field_at(&self, basis: &[f64], q: usize, x: &[f64]) -> f64 {
        let row = &basis[q * self.dim..(q + 1) * self.dim];
        row.iter().zip(x).map(|(b, v)| b * v).sum()
    }

    /// Membership: `g(x) <= 1`. Points with `g(x) = 1` belong to `K`.
    pub fn contains(&self, x: &[f64]) -> bool {
        self.g(x) <= 1.0
    }

    /// Euclidean projection onto `K`.
    pub fn project(&self, x: &[f64]) -> Result<Projection> {
        let gx = self.g(x);
        if gx <= 1.0 {
            let normal = if gx >= 1.0 - TOL_PROJ {
                let grad = self.g_grad(x);
                let norm = l2(&grad);
                (norm >= 1e-12).then(|| grad.iter().map(|v| v / norm).collect())
            } else {
                None
            };
            return Ok(Projection { point: x.to_vec(), distance: 0.0, normal });
        }
        // Warm start on the ray through the origin: g(0) = 0 < 1 < g(x).
        let mut lo = 0.0;
        let mut hi = 1.0;
        for _ in 0..40 {
            let mid = 0.5 * (lo + hi);
            let p: Vec<f64> = x.iter().map(|v| v * mid).collect();
            if self.g(&p) > 1.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let s = 0.5 * (lo + hi);
        let mut y: Vec<f64> = x.iter().map(|v| v * s).collect();
        let grad0 = self.g_grad(&y);
        let gn0 = l2(&grad0).max(1e-12);
        let d0: f64 = dist(x, &y);
        let mut t = d0 / gn0;

        let n = self.dim;
        let mut resid = self.kkt_residual(x, &y, t);
        let mut rnorm = linf(&resid);
        let mut iters = 0;
        while rnorm > TOL_PROJ {
            iters += 1;
            if iters > MAX_ITER {
                return Err(Error::SolverDiverged {
                    iters: MAX_ITER,
                    residual: rnorm,
                    context: " in projection KKT Newton".into(),
                });
            }
            let grad = self.g_grad(&y);
            let hess = self.g_hess(&y);
            // J = [[I + t H, Dg], [Dg^T, 0]]
            let m = n + 1;
            let mut jac = vec![0.0; m * m];
            for r in 0..n {
                for c in 0..n {
                    jac[r * m + c] = t * hess[r * n + c] + if r == c { 1.0 } else { 0.0 };
                }
                jac[r * m + n] = grad[r];
                jac[n * m + r] = grad[r];
            }
            let rhs: Vec<f64> = resid.iter().map(|v| -v).collect();
            let delta = solve_dense(&jac, &rhs, m).ok_or(Error::SolverDiverged {
                iters,
                residual: rnorm,
                context: " (singular KKT Jacobian)".into(),
            })?;
            // damped update: halve until the residual decreases
            let mut step = 1.0;
            let mut accepted = false;
            for _ in 0..30 {
                let y_new: Vec<f64> = (0..n).map(|k| y[k] + step * delta[k]).collect();
                let t_new = t + step * delta[n];
                let r_new = self.kkt_residual(x, &y_new, t_new);
                let rn = linf(&r_new);
                if rn < rnorm {
                    y = y_new;
                    t = t_new;
                    resid = r_new;
                    rnorm = rn;
                    accepted = true;
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return Err(Error::SolverDiverged {
                    iters,
                    residual: rnorm,
                    context: " (line search stalled)".into(),
                });
            }
        }
        let distance = dist(x, &y);
        let normal: Vec<f64> = x.iter().zip(&y).map(|(a, b)| (a - b) / distance).collect();
        Ok(Projection { point: y, distance, normal: Some(normal) })
    }

    fn kkt_residual(&self, x: &[f64], y: &[f64], t: f64) -> Vec<f64> {
        let grad = self.g_grad(y);
        let mut r: Vec<f64> = (0..self.dim).map(|k| y[k] - x[k] + t * grad[k]).collect();
        r.push(self.g(y) - 1.0);
        r
    }

    /// Distance to `K`.
    pub fn distance(&self, x: &[f64]) -> Result<f64> {
        Ok(self.project(x)?.distance)
    }

    /// Moreau penalty gradient `beta_eps(x) = (x - Pi_K(x)) / eps`; zero on `K`.
    pub fn penalty_gradient(&self, x: &[f64], eps: f64) -> Result<Vec<f64>> {
        debug_assert!(eps > 0.0);
        let p = self.project(x)?;
        Ok(x.iter().zip(&p.point).map(|(a, b)| (a - b) / eps).collect())
    }

    /// Exterior unit normal `Dg(y)/|Dg(y)|` at a boundary point.
    pub fn exterior_normal(&self, y: &[f64]) -> Result<Vec<f64>> {
        let dev = (self.g(y) - 1.0).abs();
        if dev > TOL_SURFACE {
            return Err(Error::NotOnBoundary { deviation: dev, tol: TOL_SURFACE });
        }
        let grad = self.g_grad(y);
        let norm = l2(&grad);
        if norm < 1e-12 {
            return Err(Error::DegenerateGradient { norm });
        }
        Ok(grad.iter().map(|v| v / norm).collect())
    }

    /// Quadratic form `<(I - D Pi_K(x)) v, v>` by central differences of the
    /// projection along `v`; nonnegative up to `TOL_PSD` for convex `K`.
    pub fn projection_jacobian_quadratic_form(&self, x: &[f64], v: &[f64]) -> Result<f64> {
        let vnorm = l2(v);
        if vnorm == 0.0 {
            return Ok(0.0);
        }
        let delta = 1e-5;
        let xp: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + delta * b).collect();
        let xm: Vec<f64> = x.iter().zip(v).map(|(a, b)| a - delta * b).collect();
        let pp = self.project(&xp)?.point;
        let pm = self.project(&xm)?.point;
        let mut q = 0.0;
        for k in 0..self.dim {
            let dpi = (pp[k] - pm[k]) / (2.0 * delta);
            q += (v[k] - dpi) * v[k];
        }
        Ok(q)
    }
}

fn poly_eval(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, c| acc * r + c)
}

fn poly_eval_deriv(coeffs: &[f64], r: f64) -> f64 {
    let mut acc = 0.0;
    for (m, c) in coeffs.iter().enumerate().skip(1).rev() {
        acc = acc * r + m as f64 * c;
    }
    acc
}

fn poly_eval_second(coeffs: &[f64], r: f64) -> f64 {
    let mut acc = 0.0;
    for (m, c) in coeffs.iter().enumerate().skip(2).rev() {
        acc = acc * r + (m * (m - 1)) as f64 * c;
    }
    acc
}

fn l2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn linf(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).powi(2)).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{substream, Domain};
    use rand::Rng;

    #[test]
    fn membership_examples() {
        let ball = ConvexBody::ball(2, 1.0);
        assert!(ball.contains(&[0.0, 0.0]));
        let x = [1.5 / 2.0f64.sqrt(), 1.5 / 2.0f64.sqrt()];
        assert!(!ball.contains(&x));
        // boundary points belong to K
        assert!(ball.contains(&[1.0, 0.0]));
    }

    #[test]
    fn integrand_with_quadratic_j_matches_ball() {
        // j(r) = r^2 on an orthonormal basis integrates to |x|^2
        let body = ConvexBody::new(
            BodyKind::Integrand { j_coeffs: vec![0.0, 0.0, 1.0], budget: 1.0, length: 1.0 },
            3,
        )
        .unwrap();
        let x = [0.57, -0.4, 0.5]; // sum of squares = 0.9349
        let g = body.g(&x);
        let exact: f64 = x.iter().map(|v| v * v).sum();
        assert!((g - exact).abs() < 1e-12, "{g} vs {exact}");
        let x_in = [0.3f64, 0.9, 0.0]; // 0.09 + 0.81 = 0.90
        assert!(body.contains(&x_in));
        let scale = (0.99f64 / 0.90).sqrt();
        let x99: Vec<f64> = x_in.iter().map(|v| v * scale).collect();
        assert!(body.contains(&x99));
        let grad = body.g_grad(&x);
        for (gk, xk) in grad.iter().zip(&x) {
            assert!((gk - 2.0 * xk).abs() < 1e-10);
        }
    }

    #[test]
    fn ball_projection_is_radial() {
        let ball = ConvexBody::ball(3, 1.0);
        let x = [2.0, 0.0, 0.0];
        let p = ball.project(&x).unwrap();
        assert!((p.point[0] - 1.0).abs() < 1e-10);
        assert!((p.distance - 1.0).abs() < 1e-10);
        let n = p.normal.unwrap();
        assert!((n[0] - 1.0).abs() < 1e-10);

        let x = [1.2, -1.6, 0.0]; // |x| = 2
        let p = ball.project(&x).unwrap();
        let pn = (p.point.iter().map(|v| v * v).sum::<f64>()).sqrt();
        assert!((pn - 1.0).abs() < 1e-10);
        assert!((p.distance - 1.0).abs() < 1e-10);
        for (pk, xk) in p.point.iter().zip(&x) {
            assert!((pk - xk / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn interior_point_is_fixed() {
        let ball = ConvexBody::ball(2, 1.0);
        let p = ball.project(&[0.2, 0.1]).unwrap();
        assert_eq!(p.distance, 0.0);
        assert_eq!(p.point, vec![0.2, 0.1]);
        assert!(p.normal.is_none());
    }

    #[test]
    fn ellipsoid_axis_projection() {
        let body = ConvexBody::new(BodyKind::Ellipsoid { weights: vec![1.0, 4.0] }, 2).unwrap();
        let p = body.project(&[2.0, 0.0]).unwrap();
        assert!((p.point[0] - 1.0).abs() < 1e-10);
        assert!(p.point[1].abs() < 1e-10);
        assert!((p.distance - 1.0).abs() < 1e-10);
    }

    #[test]
    fn penalty_gradient_examples() {
        let ball = ConvexBody::ball(2, 1.0);
        let inside = ball.penalty_gradient(&[0.3, -0.2], 0.5).unwrap();
        assert_eq!(inside, vec![0.0, 0.0]);
        // |x| = 2, eps = 0.5: (x/2)/0.5 = x
        let x = [1.6, 1.2];
        let beta = ball.penalty_gradient(&x, 0.5).unwrap();
        for (bk, xk) in beta.iter().zip(&x) {
            assert!((bk - xk / 2.0 / 0.5).abs() < 1e-9);
        }
        // |beta| = d_K/eps
        let d = ball.distance(&x).unwrap();
        let bn = l2(&beta);
        assert!((bn - d / 0.5).abs() < 1e-9);
    }

    #[test]
    fn exterior_normal_examples() {
        let ball = ConvexBody::ball(2, 1.0);
        let n = ball.exterior_normal(&[1.0, 0.0]).unwrap();
        assert!((n[0] - 1.0).abs() < 1e-12 && n[1].abs() < 1e-12);
        assert!(matches!(
            ball.exterior_normal(&[0.5, 0.0]),
            Err(Error::NotOnBoundary { .. })
        ));
        let ell = ConvexBody::new(BodyKind::Ellipsoid { weights: vec![1.0, 4.0] }, 2).unwrap();
        let n = ell.exterior_normal(&[0.0, 0.5]).unwrap();
        assert!(n[0].abs() < 1e-12 && (n[1] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn normal_consistent_with_projection_direction() {
        let ball = ConvexBody::ball(2, 1.0);
        let y = [0.6, 0.8];
        let n = ball.exterior_normal(&y).unwrap();
        let s = 0.3;
        let x: Vec<f64> = y.iter().zip(&n).map(|(yk, nk)| yk + s * nk).collect();
        let p = ball.project(&x).unwrap();
        let pn = p.normal.unwrap();
        for (a, b) in pn.iter().zip(&n) {
            assert!((a - b).abs() < 1e-8);
        }
    }

    #[test]
    fn projection_jacobian_form_examples() {
        let ball = ConvexBody::ball(2, 1.0);
        let x = [1.5, 0.9];
        assert_eq!(ball.projection_jacobian_quadratic_form(&x, &[0.0, 0.0]).unwrap(), 0.0);
        // along the exterior normal the projection is constant: form = |v|^2 = 1
        let p = ball.project(&x).unwrap();
        let n = p.normal.unwrap();
        let q = ball.projection_jacobian_quadratic_form(&x, &n).unwrap();
        assert!((q - 1.0).abs() < 1e-5, "{q}");
    }

    #[test]
    fn projection_jacobian_form_nonnegative_random() {
        let ball = ConvexBody::ball(3, 1.0);
        let ell =
            ConvexBody::new(BodyKind::Ellipsoid { weights: vec![1.0, 4.0, 2.0] }, 3).unwrap();
        let mut rng = substream(Domain::Probe, 11, 0, 0);
        for body in [&ball, &ell] {
            for _ in 0..1000 {
                let x: Vec<f64> = (0..3).map(|_| 3.0 * (rng.gen::<f64>() - 0.5) * 2.0).collect();
                if body.contains(&x) {
                    continue;
                }
                let v: Vec<f64> = (0..3).map(|_| (rng.gen::<f64>() - 0.5) * 2.0).collect();
                let q = body.projection_jacobian_quadratic_form(&x, &v).unwrap();
                assert!(q >= -TOL_PSD, "form {q} at x={x:?} v={v:?}");
            }
        }
    }

    #[test]
    fn nonexpansive_and_variational_inequality() {
        let ell =
            ConvexBody::new(BodyKind::Ellipsoid { weights: vec![1.0, 3.0] }, 2).unwrap();
        let mut rng = substream(Domain::Probe, 12, 0, 0);
        for _ in 0..500 {
            let x: Vec<f64> = (0..2).map(|_| 6.0 * (rng.gen::<f64>() - 0.5)).collect();
            let y: Vec<f64> = (0..2).map(|_| 6.0 * (rng.gen::<f64>() - 0.5)).collect();
            let px = ell.project(&x).unwrap().point;
            let py = ell.project(&y).unwrap().point;
            assert!(dist(&px, &py) <= dist(&x, &y) + 1e-9);
            // normal cone inequality against a sampled member of K
            let mut k_pt: Vec<f64> = (0..2).map(|_| 2.0 * (rng.gen::<f64>() - 0.5)).collect();
            if !ell.contains(&k_pt) {
                k_pt = ell.project(&k_pt).unwrap().point;
            }
            let ip: f64 = (0..2).map(|i| (x[i] - px[i]) * (k_pt[i] - px[i])).sum();
            assert!(ip <= 1e-8, "variational inequality violated: {ip}");
        }
    }

    #[test]
    fn distance_gradient_identity() {
        // Dd_K by finite differences matches (x - Pi x)/d_K away from the boundary
        let ball = ConvexBody::ball(2, 1.0);
        let x = [1.7, -0.8];
        let p = ball.project(&x).unwrap();
        let expected: Vec<f64> =
            x.iter().zip(&p.point).map(|(a, b)| (a - b) / p.distance).collect();
        let h = 1e-6;
        for k in 0..2 {
            let mut xp = x.to_vec();
            let mut xm = x.to_vec();
            xp[k] += h;
            xm[k] -= h;
            let fd =
                (ball.distance(&xp).unwrap() - ball.distance(&xm).unwrap()) / (2.0 * h);
            assert!((fd - expected[k]).abs() < 1e-6);
        }
    }

    #[test]
    fn projection_is_idempotent() {
        let ell = ConvexBody::new(BodyKind::Ellipsoid { weights: vec![2.0, 1.0] }, 2).unwrap();
        let mut rng = substream(Domain::Probe, 13, 0, 0);
        for _ in 0..200 {
            let x: Vec<f64> = (0..2).map(|_| 8.0 * (rng.gen::<f64>() - 0.5)).collect();
            let p = ell.project(&x).unwrap();
            let p2 = ell.project(&p.point).unwrap();
            assert!(p2.distance <= TOL_PROJ * 10.0 + 1e-13);
        }
    }

    #[test]
    fn hessian_positive_definite_spot_checks() {
        let body = ConvexBody::new(
            BodyKind::Integrand { j_coeffs: vec![0.0, 0.0, 1.0, 0.0, 0.5], budget: 1.0, length: 1.0 },
            3,
        )
        .unwrap();
        let mut rng = substream(Domain::Probe, 14, 0, 0);
        for _ in 0..100 {
            let x: Vec<f64> = (0..3).map(|_| 2.0 * (rng.gen::<f64>() - 0.5)).collect();
            let h: Vec<f64> = (0..3).map(|_| 2.0 * (rng.gen::<f64>() - 0.5)).collect();
            let hess = body.g_hess(&x);
            let mut q = 0.0;
            for i in 0..3 {
                for j in 0..3 {
                    q += hess[i * 3 + j] * h[i] * h[j];
                }
            }
            let h2: f64 = h.iter().map(|v| v * v).sum();
            assert!(q >= 2.0 * h2 - 1e-9, "convexity constant violated: {q} vs {h2}");
        }
    }
}
