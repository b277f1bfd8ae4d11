//! Monte Carlo estimation of the penalized resolvent
//! `phi_eps(x) = E int_0^infty e^{-lambda t} f(X_eps(t, x)) dt`
//! and of its gradient by common-random-number central differences.
//!
//! The time integral is discretized by the trapezoid rule along penalized
//! paths and truncated at `T = ln(10 sup|f| / (lambda tol)) / lambda`, so the
//! truncation bias is at most a tenth of the target tolerance; the bias bound
//! is carried in the estimate.

use crate::body::ConvexBody;
use crate::error::Result;
use crate::rng::{substream, Domain};
use crate::sde::OuCoeffs;
use crate::spectral::SpectralModel;
use crate::stats::mean_se;
use rayon::prelude::*;
use serde::Serialize;

/// A bounded scalar field with a declared sup bound (and, when needed for
/// gradient estimates, a declared bound on `|Df|`).
pub struct BoundedField<'a> {
    pub f: &'a (dyn Fn(&[f64]) -> f64 + Sync),
    pub sup_value: f64,
    pub sup_grad: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResolventEstimate {
    pub value: f64,
    pub std_error: f64,
    pub lambda: f64,
    pub eps: f64,
    pub point: Vec<f64>,
    pub horizon: f64,
    pub paths: usize,
    pub step: f64,
    pub seed: u64,
    /// Bound on the time-truncation bias, `e^{-lambda T} sup|f| / lambda`.
    pub truncation_bias: f64,
}

#[derive(Clone, Copy, Debug)]
pub struct FkConfig {
    pub paths: usize,
    pub step: f64,
    /// Target tolerance; sets the truncation horizon.
    pub target_tol: f64,
}

impl Default for FkConfig {
    fn default() -> Self {
        Self { paths: 2000, step: 1e-3, target_tol: 1e-2 }
    }
}

/// Feynman-Kac estimate of `(lambda I - N_eps)^{-1} f` at `x`.
#[allow(clippy::too_many_arguments)]
pub fn feynman_kac(
    model: &SpectralModel,
    body: &ConvexBody,
    eps: f64,
    lambda: f64,
    f: &BoundedField,
    x: &[f64],
    config: &FkConfig,
    seed: u64,
) -> Result<ResolventEstimate> {
    let horizon = truncation_horizon(lambda, f.sup_value, config.target_tol);
    let per_path = fk_per_path(model, body, eps, lambda, f.f, x, config, seed, horizon, 0)?;
    let (value, std_error) = mean_se(&per_path);
    Ok(ResolventEstimate {
        value,
        std_error,
        lambda,
        eps,
        point: x.to_vec(),
        horizon,
        paths: config.paths,
        step: config.step,
        seed,
        truncation_bias: (-lambda * horizon).exp() * f.sup_value / lambda,
    })
}

/// `T = ln(10 sup|f| / (lambda tol)) / lambda`, at least one step long.
pub fn truncation_horizon(lambda: f64, sup_f: f64, tol: f64) -> f64 {
    ((10.0 * sup_f / (lambda * tol)).ln() / lambda).max(1e-3)
}

/// The per-path trapezoid integrals; `salt` offsets the path streams so that
/// independent replications can share a seed.
#[allow(clippy::too_many_arguments)]
fn fk_per_path(
    model: &SpectralModel,
    body: &ConvexBody,
    eps: f64,
    lambda: f64,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    x: &[f64],
    config: &FkConfig,
    seed: u64,
    horizon: f64,
    salt: u64,
) -> Result<Vec<f64>> {
    let h = config.step;
    let steps = (horizon / h).ceil() as usize;
    let ou = OuCoeffs::new(model, h);
    let results: Vec<Result<f64>> = (0..config.paths)
        .into_par_iter()
        .map(|p| {
            let mut state = x.to_vec();
            let mut integral = 0.5 * h * f(&state);
            for s in 0..steps {
                let mut rng = substream(Domain::PathStep, seed, p as u64 + salt, s as u64);
                ou.step(&mut state, &mut rng);
                crate::sde::proximal_substep(body, eps, h, &mut state)?;
                let t = (s + 1) as f64 * h;
                let w = if s + 1 == steps { 0.5 } else { 1.0 };
                integral += w * h * (-lambda * t).exp() * f(&state);
            }
            Ok(integral)
        })
        .collect();
    results.into_iter().collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct GradientEstimate {
    pub gradient: Vec<f64>,
    pub component_se: Vec<f64>,
    pub lambda: f64,
    pub eps: f64,
    pub point: Vec<f64>,
    pub spacing: f64,
    /// Bound on the combined truncation bias of the difference quotient.
    pub truncation_bias: f64,
}

impl GradientEstimate {
    pub fn norm(&self) -> f64 {
        self.gradient.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Conservative standard error of the norm.
    pub fn norm_se(&self) -> f64 {
        self.component_se.iter().map(|v| v * v).sum::<f64>().sqrt()
    }
}

/// Gradient of the resolvent by central differences with common random
/// numbers: both sides of each difference reuse the same path streams, so the
/// numerator is a pathwise difference with small variance. Spacing 1e-4.
#[allow(clippy::too_many_arguments)]
pub fn resolvent_gradient(
    model: &SpectralModel,
    body: &ConvexBody,
    eps: f64,
    lambda: f64,
    f: &BoundedField,
    x: &[f64],
    config: &FkConfig,
    seed: u64,
) -> Result<GradientEstimate> {
    let spacing = 1e-4;
    let horizon = truncation_horizon(lambda, f.sup_value, config.target_tol);
    let n = model.dim();
    let mut gradient = Vec::with_capacity(n);
    let mut component_se = Vec::with_capacity(n);
    for k in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[k] += spacing;
        xm[k] -= spacing;
        let plus = fk_per_path(model, body, eps, lambda, f.f, &xp, config, seed, horizon, 0)?;
        let minus = fk_per_path(model, body, eps, lambda, f.f, &xm, config, seed, horizon, 0)?;
        let diffs: Vec<f64> = plus
            .iter()
            .zip(&minus)
            .map(|(a, b)| (a - b) / (2.0 * spacing))
            .collect();
        let (m, se) = mean_se(&diffs);
        gradient.push(m);
        component_se.push(se);
    }
    Ok(GradientEstimate {
        gradient,
        component_se,
        lambda,
        eps,
        point: x.to_vec(),
        spacing,
        truncation_bias: (-lambda * horizon).exp() * f.sup_grad / lambda,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{grid_solve_1d, GridConfig};

    fn setup() -> (SpectralModel, ConvexBody) {
        (SpectralModel::new(vec![1.0]).unwrap(), ConvexBody::ball(1, 1.0))
    }

    #[test]
    fn constant_f_gives_one_over_lambda() {
        let (model, body) = setup();
        let f = BoundedField { f: &|_| 1.0, sup_value: 1.0, sup_grad: 0.0 };
        let cfg = FkConfig { paths: 64, step: 1e-2, target_tol: 1e-3 };
        let est = feynman_kac(&model, &body, 1e-2, 2.0, &f, &[0.3], &cfg, 21).unwrap();
        // constants have zero variance; the only deviation is the truncation bias
        assert!(est.std_error < 1e-12);
        assert!((est.value - 0.5).abs() <= est.truncation_bias + 1e-9);
        // linearity: f = c (the truncation horizon depends on sup|f|, so the
        // comparison carries both truncation budgets)
        let fc = BoundedField { f: &|_| -3.0, sup_value: 3.0, sup_grad: 0.0 };
        let est_c = feynman_kac(&model, &body, 1e-2, 2.0, &fc, &[0.3], &cfg, 21).unwrap();
        assert!(
            (est_c.value + 3.0 * est.value).abs()
                <= est_c.truncation_bias + 3.0 * est.truncation_bias + 1e-9
        );
    }

    #[test]
    fn fk_matches_grid_oracle_in_1d() {
        let (model, body) = setup();
        let f = BoundedField { f: &|x| x[0].clamp(-3.0, 3.0), sup_value: 3.0, sup_grad: 1.0 };
        let cfg = FkConfig { paths: 4000, step: 2e-3, target_tol: 1e-2 };
        let sol = grid_solve_1d(&model, &body, 1e-2, 1.0, &|x| x, &GridConfig::default()).unwrap();
        for probe in [0.0, 0.5] {
            let est = feynman_kac(&model, &body, 1e-2, 1.0, &f, &[probe], &cfg, 22).unwrap();
            let oracle = sol.eval(probe);
            let tol = (3.0 * est.std_error).max(1e-2);
            assert!(
                (est.value - oracle).abs() < tol,
                "probe {probe}: {} vs {oracle} (tol {tol})",
                est.value
            );
        }
    }

    #[test]
    fn gradient_of_constant_vanishes() {
        let (model, body) = setup();
        let f = BoundedField { f: &|_| 2.0, sup_value: 2.0, sup_grad: 0.0 };
        let cfg = FkConfig { paths: 32, step: 1e-2, target_tol: 1e-2 };
        let g = resolvent_gradient(&model, &body, 1e-2, 1.0, &f, &[0.2], &cfg, 23).unwrap();
        assert!(g.norm() < 1e-10);
    }

    #[test]
    fn gradient_norm_bound_holds() {
        let (model, body) = setup();
        // f = sin(2x): sup|f| = 1, sup|Df| = 2
        let f = BoundedField { f: &|x| (2.0 * x[0]).sin(), sup_value: 1.0, sup_grad: 2.0 };
        let cfg = FkConfig { paths: 800, step: 2e-3, target_tol: 1e-2 };
        let lambda = 1.0;
        let g = resolvent_gradient(&model, &body, 1e-2, lambda, &f, &[0.4], &cfg, 24).unwrap();
        let bound = f.sup_grad / lambda + 3.0 * g.norm_se() + g.truncation_bias;
        assert!(g.norm() <= bound, "{} vs {bound}", g.norm());
    }

    #[test]
    fn gradient_matches_grid_derivative_at_zero() {
        let (model, body) = setup();
        let f = BoundedField { f: &|x| x[0].clamp(-3.0, 3.0), sup_value: 3.0, sup_grad: 1.0 };
        let cfg = FkConfig { paths: 2000, step: 2e-3, target_tol: 1e-2 };
        let g = resolvent_gradient(&model, &body, 1e-2, 1.0, &f, &[0.0], &cfg, 25).unwrap();
        let sol = grid_solve_1d(&model, &body, 1e-2, 1.0, &|x| x, &GridConfig::default()).unwrap();
        let h = sol.xs[1] - sol.xs[0];
        let oracle = (sol.eval(h) - sol.eval(-h)) / (2.0 * h);
        let tol = (3.0 * g.norm_se()).max(1e-2);
        assert!((g.gradient[0] - oracle).abs() < tol, "{} vs {oracle}", g.gradient[0]);
    }

    #[test]
    fn halving_h_stays_within_statistical_error() {
        let (model, body) = setup();
        let f = BoundedField { f: &|x| (x[0]).cos(), sup_value: 1.0, sup_grad: 1.0 };
        let a = feynman_kac(
            &model, &body, 1e-2, 1.0, &f, &[0.2],
            &FkConfig { paths: 2000, step: 2e-3, target_tol: 1e-2 }, 26,
        )
        .unwrap();
        let b = feynman_kac(
            &model, &body, 1e-2, 1.0, &f, &[0.2],
            &FkConfig { paths: 2000, step: 1e-3, target_tol: 1e-2 }, 26,
        )
        .unwrap();
        let band = 3.0 * (a.std_error.powi(2) + b.std_error.powi(2)).sqrt();
        assert!((a.value - b.value).abs() < band + 1e-3);
    }
}
