//! Finite Galerkin model of a diagonal drift operator `A`, its stationary
//! Gaussian measure `mu = N(0, Q)` with `Q = A^{-1}/2`, and the white-noise
//! functional `W_z`.

use crate::error::{Error, Result};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

/// Diagonal model: `A e_k = alpha_k e_k`, `Q e_k = lambda_k e_k` with
/// `lambda_k = 1/(2 alpha_k)`. Eigenvalues are kept nondecreasing and bounded
/// below by the recorded `delta`. Immutable after construction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectralModel {
    dim: usize,
    alphas: Vec<f64>,
    lambdas: Vec<f64>,
    delta: f64,
}

impl SpectralModel {
    /// Build from drift eigenvalues; sorts them into canonical nondecreasing
    /// order and records `delta = min alpha_k`.
    pub fn new(alphas: Vec<f64>) -> Result<Self> {
        if alphas.is_empty() {
            return Err(Error::InvalidParameter("alphas must be nonempty".into()));
        }
        if alphas.iter().any(|a| !a.is_finite() || *a <= 0.0) {
            return Err(Error::InvalidParameter(
                "all alpha_k must be positive and finite".into(),
            ));
        }
        let mut alphas = alphas;
        alphas.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let delta = alphas[0];
        let lambdas = alphas.iter().map(|a| 1.0 / (2.0 * a)).collect();
        Ok(Self {
            dim: alphas.len(),
            alphas,
            lambdas,
            delta,
        })
    }

    /// Dirichlet Laplacian on an interval of length `ell`:
    /// `alpha_k = (k pi / ell)^2` for the first `dim` modes.
    pub fn dirichlet_laplacian(dim: usize, ell: f64) -> Result<Self> {
        if ell <= 0.0 {
            return Err(Error::InvalidParameter("interval length must be positive".into()));
        }
        let alphas = (1..=dim)
            .map(|k| (k as f64 * std::f64::consts::PI / ell).powi(2))
            .collect();
        Self::new(alphas)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    /// Covariance eigenvalues `lambda_k = 1/(2 alpha_k)`.
    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Largest stationary standard deviation, `sqrt(max_k lambda_k)`.
    pub fn sigma_max(&self) -> f64 {
        self.lambdas.iter().cloned().fold(0.0, f64::max).sqrt()
    }

    /// Stationary Gaussian density of `mu` at `x` (finite truncation).
    pub fn mu_density(&self, x: &[f64]) -> f64 {
        let mut log_p = 0.0;
        for (xi, l) in x.iter().zip(&self.lambdas) {
            log_p += -xi * xi / (2.0 * l) - 0.5 * (2.0 * std::f64::consts::PI * l).ln();
        }
        log_p.exp()
    }

    /// One i.i.d. draw from `mu`: independent coordinates `N(0, lambda_k)`.
    pub fn sample_mu_into(&self, rng: &mut impl Rng, out: &mut [f64]) {
        for (o, l) in out.iter_mut().zip(&self.lambdas) {
            let z: f64 = rng.sample(StandardNormal);
            *o = z * l.sqrt();
        }
    }

    /// `count` i.i.d. draws from `mu`.
    pub fn sample_mu(&self, rng: &mut impl Rng, count: usize) -> Vec<Vec<f64>> {
        let mut out = vec![vec![0.0; self.dim]; count];
        for point in &mut out {
            self.sample_mu_into(rng, point);
        }
        out
    }

    /// White-noise functional `W_z(x) = sum_k <x,e_k><z,e_k>/sqrt(lambda_k)`.
    /// Under `mu` it has mean 0 and variance `|z|^2`.
    pub fn white_noise(&self, z: &[f64], x: &[f64]) -> Result<f64> {
        if z.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: z.len() });
        }
        if x.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, got: x.len() });
        }
        let mut s = 0.0;
        for k in 0..self.dim {
            s += x[k] * z[k] / self.lambdas[k].sqrt();
        }
        Ok(s)
    }

    /// Exact transition of `dX = -AX dt + dW` over a step `h`:
    /// `x_k -> e^{-alpha_k h} x_k + N(0, (1 - e^{-2 alpha_k h})/(2 alpha_k))`.
    /// The stationary law is `mu`.
    pub fn ou_step_exact(&self, x: &mut [f64], h: f64, rng: &mut impl Rng) {
        debug_assert_eq!(x.len(), self.dim);
        for k in 0..self.dim {
            let a = self.alphas[k];
            let decay = (-a * h).exp();
            let var = (1.0 - decay * decay) / (2.0 * a);
            let z: f64 = rng.sample(StandardNormal);
            x[k] = decay * x[k] + var.sqrt() * z;
        }
    }

    /// `Q^{1/2} z`.
    pub fn q_sqrt(&self, z: &[f64]) -> Vec<f64> {
        z.iter().zip(&self.lambdas).map(|(zi, l)| zi * l.sqrt()).collect()
    }
}
