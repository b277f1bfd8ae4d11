//! Time-stepping schemes.
//!
//! The penalized dynamics `dX + (AX + beta_eps(X)) dt = dW` is integrated by
//! splitting: an exact Ornstein-Uhlenbeck substep followed by the exact
//! proximal (implicit-Euler) resolvent of the penalty,
//! `y -> y + h/(h + eps) (Pi_K(y) - y)`. The proximal substep is
//! unconditionally stable, so the step size does not have to scale with eps.
//! The projected scheme `x -> Pi_K(OU step)` is the reference proxy for the
//! reflected dynamics.

use crate::body::ConvexBody;
use crate::error::Result;
use crate::rng::{substream, Domain};
use crate::spectral::SpectralModel;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use std::io::Write;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scheme {
    Penalized { eps: f64 },
    Projected,
}

/// Precomputed per-mode OU transition coefficients for a fixed step.
pub struct OuCoeffs {
    decay: Vec<f64>,
    noise_sd: Vec<f64>,
}

impl OuCoeffs {
    pub fn new(model: &SpectralModel, h: f64) -> Self {
        let decay: Vec<f64> = model.alphas().iter().map(|a| (-a * h).exp()).collect();
        let noise_sd = model
            .alphas()
            .iter()
            .zip(&decay)
            .map(|(a, d)| ((1.0 - d * d) / (2.0 * a)).sqrt())
            .collect();
        Self { decay, noise_sd }
    }

    pub fn step(&self, x: &mut [f64], rng: &mut impl Rng) {
        for k in 0..x.len() {
            let z: f64 = rng.sample(rand_distr::StandardNormal);
            x[k] = self.decay[k] * x[k] + self.noise_sd[k] * z;
        }
    }
}

/// Proximal substep for the Moreau penalty: the exact implicit-Euler
/// resolvent of `beta_eps`, `y -> y + h/(h+eps) (Pi_K(y) - y)`. Identity on K.
pub fn proximal_substep(body: &ConvexBody, eps: f64, h: f64, y: &mut [f64]) -> Result<()> {
    let p = body.project(y)?;
    if p.distance == 0.0 {
        return Ok(());
    }
    let w = h / (h + eps);
    for k in 0..y.len() {
        y[k] += w * (p.point[k] - y[k]);
    }
    Ok(())
}

/// One step of the penalized splitting scheme.
pub fn step_penalized(
    model: &SpectralModel,
    body: &ConvexBody,
    eps: f64,
    x: &[f64],
    h: f64,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let ou = OuCoeffs::new(model, h);
    let mut y = x.to_vec();
    ou.step(&mut y, rng);
    proximal_substep(body, eps, h, &mut y)?;
    Ok(y)
}

/// One step of the projected scheme: project the exact OU step back onto K.
pub fn step_projected(
    model: &SpectralModel,
    body: &ConvexBody,
    x: &[f64],
    h: f64,
    rng: &mut impl Rng,
) -> Result<Vec<f64>> {
    let ou = OuCoeffs::new(model, h);
    let mut y = x.to_vec();
    ou.step(&mut y, rng);
    Ok(body.project(&y)?.point)
}

/// A seeded ensemble of trajectories with a thinned storage grid.
#[derive(Clone, Debug)]
pub struct PathEnsemble {
    pub scheme: Scheme,
    pub step: f64,
    pub horizon: f64,
    pub paths: usize,
    pub seed: u64,
    pub time_grid: Vec<f64>,
    /// `states[path][time_index]` is the state at `time_grid[time_index]`.
    pub states: Vec<Vec<Vec<f64>>>,
}

/// Simulate `paths` independent trajectories from `x0` up to time `horizon`.
///
/// Each (path, step) pair draws from its own counter-based stream, so the
/// result is bit-identical for any thread count. States are stored every
/// `ceil(steps/1000)` steps unless `store_full` is set.
#[allow(clippy::too_many_arguments)]
pub fn simulate(
    model: &SpectralModel,
    body: &ConvexBody,
    scheme: Scheme,
    x0: &[f64],
    horizon: f64,
    h: f64,
    paths: usize,
    seed: u64,
    store_full: bool,
) -> Result<PathEnsemble> {
    let steps = (horizon / h).round().max(1.0) as usize;
    let stride = if store_full { 1 } else { steps.div_ceil(1000) };
    let ou = OuCoeffs::new(model, h);
    let stored: Vec<usize> = (0..=steps).filter(|s| s % stride == 0 || *s == steps).collect();
    let time_grid: Vec<f64> = stored.iter().map(|s| *s as f64 * h).collect();

    let results: Vec<Result<Vec<Vec<f64>>>> = (0..paths)
        .into_par_iter()
        .map(|p| {
            let mut x = x0.to_vec();
            let mut out = Vec::with_capacity(stored.len());
            let mut next_store = 0;
            if stored[next_store] == 0 {
                out.push(x.clone());
                next_store += 1;
            }
            for s in 0..steps {
                let mut rng = substream(Domain::PathStep, seed, p as u64, s as u64);
                ou.step(&mut x, &mut rng);
                match scheme {
                    Scheme::Penalized { eps } => {
                        proximal_substep(body, eps, h, &mut x).map_err(|e| {
                            crate::error::Error::InvalidParameter(format!(
                                "path {p}, step {s}: {e}"
                            ))
                        })?;
                    }
                    Scheme::Projected => {
                        x = body.project(&x).map_err(|e| {
                            crate::error::Error::InvalidParameter(format!(
                                "path {p}, step {s}: {e}"
                            ))
                        })?.point;
                    }
                }
                if next_store < stored.len() && stored[next_store] == s + 1 {
                    out.push(x.clone());
                    next_store += 1;
                }
            }
            Ok(out)
        })
        .collect();

    let mut states = Vec::with_capacity(paths);
    for r in results {
        states.push(r?);
    }
    Ok(PathEnsemble { scheme, step: h, horizon, paths, seed, time_grid, states })
}

impl PathEnsemble {
    /// Time-average of `f` over all stored states of all paths.
    pub fn state_average(&self, mut f: impl FnMut(&[f64]) -> f64) -> f64 {
        let mut sum = 0.0;
        let mut count = 0usize;
        for path in &self.states {
            for st in path {
                sum += f(st);
                count += 1;
            }
        }
        sum / count as f64
    }

    /// Columnar CSV: `path_id,t,x0,x1,...`.
    pub fn write_csv(&self, w: &mut impl Write) -> std::io::Result<()> {
        let dim = self.states.first().and_then(|p| p.first()).map_or(0, |s| s.len());
        write!(w, "path_id,t")?;
        for k in 0..dim {
            write!(w, ",x{k}")?;
        }
        writeln!(w)?;
        for (p, path) in self.states.iter().enumerate() {
            for (ti, st) in path.iter().enumerate() {
                write!(w, "{p},{}", self.time_grid[ti])?;
                for v in st {
                    write!(w, ",{v}")?;
                }
                writeln!(w)?;
            }
        }
        Ok(())
    }

    /// JSON manifest describing how the ensemble was produced.
    pub fn manifest(&self, model: &SpectralModel, body: &ConvexBody) -> serde_json::Value {
        json!({
            "scheme": self.scheme,
            "h": self.step,
            "horizon": self.horizon,
            "paths": self.paths,
            "seed": self.seed,
            "model": { "dim": model.dim(), "alphas": model.alphas() },
            "body": body.kind(),
            "stored_times": self.time_grid.len(),
        })
    }
}
