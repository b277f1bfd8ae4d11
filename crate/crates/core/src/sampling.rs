//! Samplers for the conditioned measure `nu` (rejection from `mu`) and the
//! penalized measures `nu_eps` (Metropolis-adjusted Langevin), with a
//! split-chain convergence diagnostic.

use crate::body::ConvexBody;
use crate::error::{Error, Result};
use crate::rng::{substream, Domain};
use crate::spectral::SpectralModel;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

const MIN_ACCEPT_RATE: f64 = 1e-3;
const RHAT_LIMIT: f64 = 1.05;

/// Exact sampling from `nu = mu(. | K)`: draw from `mu`, accept iff `g <= 1`.
/// Fails with `RejectionStarved` when the acceptance rate drops below 1e-3.
pub fn sample_nu_rejection(
    model: &SpectralModel,
    body: &ConvexBody,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let batch = 4096;
    let mut out = Vec::with_capacity(count);
    let mut trials = 0usize;
    let mut bi = 0u64;
    let mut x = vec![0.0; model.dim()];
    while out.len() < count {
        let mut rng = substream(Domain::Rejection, seed, bi, 0);
        bi += 1;
        for _ in 0..batch {
            model.sample_mu_into(&mut rng, &mut x);
            trials += 1;
            if body.contains(&x) {
                out.push(x.clone());
                if out.len() == count {
                    break;
                }
            }
        }
        if trials >= 100_000 && (out.len() as f64) < MIN_ACCEPT_RATE * trials as f64 {
            return Err(Error::RejectionStarved {
                rate: out.len() as f64 / trials as f64,
                min_rate: MIN_ACCEPT_RATE,
            });
        }
    }
    Ok(out)
}

/// Acceptance-rate estimate for `nu`-rejection (the `mu(K)` proportion) with
/// a Wilson interval at `z` standard scores.
pub fn mu_mass_mc(
    model: &SpectralModel,
    body: &ConvexBody,
    samples: usize,
    seed: u64,
    z: f64,
) -> (f64, (f64, f64)) {
    let batches = samples.div_ceil(8192);
    let hits: usize = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = substream(Domain::Rejection, seed, bi as u64, 1);
            let count = 8192.min(samples - bi as usize * 8192);
            let mut x = vec![0.0; model.dim()];
            let mut h = 0usize;
            for _ in 0..count {
                model.sample_mu_into(&mut rng, &mut x);
                if body.contains(&x) {
                    h += 1;
                }
            }
            h
        })
        .sum();
    let p = hits as f64 / samples as f64;
    (p, crate::stats::wilson_interval(hits, samples, z))
}

/// Samples from `nu_eps` together with the mixing diagnostic that accepted
/// them.
pub struct MalaOutput {
    pub samples: Vec<Vec<f64>>,
    pub split_rhat: f64,
    pub acceptance: f64,
    pub step_size: f64,
}

/// Metropolis-adjusted Langevin targeting
/// `nu_eps ~ exp(-sum x_k^2/(2 lambda_k) - d_K(x)^2/eps)`.
///
/// Runs 4 chains from overdispersed starts, adapts the step during burn-in
/// toward 57% acceptance, freezes it, and pools the chains after checking
/// the split-chain diagnostic (error above 1.05).
pub fn sample_nu_eps_mala(
    model: &SpectralModel,
    body: &ConvexBody,
    eps: f64,
    count: usize,
    seed: u64,
) -> Result<MalaOutput> {
    let chains = 4;
    let thin = 5;
    let per_chain = count.div_ceil(chains);
    let burn = (per_chain / 2).clamp(500, 20_000);
    let n = model.dim();
    let lambdas = model.lambdas().to_vec();

    let log_pi = |x: &[f64], d: f64| -> f64 {
        let mut s = -d * d / eps;
        for k in 0..n {
            s -= x[k] * x[k] / (2.0 * lambdas[k]);
        }
        s
    };

    let run_chain = |c: usize| -> Result<(Vec<Vec<f64>>, f64, f64)> {
        let mut rng = substream(Domain::Mala, seed, c as u64, 0);
        // overdispersed start: a mu draw pulled to K
        let mut x = vec![0.0; n];
        model.sample_mu_into(&mut rng, &mut x);
        x = body.project(&x)?.point;
        // the penalty contributes log-density curvature 2/eps, so the step
        // must resolve the eps scale or the boundary layer is never entered
        let lam_min = lambdas.iter().cloned().fold(f64::MAX, f64::min);
        let tau_max = lam_min.min(0.25 * eps);
        let mut tau = 0.1 * tau_max;
        let mut d = body.distance(&x)?;
        let mut lp = log_pi(&x, d);
        let mut grad = drift(model, body, eps, &x)?;
        let mut accepted = 0usize;
        let mut proposals = 0usize;
        let mut window_accepts = 0usize;
        let mut kept = Vec::with_capacity(per_chain);
        let total = burn + thin * per_chain;
        for it in 0..total {
            let mut y = vec![0.0; n];
            for k in 0..n {
                let z: f64 = rng.sample(StandardNormal);
                y[k] = x[k] + tau * grad[k] + (2.0 * tau).sqrt() * z;
            }
            let dy = body.distance(&y)?;
            let lpy = log_pi(&y, dy);
            let grad_y = drift(model, body, eps, &y)?;
            // q(x -> y) densities
            let mut fwd = 0.0;
            let mut bwd = 0.0;
            for k in 0..n {
                fwd -= (y[k] - x[k] - tau * grad[k]).powi(2) / (4.0 * tau);
                bwd -= (x[k] - y[k] - tau * grad_y[k]).powi(2) / (4.0 * tau);
            }
            let log_accept = lpy + bwd - lp - fwd;
            proposals += 1;
            if (rng.gen::<f64>()).ln() < log_accept {
                x = y;
                d = dy;
                lp = lpy;
                grad = grad_y;
                accepted += 1;
                window_accepts += 1;
            }
            if it < burn {
                // adapt on 50-step windows toward 57% acceptance, capped at
                // the smallest covariance scale; frozen after burn-in
                if (it + 1) % 50 == 0 {
                    let rate = window_accepts as f64 / 50.0;
                    tau = (tau * (0.4 * (rate - 0.574)).exp()).clamp(1e-8, tau_max);
                    window_accepts = 0;
                }
            } else if (it - burn) % thin == thin - 1 {
                kept.push(x.clone());
            }
        }
        let _ = d;
        Ok((kept, accepted as f64 / proposals as f64, tau))
    };

    let chain_results: Vec<Result<(Vec<Vec<f64>>, f64, f64)>> =
        (0..chains).into_par_iter().map(run_chain).collect();
    let mut all_chains = Vec::with_capacity(chains);
    let mut acc_sum = 0.0;
    let mut tau_sum = 0.0;
    for r in chain_results {
        let (kept, acc, tau) = r?;
        all_chains.push(kept);
        acc_sum += acc;
        tau_sum += tau;
    }

    // split-chain diagnostic over each coordinate and over g(x)
    let mut rhat_max: f64 = 0.0;
    for q in 0..=n {
        let summary = |x: &[f64]| if q < n { x[q] } else { body.g(x) };
        let rhat = split_rhat(&all_chains, &summary);
        rhat_max = rhat_max.max(rhat);
    }
    if rhat_max > RHAT_LIMIT {
        return Err(Error::ChainNotMixed { diagnostic: rhat_max, limit: RHAT_LIMIT });
    }
    let mut samples = Vec::with_capacity(count);
    'outer: loop {
        for c in &mut all_chains {
            match c.pop() {
                Some(s) => {
                    samples.push(s);
                    if samples.len() == count {
                        break 'outer;
                    }
                }
                None => break 'outer,
            }
        }
    }
    Ok(MalaOutput {
        samples,
        split_rhat: rhat_max,
        acceptance: acc_sum / chains as f64,
        step_size: tau_sum / chains as f64,
    })
}

fn drift(model: &SpectralModel, body: &ConvexBody, eps: f64, x: &[f64]) -> Result<Vec<f64>> {
    let p = body.project(x)?;
    let lambdas = model.lambdas();
    Ok((0..x.len())
        .map(|k| -x[k] / lambdas[k] - 2.0 * (x[k] - p.point[k]) / eps)
        .collect())
}

/// Split-chain potential scale reduction: each chain is halved, and the
/// between/within variance ratio is computed over the 2m half chains.
pub fn split_rhat(chains: &[Vec<Vec<f64>>], summary: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut halves: Vec<Vec<f64>> = Vec::with_capacity(chains.len() * 2);
    for c in chains {
        let vals: Vec<f64> = c.iter().map(|x| summary(x)).collect();
        let mid = vals.len() / 2;
        halves.push(vals[..mid].to_vec());
        halves.push(vals[mid..].to_vec());
    }
    let m = halves.len() as f64;
    let len = halves.iter().map(|h| h.len()).min().unwrap_or(0) as f64;
    if len < 4.0 {
        return f64::INFINITY;
    }
    let means: Vec<f64> = halves.iter().map(|h| h.iter().sum::<f64>() / h.len() as f64).collect();
    let grand = means.iter().sum::<f64>() / m;
    let b = len / (m - 1.0) * means.iter().map(|mu| (mu - grand).powi(2)).sum::<f64>();
    let w = halves
        .iter()
        .zip(&means)
        .map(|(h, mu)| {
            h.iter().map(|v| (v - mu).powi(2)).sum::<f64>() / (h.len() as f64 - 1.0)
        })
        .sum::<f64>()
        / m;
    if w <= 1e-300 {
        return 1.0;
    }
    (((len - 1.0) / len * w + b / len) / w).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures;

    #[test]
    fn rejection_matches_truncated_moments() {
        let model = SpectralModel::new(vec![1.0]).unwrap();
        let body = ConvexBody::ball(1, 1.0);
        let samples = sample_nu_rejection(&model, &body, 200_000, 71).unwrap();
        let m2: f64 =
            samples.iter().map(|x| x[0] * x[0]).sum::<f64>() / samples.len() as f64;
        let exact = measures::integrate_nu(&model, &body, &|x| x[0] * x[0]).unwrap();
        assert!((m2 - exact).abs() < 0.005, "{m2} vs {exact}");
        for s in &samples {
            assert!(body.contains(s));
        }
    }

    #[test]
    fn rejection_starves_on_tiny_bodies() {
        let model = SpectralModel::new(vec![1.0]).unwrap();
        let body = ConvexBody::ball(1, 1e-4);
        let err = sample_nu_rejection(&model, &body, 50_000, 72).unwrap_err();
        assert!(matches!(err, Error::RejectionStarved { .. }));
    }

    #[test]
    fn mu_mass_mc_brackets_quadrature() {
        let model = SpectralModel::new(vec![1.0, 4.0]).unwrap();
        let body = ConvexBody::ball(2, 1.0);
        let (p, (lo, hi)) = mu_mass_mc(&model, &body, 400_000, 73, 3.29);
        let exact = measures::mu_mass_k(&model, &body).unwrap();
        assert!(lo <= exact && exact <= hi, "{p} in [{lo},{hi}] vs {exact}");
    }

    #[test]
    fn mala_matches_quadrature_moments() {
        let model = SpectralModel::new(vec![1.0]).unwrap();
        let body = ConvexBody::ball(1, 1.0);
        let eps = 0.05;
        let out = sample_nu_eps_mala(&model, &body, eps, 120_000, 74).unwrap();
        assert!(out.split_rhat < 1.05);
        let m2: f64 =
            out.samples.iter().map(|x| x[0] * x[0]).sum::<f64>() / out.samples.len() as f64;
        let exact =
            measures::integrate_nu_eps(&model, &body, eps, &|x| x[0] * x[0]).unwrap();
        // correlated chain: allow a generous band
        assert!((m2 - exact).abs() < 0.01, "{m2} vs {exact}");
    }

    #[test]
    fn split_rhat_flags_disagreeing_chains() {
        let good: Vec<Vec<Vec<f64>>> = (0..4)
            .map(|c| (0..200).map(|i| vec![((i * 37 + c * 11) % 97) as f64 / 97.0]).collect())
            .collect();
        let r = split_rhat(&good, &|x| x[0]);
        assert!(r < 1.05, "{r}");
        let mut bad = good.clone();
        for v in bad[0].iter_mut() {
            v[0] += 10.0;
        }
        let r = split_rhat(&bad, &|x| x[0]);
        assert!(r > 1.5, "{r}");
    }
}
