//! Thin-shell surface integrals, the co-area identity, the pushforward
//! density of `g` under `mu`, and the integrability probes behind them.
//!
//! `shell_integral` realizes `int_{Sigma_r} f dsigma_{mu_r} = alpha_f'(r)`,
//! the derivative in `r` of `alpha_f(r) = int_{g <= r} f dmu`, either by the
//! defining thin-shell average (Monte Carlo over `mu`) or, in dimensions 1
//! and 2, by exact level-set quadrature. The Gaussian surface measure used in
//! the integration-by-parts boundary terms is `|Dg| dsigma_{mu_1}`.

use crate::body::Functional;
use crate::error::{Error, Result};
use crate::quad::gauss_legendre;
use crate::report::ResidualReport;
use crate::rng::{substream, Domain};
use crate::spectral::SpectralModel;
use crate::stats::mean_se;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EstimatorKind {
    MonteCarlo,
    Quadrature,
}

#[derive(Clone, Copy, Debug, Serialize, Deserialize)]
pub struct ShellEstimator {
    pub level: f64,
    pub bandwidth: f64,
    pub samples: usize,
    pub kind: EstimatorKind,
}

impl ShellEstimator {
    pub fn monte_carlo(level: f64, bandwidth: f64, samples: usize) -> Result<Self> {
        if bandwidth <= 0.0 {
            return Err(Error::InvalidParameter("shell bandwidth must be positive".into()));
        }
        Ok(Self { level, bandwidth, samples, kind: EstimatorKind::MonteCarlo })
    }

    pub fn quadrature(level: f64) -> Self {
        Self { level, bandwidth: 0.0, samples: 0, kind: EstimatorKind::Quadrature }
    }
}

/// Shell integral estimate with its statistical error (0 for quadrature).
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ShellValue {
    pub value: f64,
    pub std_error: f64,
}

/// `int_{Sigma_r} f dsigma_{mu_r}`, by thin-shell Monte Carlo
/// `(1/2h) mu(f ; r-h <= g <= r+h)` or by level-set quadrature (dim <= 2).
pub fn shell_integral(
    model: &SpectralModel,
    g: &dyn Functional,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    est: &ShellEstimator,
    seed: u64,
) -> Result<ShellValue> {
    match est.kind {
        EstimatorKind::MonteCarlo => {
            let n = est.samples;
            let h = est.bandwidth;
            let r = est.level;
            let batch = 8192;
            let batches = n.div_ceil(batch);
            let sums: Vec<(f64, f64, usize, usize)> = (0..batches)
                .into_par_iter()
                .map(|bi| {
                    let mut rng = substream(Domain::Shell, seed, bi as u64, 0);
                    let count = batch.min(n - bi * batch);
                    let mut x = vec![0.0; model.dim()];
                    let mut s = 0.0;
                    let mut s2 = 0.0;
                    let mut hits = 0usize;
                    for _ in 0..count {
                        model.sample_mu_into(&mut rng, &mut x);
                        let gv = g.value(&x);
                        let v = if (gv - r).abs() <= h {
                            hits += 1;
                            f(&x) / (2.0 * h)
                        } else {
                            0.0
                        };
                        s += v;
                        s2 += v * v;
                    }
                    (s, s2, hits, count)
                })
                .collect();
            let (sum, sum2, hits, total) = sums.iter().fold(
                (0.0, 0.0, 0usize, 0usize),
                |(a, b, c, d), (s, s2, h2, n2)| (a + s, b + s2, c + h2, d + n2),
            );
            if hits == 0 {
                return Err(Error::EmptyShell { level: r, bandwidth: h });
            }
            let nt = total as f64;
            let mean = sum / nt;
            let var = (sum2 / nt - mean * mean).max(0.0) / (nt - 1.0);
            Ok(ShellValue { value: mean, std_error: var.sqrt() })
        }
        EstimatorKind::Quadrature => {
            let value = shell_quadrature(model, g, f, est.level)?;
            Ok(ShellValue { value, std_error: 0.0 })
        }
    }
}

/// Exact level-set form of `alpha_f'(r)`:
/// `sum_{g(y)=r} f(y) p(y) / |g'(y)|` in 1D, and the line integral
/// `oint f p / |Dg| dH` over the level curve in 2D.
pub fn shell_quadrature(
    model: &SpectralModel,
    g: &dyn Functional,
    f: &dyn Fn(&[f64]) -> f64,
    r: f64,
) -> Result<f64> {
    match model.dim() {
        1 => {
            let b = 12.0 * model.sigma_max();
            let roots = level_roots_1d(g, r, b);
            if roots.is_empty() {
                return Err(Error::EmptyShell { level: r, bandwidth: 0.0 });
            }
            let mut total = 0.0;
            for y in roots {
                let grad = g.grad(&[y])[0].abs();
                if grad < 1e-12 {
                    return Err(Error::DegenerateGradient { norm: grad });
                }
                total += f(&[y]) * model.mu_density(&[y]) / grad;
            }
            Ok(total)
        }
        2 => {
            let (tn, tw) = gauss_legendre(192);
            let mut total = 0.0;
            for (t, wt) in tn.iter().zip(&tw) {
                let theta = std::f64::consts::PI * (t + 1.0);
                let dir = [theta.cos(), theta.sin()];
                let rad = match ray_level(g, &dir, r) {
                    Some(v) => v,
                    None => continue,
                };
                let p = [rad * dir[0], rad * dir[1]];
                let grad = g.grad(&p);
                let gn = (grad[0] * grad[0] + grad[1] * grad[1]).sqrt();
                if gn < 1e-12 {
                    return Err(Error::DegenerateGradient { norm: gn });
                }
                let e_t = [-dir[1], dir[0]];
                let g_r = grad[0] * dir[0] + grad[1] * dir[1];
                let g_t = grad[0] * e_t[0] + grad[1] * e_t[1];
                let rp = -rad * g_t / g_r;
                let dh = (rp * rp + rad * rad).sqrt();
                total += wt * std::f64::consts::PI * f(&p) * model.mu_density(&p) * dh / gn;
            }
            Ok(total)
        }
        d => Err(Error::DimensionMismatch { expected: 2, got: d }),
    }
}

/// All roots of `g(x) = r` on `[-b, b]` (sign-change scan plus bisection).
fn level_roots_1d(g: &dyn Functional, r: f64, b: f64) -> Vec<f64> {
    let n = 8192;
    let mut roots = Vec::new();
    let mut prev_x = -b;
    let mut prev_v = g.value(&[prev_x]) - r;
    for i in 1..=n {
        let x = -b + 2.0 * b * i as f64 / n as f64;
        let v = g.value(&[x]) - r;
        if prev_v == 0.0 {
            roots.push(prev_x);
        } else if prev_v * v < 0.0 {
            let mut lo = prev_x;
            let mut hi = x;
            let mut flo = prev_v;
            for _ in 0..80 {
                let mid = 0.5 * (lo + hi);
                let fm = g.value(&[mid]) - r;
                if flo * fm <= 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        prev_x = x;
        prev_v = v;
    }
    roots
}

/// Radius where `g(rad * dir) = r`, if the ray crosses that level.
fn ray_level(g: &dyn Functional, dir: &[f64], r: f64) -> Option<f64> {
    let scaled = |s: f64| -> Vec<f64> { dir.iter().map(|d| d * s).collect() };
    if g.value(&scaled(0.0)) >= r {
        return None;
    }
    let mut hi = 1.0;
    while g.value(&scaled(hi)) < r {
        hi *= 2.0;
        if hi > 1e9 {
            return None;
        }
    }
    let mut lo = 0.0;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if g.value(&scaled(mid)) < r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Some(0.5 * (lo + hi))
}

/// Co-area check: compares `int f dmu` with
/// `int_0^{r_max} [int_{Sigma_r} f dsigma_{mu_r}] dr` (composite trapezoid
/// over `shells` levels) plus a tail bound `sup|f| mu(g > r_max)`.
#[allow(clippy::too_many_arguments)]
pub fn coarea_check(
    model: &SpectralModel,
    g: &dyn Functional,
    f: &(dyn Fn(&[f64]) -> f64 + Sync),
    sup_f: f64,
    r_max: f64,
    shells: usize,
    kind: EstimatorKind,
    mc_samples: usize,
    seed: u64,
) -> Result<ResidualReport> {
    let dr = r_max / shells as f64;
    let mut shell_vals = Vec::with_capacity(shells + 1);
    let mut shell_se2 = 0.0;
    let mut mass_inside = 0.0;
    for j in 0..=shells {
        let r = (j as f64 * dr).max(1e-9);
        let est = match kind {
            EstimatorKind::Quadrature => ShellEstimator::quadrature(r),
            EstimatorKind::MonteCarlo => {
                ShellEstimator::monte_carlo(r, (dr / 2.0).min(0.02), mc_samples)?
            }
        };
        let sv = match shell_integral(model, g, f, &est, seed.wrapping_add(j as u64)) {
            Ok(v) => v,
            Err(Error::EmptyShell { .. }) => ShellValue { value: 0.0, std_error: 0.0 },
            Err(e) => return Err(e),
        };
        let w = if j == 0 || j == shells { 0.5 } else { 1.0 };
        shell_vals.push(sv.value * w * dr);
        shell_se2 += (sv.std_error * w * dr).powi(2);
        // track the mass integral for the tail bound
        let mass = match kind {
            EstimatorKind::Quadrature => shell_quadrature(model, g, &|_| 1.0, r)?,
            EstimatorKind::MonteCarlo => {
                let est1 = ShellEstimator::monte_carlo(r, (dr / 2.0).min(0.02), mc_samples)?;
                match shell_integral(model, g, &|_| 1.0, &est1, seed.wrapping_add(j as u64)) {
                    Ok(v) => v.value,
                    Err(Error::EmptyShell { .. }) => 0.0,
                    Err(e) => return Err(e),
                }
            }
        };
        mass_inside += mass * w * dr;
    }
    let rhs: f64 = shell_vals.iter().sum();
    let tail_bound = sup_f * (1.0 - mass_inside).max(0.0);

    let (lhs, lhs_se) = match kind {
        EstimatorKind::Quadrature => (crate::measures::integrate_mu(model, &|x| f(x))?, 0.0),
        EstimatorKind::MonteCarlo => {
            let batches = mc_samples.div_ceil(8192);
            let vals: Vec<f64> = (0..batches)
                .into_par_iter()
                .flat_map_iter(|bi| {
                    let mut rng = substream(Domain::MuSampling, seed, bi as u64, 1);
                    let count = 8192.min(mc_samples - bi * 8192);
                    let mut out = Vec::with_capacity(count);
                    let mut x = vec![0.0; model.dim()];
                    for _ in 0..count {
                        model.sample_mu_into(&mut rng, &mut x);
                        out.push(f(&x));
                    }
                    out
                })
                .collect();
            mean_se(&vals)
        }
    };
    let se = (lhs_se * lhs_se + shell_se2).sqrt();
    let tol = 0.01 * lhs.abs().max(1e-12) + tail_bound;
    Ok(ResidualReport::new("coarea", "Eq. A.8", lhs, rhs, se, tol)
        .with_param("r_max", r_max)
        .with_param("shells", shells)
        .with_param("tail_bound", tail_bound)
        .with_param("seed", seed))
}

/// The divergence-form weight of the pushforward density: for a smooth bump
/// `phi'` localized at `r`,
/// `int phi'(g) dmu = int phi(g) Psi dmu` with
/// `Psi = -Tr[Q D^2 g]/|Q^{1/2}Dg|^2 + 2 <D^2g Q Dg, Q Dg>/|Q^{1/2}Dg|^4
///        + <x, Dg>/|Q^{1/2}Dg|^2`.
pub fn pushforward_weight(model: &SpectralModel, g: &dyn Functional, x: &[f64]) -> f64 {
    let n = model.dim();
    let lam = model.lambdas();
    let grad = g.grad(x);
    let hess = g.hess(x);
    let mut qnorm2 = 0.0;
    let mut qdg = vec![0.0; n];
    for k in 0..n {
        qnorm2 += lam[k] * grad[k] * grad[k];
        qdg[k] = lam[k] * grad[k];
    }
    let mut tr_qh = 0.0;
    for k in 0..n {
        tr_qh += lam[k] * hess[k * n + k];
    }
    let mut hqq = 0.0;
    for i in 0..n {
        let mut hv = 0.0;
        for j in 0..n {
            hv += hess[i * n + j] * qdg[j];
        }
        hqq += hv * qdg[i];
    }
    let xdg: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum();
    -tr_qh / qnorm2 + 2.0 * hqq / (qnorm2 * qnorm2) + xdg / qnorm2
}

/// Integrated cubic B-spline step: 0 below `-2`, 1 above `2`, C^2 monotone.
fn bspline_step(u: f64) -> f64 {
    if u <= -2.0 {
        0.0
    } else if u <= -1.0 {
        (2.0 + u).powi(4) / 24.0
    } else if u <= 0.0 {
        1.0 / 24.0 + (4.0 * u - 2.0 * u.powi(3) - 0.75 * u.powi(4) + 2.75) / 6.0
    } else if u <= 1.0 {
        0.5 + (4.0 * u - 2.0 * u.powi(3) + 0.75 * u.powi(4)) / 6.0
    } else if u <= 2.0 {
        1.0 - (2.0 - u).powi(4) / 24.0
    } else {
        1.0
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct DensityEstimate {
    pub value: f64,
    pub std_error: f64,
    pub level: f64,
    pub bandwidth: f64,
}

/// Density of `g_# mu` at `r`, Monte Carlo estimate of
/// `E[ S((g(X) - r)/w) Psi(X) ]` with `S` the integrated cubic B-spline of
/// half-width `w = 2 * h_shell` (total width `4 h_shell`). Runs the
/// Hypothesis A.1 probe first and refuses divergent integrands.
pub fn pushforward_density(
    model: &SpectralModel,
    g: &dyn Functional,
    r: f64,
    h_shell: f64,
    samples: usize,
    seed: u64,
) -> Result<DensityEstimate> {
    // gate on the three hypothesis integrals (the auxiliary J1 probe is
    // informative for radial g only)
    let probe = hypothesis_integrals(model, g, samples / 64, seed ^ 0x9e37)?;
    if probe.divergent_flags[..3].iter().any(|f| *f) {
        return Err(Error::HypothesisViolated(format!(
            "integrability probe diverged: {:?}",
            probe.flags()
        )));
    }
    let w = 2.0 * h_shell;
    let batch = 8192;
    let batches = samples.div_ceil(batch);
    let sums: Vec<(f64, f64, usize)> = (0..batches)
        .into_par_iter()
        .map(|bi| {
            let mut rng = substream(Domain::Shell, seed, bi as u64, 7);
            let count = batch.min(samples - bi * batch);
            let mut x = vec![0.0; model.dim()];
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                model.sample_mu_into(&mut rng, &mut x);
                let u = (g.value(&x) - r) / w;
                if u <= -2.0 {
                    continue;
                }
                let v = bspline_step(u) * pushforward_weight(model, g, &x);
                s += v;
                s2 += v * v;
            }
            (s, s2, count)
        })
        .collect();
    let (sum, sum2, total) =
        sums.iter().fold((0.0, 0.0, 0usize), |(a, b, c), (s, s2, n2)| (a + s, b + s2, c + n2));
    let nt = total as f64;
    let mean = sum / nt;
    let var = (sum2 / nt - mean * mean).max(0.0) / (nt - 1.0);
    Ok(DensityEstimate { value: mean, std_error: var.sqrt(), level: r, bandwidth: w })
}

/// Monte Carlo estimates of the absolute integrands of Hypothesis A.1 plus
/// the auxiliary `J_1 = int |Q^{1/2}x|^{-2} dmu`, across four 4x sample
/// refinements. An integral is flagged divergent when its estimates swing by
/// more than a factor of 2 across refinements (or fail to be finite).
#[derive(Clone, Debug, Serialize)]
pub struct HypothesisEstimates {
    /// `estimates[k]` holds the 4 refinement values of integral k
    /// (I1, I2, I3, J1).
    pub estimates: [[f64; 4]; 4],
    pub sample_sizes: [usize; 4],
    pub divergent_flags: [bool; 4],
    pub divergent: bool,
}

impl HypothesisEstimates {
    pub fn flags(&self) -> Vec<&'static str> {
        let names = ["I1", "I2", "I3", "J1"];
        names
            .iter()
            .zip(&self.divergent_flags)
            .filter_map(|(n, f)| f.then_some(*n))
            .collect()
    }
}

pub fn hypothesis_integrals(
    model: &SpectralModel,
    g: &dyn Functional,
    base_samples: usize,
    seed: u64,
) -> Result<HypothesisEstimates> {
    let base = base_samples.max(500);
    let n = model.dim();
    let lam = model.lambdas();
    let mut estimates = [[0.0; 4]; 4];
    let mut sizes = [0usize; 4];
    for (ri, mult) in [1usize, 4, 16, 64].into_iter().enumerate() {
        let count = base * mult;
        sizes[ri] = count;
        let batches = count.div_ceil(8192);
        let sums: Vec<[f64; 4]> = (0..batches)
            .into_par_iter()
            .map(|bi| {
                let mut rng = substream(Domain::Shell, seed, bi as u64, 100 + ri as u64);
                let cnt = 8192.min(count - bi * 8192);
                let mut x = vec![0.0; n];
                let mut acc = [0.0; 4];
                for _ in 0..cnt {
                    model.sample_mu_into(&mut rng, &mut x);
                    let grad = g.grad(&x);
                    let hess = g.hess(&x);
                    let mut qnorm2 = 0.0;
                    let mut qdg = vec![0.0; n];
                    for k in 0..n {
                        qnorm2 += lam[k] * grad[k] * grad[k];
                        qdg[k] = lam[k] * grad[k];
                    }
                    let mut tr_qh = 0.0;
                    for k in 0..n {
                        tr_qh += lam[k] * hess[k * n + k];
                    }
                    let mut hqq = 0.0;
                    for i in 0..n {
                        let mut hv = 0.0;
                        for j in 0..n {
                            hv += hess[i * n + j] * qdg[j];
                        }
                        hqq += hv * qdg[i];
                    }
                    let xdg: f64 = x.iter().zip(&grad).map(|(a, b)| a * b).sum();
                    acc[0] += (tr_qh / qnorm2).abs();
                    acc[1] += (hqq / (qnorm2 * qnorm2)).abs();
                    acc[2] += (xdg / qnorm2).abs();
                    let qx2: f64 = x.iter().zip(lam).map(|(xi, l)| l * xi * xi).sum();
                    acc[3] += 1.0 / qx2;
                }
                acc
            })
            .collect();
        for k in 0..4 {
            estimates[k][ri] = sums.iter().map(|a| a[k]).sum::<f64>() / count as f64;
        }
    }
    let mut flags = [false; 4];
    for k in 0..4 {
        let vals = &estimates[k];
        let finite = vals.iter().all(|v| v.is_finite());
        let vmax = vals.iter().cloned().fold(f64::MIN, f64::max);
        let vmin = vals.iter().cloned().fold(f64::MAX, f64::min);
        flags[k] = !finite || vmax / vmin.max(1e-300) > 2.0;
    }
    Ok(HypothesisEstimates {
        estimates,
        sample_sizes: sizes,
        divergent_flags: flags,
        divergent: flags.iter().any(|f| *f),
    })
}

/// Tabulated `sigma_{mu_r}(Sigma_r)` curve as CSV rows `(r, value, std_error)`.
pub fn shell_curve_csv(
    model: &SpectralModel,
    g: &dyn Functional,
    levels: &[f64],
    kind: EstimatorKind,
    bandwidth: f64,
    samples: usize,
    seed: u64,
    w: &mut impl std::io::Write,
) -> Result<()> {
    writeln!(w, "r,value,std_error").map_err(io_err)?;
    for (i, &r) in levels.iter().enumerate() {
        let est = match kind {
            EstimatorKind::Quadrature => ShellEstimator::quadrature(r),
            EstimatorKind::MonteCarlo => ShellEstimator::monte_carlo(r, bandwidth, samples)?,
        };
        let v = shell_integral(model, g, &|_| 1.0, &est, seed.wrapping_add(i as u64))?;
        writeln!(w, "{r},{},{}", v.value, v.std_error).map_err(io_err)?;
    }
    Ok(())
}

fn io_err(e: std::io::Error) -> Error {
    Error::InvalidParameter(format!("io error: {e}"))
}

/// Linear level functional `g(x) = x_0` (useful 1D probe: its pushforward is
/// the first marginal of `mu`).
pub struct CoordinateLevel;

impl Functional for CoordinateLevel {
    fn value(&self, x: &[f64]) -> f64 {
        x[0]
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; x.len()];
        g[0] = 1.0;
        g
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        vec![0.0; x.len() * x.len()]
    }
}

/// `g(x) = |x|^2` as a level functional on any dimension.
pub struct SquaredNorm;

impl Functional for SquaredNorm {
    fn value(&self, x: &[f64]) -> f64 {
        x.iter().map(|v| v * v).sum()
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        x.iter().map(|v| 2.0 * v).collect()
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        let n = x.len();
        let mut h = vec![0.0; n * n];
        for k in 0..n {
            h[k * n + k] = 2.0;
        }
        h
    }
}

impl Functional for crate::body::ConvexBody {
    fn value(&self, x: &[f64]) -> f64 {
        self.g(x)
    }
    fn grad(&self, x: &[f64]) -> Vec<f64> {
        self.g_grad(x)
    }
    fn hess(&self, x: &[f64]) -> Vec<f64> {
        self.g_hess(x)
    }
}
