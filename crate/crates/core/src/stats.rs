//! Summary statistics and distribution distances used by the Monte Carlo
//! estimators and the verification suite.

/// Sample mean and standard error of the mean.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, f64::INFINITY);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n as f64 - 1.0);
    (mean, (var / n as f64).sqrt())
}

pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
}

/// Kolmogorov-Smirnov distance between a sample and a CDF.
pub fn ks_distance(sample: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    sample.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = sample.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in sample.iter().enumerate() {
        let f = cdf(x);
        d = d.max((f - i as f64 / n).abs());
        d = d.max((f - (i as f64 + 1.0) / n).abs());
    }
    d
}

/// Dvoretzky-Kiefer-Wolfowitz band half-width at confidence `1 - delta`.
pub fn dkw_band(n: usize, delta: f64) -> f64 {
    ((2.0 / delta).ln() / (2.0 * n as f64)).sqrt()
}

/// Wilson score interval for a binomial proportion, `z` standard deviations.
pub fn wilson_interval(successes: usize, trials: usize, z: f64) -> (f64, f64) {
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * ((p * (1.0 - p) + z2 / (4.0 * n)) / n).sqrt() / denom;
    (center - half, center + half)
}

/// Energy distance between two point clouds, computed on deterministic
/// subsamples of at most `cap` points each:
/// `2 E|X-Y| - E|X-X'| - E|Y-Y'|`.
pub fn energy_distance(a: &[Vec<f64>], b: &[Vec<f64>], cap: usize) -> f64 {
    let stride_a = (a.len() / cap.max(1)).max(1);
    let stride_b = (b.len() / cap.max(1)).max(1);
    let xs: Vec<&Vec<f64>> = a.iter().step_by(stride_a).take(cap).collect();
    let ys: Vec<&Vec<f64>> = b.iter().step_by(stride_b).take(cap).collect();
    let dist = |p: &[f64], q: &[f64]| -> f64 {
        p.iter().zip(q).map(|(u, v)| (u - v).powi(2)).sum::<f64>().sqrt()
    };
    let mut axy = 0.0;
    for x in &xs {
        for y in &ys {
            axy += dist(x, y);
        }
    }
    axy /= (xs.len() * ys.len()) as f64;
    let mut axx = 0.0;
    for i in 0..xs.len() {
        for j in i + 1..xs.len() {
            axx += dist(xs[i], xs[j]);
        }
    }
    axx *= 2.0 / (xs.len() * xs.len()) as f64;
    let mut ayy = 0.0;
    for i in 0..ys.len() {
        for j in i + 1..ys.len() {
            ayy += dist(ys[i], ys[j]);
        }
    }
    ayy *= 2.0 / (ys.len() * ys.len()) as f64;
    2.0 * axy - axx - ayy
}

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// CDF of `N(0, var)` truncated to `[lo, hi]`.
pub fn truncated_normal_cdf(x: f64, var: f64, lo: f64, hi: f64) -> f64 {
    let sd = var.sqrt();
    let a = normal_cdf(lo / sd);
    let b = normal_cdf(hi / sd);
    if x <= lo {
        0.0
    } else if x >= hi {
        1.0
    } else {
        (normal_cdf(x / sd) - a) / (b - a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_se_basics() {
        let (m, se) = mean_se(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-15);
        // sample variance 5/3, se = sqrt(5/12)
        assert!((se - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn ks_of_exact_uniform_grid_is_small() {
        let n = 1000;
        let mut xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_distance(&mut xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.5 / n as f64 + 1e-12);
    }

    #[test]
    fn normal_cdf_symmetry() {
        assert!((normal_cdf(0.0) - 0.5).abs() < 1e-15);
        assert!((normal_cdf(1.0) + normal_cdf(-1.0) - 1.0).abs() < 1e-15);
        assert!((normal_cdf(1.0) - 0.8413447460685429).abs() < 1e-12);
    }
}
