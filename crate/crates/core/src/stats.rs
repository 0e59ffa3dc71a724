//! Moments, regressions and plain Monte Carlo.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::{Error, Result, RngStream};

/// Mean, unbiased variance and standard error of the mean.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SampleStats {
    pub n: usize,
    pub mean: f64,
    pub variance: f64,
    pub std_error: f64,
}

impl SampleStats {
    /// Welford accumulation. A single sample has zero variance.
    pub fn from_slice(xs: &[f64]) -> Result<Self> {
        let mut acc = Accumulator::default();
        xs.iter().for_each(|&x| acc.push(x));
        acc.stats()
    }
}

/// Streaming Welford accumulator.
#[derive(Clone, Copy, Debug, Default)]
pub struct Accumulator {
    n: usize,
    mean: f64,
    m2: f64,
}

impl Accumulator {
    #[inline]
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    pub fn stats(&self) -> Result<SampleStats> {
        if self.n == 0 {
            return Err(Error::argument("no samples"));
        }
        let variance = if self.n > 1 {
            (self.m2 / (self.n - 1) as f64).max(0.0)
        } else {
            0.0
        };
        Ok(SampleStats {
            n: self.n,
            mean: self.mean,
            variance,
            std_error: (variance / self.n as f64).sqrt(),
        })
    }
}

/// One draw from N(mu, sigma^2). `sigma == 0` returns `mu` without
/// consuming randomness.
pub fn gaussian(rng: &mut RngStream, mu: f64, sigma: f64) -> Result<f64> {
    if !(sigma >= 0.0) {
        return Err(Error::domain(format!("sigma must be >= 0, got {sigma}")));
    }
    if sigma == 0.0 {
        return Ok(mu);
    }
    let z: f64 = StandardNormal.sample(rng);
    Ok(mu + sigma * z)
}

#[inline]
pub(crate) fn standard_normal(rng: &mut RngStream) -> f64 {
    StandardNormal.sample(rng)
}

/// Ordinary least squares line.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_stderr: f64,
    pub n: usize,
}

pub fn linear_fit(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::argument("x and y lengths differ"));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Fit(format!("need at least 2 points, got {n}")));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let sxx: f64 = x.iter().map(|&a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Fit("x values are all equal".into()));
    }
    let sxy: f64 = x.iter().zip(y).map(|(&a, &b)| (a - mx) * (b - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let slope_stderr = if n > 2 {
        let ssr: f64 = x
            .iter()
            .zip(y)
            .map(|(&a, &b)| (b - intercept - slope * a).powi(2))
            .sum();
        (ssr / (nf - 2.0) / sxx).sqrt()
    } else {
        0.0
    };
    Ok(LineFit {
        slope,
        intercept,
        slope_stderr,
        n,
    })
}

/// Exponent and its standard error from least squares on `ln y` vs `ln x`.
///
/// Log-log least squares is biased for noisy tails (it weights every
/// decade equally and ignores the count statistics); it is used here only
/// to read off qualitative scaling exponents.
pub fn fit_power_law(x: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    if x.len() != y.len() {
        return Err(Error::argument("x and y lengths differ"));
    }
    if x.len() < 3 {
        return Err(Error::argument(format!(
            "power-law fit needs at least 3 points, got {}",
            x.len()
        )));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::domain("power-law fit requires strictly positive data"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok((fit.slope, fit.slope_stderr))
}

/// Scaling of the error of the mean with sample size.
#[derive(Clone, Debug, Serialize)]
pub struct CltScan {
    /// `(n, empirical standard deviation of the n-sample mean)`.
    pub points: Vec<(usize, f64)>,
    /// Log-log slope of std error vs n; `None` when a fit is impossible
    /// (single n, or zero spread).
    pub slope: Option<f64>,
    pub slope_stderr: Option<f64>,
}

/// For each `n`, draw `replicas` means of `n` samples from `dist` and
/// report the spread of those means.
pub fn clt_scaling<D: Distribution<f64>>(
    rng: &mut RngStream,
    dist: &D,
    n_values: &[usize],
    replicas: usize,
) -> Result<CltScan> {
    if n_values.is_empty() {
        return Err(Error::argument("n_values must be nonempty"));
    }
    if let Some(&bad) = n_values.iter().find(|&&n| n < 2) {
        return Err(Error::argument(format!("each n must be >= 2, got {bad}")));
    }
    if replicas < 2 {
        return Err(Error::argument("replicas must be >= 2"));
    }
    let mut points = Vec::with_capacity(n_values.len());
    for &n in n_values {
        let mut acc = Accumulator::default();
        for _ in 0..replicas {
            let mut sum = 0.0;
            for _ in 0..n {
                sum += dist.sample(rng);
            }
            acc.push(sum / n as f64);
        }
        points.push((n, acc.stats()?.variance.sqrt()));
    }
    let (slope, slope_stderr) = if points.len() >= 2 && points.iter().all(|p| p.1 > 0.0) {
        let lx: Vec<f64> = points.iter().map(|p| (p.0 as f64).ln()).collect();
        let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
        let fit = linear_fit(&lx, &ly)?;
        (Some(fit.slope), Some(fit.slope_stderr))
    } else {
        (None, None)
    };
    Ok(CltScan {
        points,
        slope,
        slope_stderr,
    })
}

/// Plain Monte Carlo estimate of the integral of `f` over `[0,1]^dim`.
pub fn mc_integrate<F>(rng: &mut RngStream, f: F, dim: usize, samples: usize) -> Result<SampleStats>
where
    F: Fn(&[f64]) -> f64,
{
    if dim < 1 {
        return Err(Error::argument("dim must be >= 1"));
    }
    if samples < 2 {
        return Err(Error::argument("samples must be >= 2"));
    }
    let mut point = vec![0.0; dim];
    let mut acc = Accumulator::default();
    for _ in 0..samples {
        point.iter_mut().for_each(|p| *p = rng.uniform());
        acc.push(f(&point));
    }
    acc.stats()
}

/// Sample skewness `g1 = m3 / m2^{3/2}`.
pub fn skewness(xs: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    if m2 == 0.0 {
        0.0
    } else {
        m3 / m2.powf(1.5)
    }
}

/// Median of a copy of `xs` (mean of the two central values for even length).
pub fn median(xs: &[f64]) -> Option<f64> {
    if xs.is_empty() {
        return None;
    }
    let mut v = xs.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let m = v.len() / 2;
    Some(if v.len() % 2 == 0 {
        0.5 * (v[m - 1] + v[m])
    } else {
        v[m]
    })
}

/// Integrated autocorrelation time `tau = 1/2 + sum_t rho(t)` with Sokal's
/// self-consistent window (stop at the first `W >= c * tau(W)`, c = 6).
pub fn integrated_autocorrelation_time(series: &[f64]) -> f64 {
    let n = series.len();
    if n < 4 {
        return 0.5;
    }
    let mean = series.iter().sum::<f64>() / n as f64;
    let c0 = series.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n as f64;
    if c0 == 0.0 {
        return 0.5;
    }
    let mut tau = 0.5;
    for lag in 1..n / 2 {
        let c: f64 = series[..n - lag]
            .iter()
            .zip(&series[lag..])
            .map(|(a, b)| (a - mean) * (b - mean))
            .sum::<f64>()
            / n as f64;
        tau += c / c0;
        if lag as f64 >= 6.0 * tau {
            break;
        }
    }
    tau.max(0.5)
}

/// Spearman rank correlation (average ranks for ties).
pub fn spearman(x: &[f64], y: &[f64]) -> f64 {
    fn ranks(v: &[f64]) -> Vec<f64> {
        let mut idx: Vec<usize> = (0..v.len()).collect();
        idx.sort_by(|&a, &b| v[a].total_cmp(&v[b]));
        let mut r = vec![0.0; v.len()];
        let mut i = 0;
        while i < idx.len() {
            let mut j = i;
            while j + 1 < idx.len() && v[idx[j + 1]] == v[idx[i]] {
                j += 1;
            }
            let avg = (i + j) as f64 / 2.0 + 1.0;
            for &k in &idx[i..=j] {
                r[k] = avg;
            }
            i = j + 1;
        }
        r
    }
    let (rx, ry) = (ranks(x), ranks(y));
    let n = x.len() as f64;
    let (mx, my) = (rx.iter().sum::<f64>() / n, ry.iter().sum::<f64>() / n);
    let cov: f64 = rx.iter().zip(&ry).map(|(a, b)| (a - mx) * (b - my)).sum();
    let vx: f64 = rx.iter().map(|a| (a - mx).powi(2)).sum();
    let vy: f64 = ry.iter().map(|b| (b - my).powi(2)).sum();
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx * vy).sqrt()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_distr::Uniform;

    #[test]
    fn gaussian_zero_sigma_is_degenerate() {
        let mut rng = RngStream::new(0, 0);
        assert_eq!(gaussian(&mut rng, 3.0, 0.0).unwrap(), 3.0);
    }

    #[test]
    fn gaussian_negative_sigma_is_domain_error() {
        let mut rng = RngStream::new(0, 0);
        assert!(matches!(gaussian(&mut rng, 0.0, -1.0), Err(Error::Domain(_))));
        assert!(matches!(gaussian(&mut rng, 0.0, f64::NAN), Err(Error::Domain(_))));
    }

    #[test]
    fn gaussian_moments_million_draws() {
        let mut rng = RngStream::new(11, 0);
        let xs: Vec<f64> = (0..1_000_000)
            .map(|_| gaussian(&mut rng, 0.0, 1.0).unwrap())
            .collect();
        let s = SampleStats::from_slice(&xs).unwrap();
        assert!(s.mean.abs() < 0.004, "mean {}", s.mean);
        assert!((s.variance - 1.0).abs() < 0.01, "var {}", s.variance);
    }

    #[test]
    fn clt_slope_is_minus_half() {
        let mut rng = RngStream::new(3, 0);
        let scan = clt_scaling(&mut rng, &StandardNormal, &[10, 100, 1000], 10_000).unwrap();
        let slope = scan.slope.unwrap();
        assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn clt_constant_input_has_zero_error() {
        struct Constant;
        impl Distribution<f64> for Constant {
            fn sample<R: rand::Rng + ?Sized>(&self, _: &mut R) -> f64 {
                4.0
            }
        }
        let mut rng = RngStream::new(3, 0);
        let scan = clt_scaling(&mut rng, &Constant, &[4], 100).unwrap();
        assert_eq!(scan.points[0].1, 0.0);
        assert!(scan.slope.is_none());
    }

    #[test]
    fn clt_uniform_pair_mean() {
        let mut rng = RngStream::new(8, 0);
        let u = Uniform::new(0.0, 1.0).unwrap();
        let scan = clt_scaling(&mut rng, &u, &[2], 100_000).unwrap();
        let expected = (1.0f64 / 12.0 / 2.0).sqrt();
        assert!((scan.points[0].1 - expected).abs() < 0.005);
    }

    #[test]
    fn clt_rejects_bad_n() {
        let mut rng = RngStream::new(8, 0);
        assert!(clt_scaling(&mut rng, &StandardNormal, &[], 10).is_err());
        assert!(clt_scaling(&mut rng, &StandardNormal, &[1], 10).is_err());
    }

    #[test]
    fn power_law_exact() {
        let x = [1.0, 2.0, 5.0, 10.0];
        let y2: Vec<f64> = x.iter().map(|v| v * v).collect();
        let (e, se) = fit_power_law(&x, &y2).unwrap();
        assert!((e - 2.0).abs() < 1e-12);
        assert!(se < 1e-12);
        let yinv: Vec<f64> = x.iter().map(|v| 5.0 / v).collect();
        let (e, _) = fit_power_law(&x, &yinv).unwrap();
        assert!((e + 1.0).abs() < 1e-12);
    }

    #[test]
    fn power_law_noisy() {
        let mut rng = RngStream::new(21, 0);
        let x: Vec<f64> = (1..=50).map(|i| i as f64).collect();
        let y: Vec<f64> = x
            .iter()
            .map(|v| v.powf(1.5) * (1.0 + 0.01 * standard_normal(&mut rng)))
            .collect();
        let (e, _) = fit_power_law(&x, &y).unwrap();
        assert!((e - 1.5).abs() < 0.05);
    }

    #[test]
    fn power_law_rejects_nonpositive() {
        assert!(matches!(
            fit_power_law(&[1.0, 2.0, 0.0], &[1.0, 2.0, 3.0]),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            fit_power_law(&[1.0, 2.0], &[1.0, 2.0]),
            Err(Error::Argument(_))
        ));
    }

    #[test]
    fn mc_constant_integrand() {
        let mut rng = RngStream::new(1, 0);
        for dim in [1, 5, 12] {
            let s = mc_integrate(&mut rng, |_| 1.0, dim, 1000).unwrap();
            assert_eq!(s.mean, 1.0);
            assert_eq!(s.variance, 0.0);
        }
    }

    #[test]
    fn mc_linear_integrand() {
        let mut rng = RngStream::new(2, 0);
        let s = mc_integrate(&mut rng, |x| x[0], 1, 100_000).unwrap();
        assert!((s.mean - 0.5).abs() < 3.0 * s.std_error);
    }

    #[test]
    fn mc_product_integrand_ten_dims() {
        let mut rng = RngStream::new(4, 0);
        let s = mc_integrate(&mut rng, |x| x.iter().product(), 10, 1_000_000).unwrap();
        let exact = 0.5f64.powi(10);
        assert!((s.mean - exact).abs() < 3.0 * s.std_error, "{s:?}");
    }

    #[test]
    fn autocorrelation_of_white_noise_is_half() {
        let mut rng = RngStream::new(4, 0);
        let xs: Vec<f64> = (0..20_000).map(|_| standard_normal(&mut rng)).collect();
        let tau = integrated_autocorrelation_time(&xs);
        assert!((tau - 0.5).abs() < 0.1, "tau {tau}");
    }

    #[test]
    fn autocorrelation_of_ar1() {
        // AR(1) with phi: tau_int = (1 + phi) / (2 (1 - phi)).
        let phi: f64 = 0.8;
        let mut rng = RngStream::new(6, 0);
        let mut x = 0.0;
        let xs: Vec<f64> = (0..200_000)
            .map(|_| {
                x = phi * x + standard_normal(&mut rng);
                x
            })
            .collect();
        let tau = integrated_autocorrelation_time(&xs);
        let exact = (1.0 + phi) / (2.0 * (1.0 - phi));
        assert!((tau - exact).abs() / exact < 0.1, "tau {tau} vs {exact}");
    }

    #[test]
    fn spearman_extremes() {
        let x = [1.0, 2.0, 3.0, 4.0];
        assert!((spearman(&x, &[10.0, 20.0, 30.0, 40.0]) - 1.0).abs() < 1e-12);
        assert!((spearman(&x, &[4.0, 3.0, 2.0, 1.0]) + 1.0).abs() < 1e-12);
    }
}
