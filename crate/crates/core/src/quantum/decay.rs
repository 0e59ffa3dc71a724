//! Exponential decay of an ensemble of unstable atoms.

use serde::Serialize;

use crate::{stats, Error, Result, RngStream};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayModel {
    /// Decay rate (inverse mean lifetime).
    pub rate_lambda: f64,
    pub n_atoms: usize,
}

impl DecayModel {
    pub fn new(rate_lambda: f64, n_atoms: usize) -> Result<Self> {
        if !(rate_lambda > 0.0) || !rate_lambda.is_finite() {
            return Err(Error::domain(format!("rate must be > 0, got {rate_lambda}")));
        }
        Ok(Self { rate_lambda, n_atoms })
    }

    /// Inverse-CDF sampling of `n_atoms` lifetimes.
    pub fn sample_lifetimes(&self, rng: &mut RngStream) -> Vec<f64> {
        (0..self.n_atoms)
            .map(|_| -rng.uniform_open0().ln() / self.rate_lambda)
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DecayRun {
    /// Bin edges `t_i = i * t_max / bins`, `i = 0..=bins`.
    pub times: Vec<f64>,
    /// Fraction of atoms still alive at each edge.
    pub survival: Vec<f64>,
    pub mean_lifetime: f64,
    /// Rate from least squares on `ln S(t)` vs `t`.
    pub fitted_rate: f64,
    /// Delta-method standard error of `fitted_rate` under multinomial
    /// counting noise (the survival points are strongly correlated, so the
    /// OLS residual error would be meaningless).
    pub fitted_rate_stderr: f64,
    #[serde(skip)]
    pub lifetimes: Vec<f64>,
}

pub fn decay_sample(model: &DecayModel, rng: &mut RngStream, t_max: f64, bins: usize) -> Result<DecayRun> {
    if !(t_max > 0.0) {
        return Err(Error::domain("t_max must be > 0"));
    }
    if bins < 2 {
        return Err(Error::argument("bins must be >= 2"));
    }
    if model.n_atoms == 0 {
        return Err(Error::argument("n_atoms must be >= 1"));
    }
    let lifetimes = model.sample_lifetimes(rng);
    let n = lifetimes.len() as f64;
    let width = t_max / bins as f64;

    // decayed[i] = number of lifetimes in [t_i, t_{i+1}); beyond t_max lumped.
    let mut decayed = vec![0usize; bins + 1];
    for &t in &lifetimes {
        let k = ((t / width) as usize).min(bins);
        decayed[k] += 1;
    }
    let times: Vec<f64> = (0..=bins).map(|i| i as f64 * width).collect();
    let mut survival = Vec::with_capacity(bins + 1);
    let mut alive = lifetimes.len();
    for &d in decayed.iter().take(bins + 1) {
        survival.push(alive as f64 / n);
        alive -= d;
    }

    let (xs, ys): (Vec<f64>, Vec<f64>) = times
        .iter()
        .zip(&survival)
        .filter(|(_, &s)| s > 0.0)
        .map(|(&t, &s)| (t, s.ln()))
        .unzip();
    if xs.len() < 2 {
        return Err(Error::Fit("fewer than two nonzero survival points".into()));
    }
    let fit = stats::linear_fit(&xs, &ys)?;

    // Cov(ln S_i, ln S_j) = (1 - S_i) / (N S_i) for t_i <= t_j.
    let used: Vec<f64> = survival.iter().copied().filter(|&s| s > 0.0).collect();
    let mean_t = xs.iter().sum::<f64>() / xs.len() as f64;
    let sxx: f64 = xs.iter().map(|t| (t - mean_t).powi(2)).sum();
    let w: Vec<f64> = xs.iter().map(|t| (t - mean_t) / sxx).collect();
    let mut var = 0.0;
    for i in 0..w.len() {
        for j in 0..w.len() {
            let k = i.min(j);
            var += w[i] * w[j] * (1.0 - used[k]) / (n * used[k]);
        }
    }

    Ok(DecayRun {
        times,
        survival,
        mean_lifetime: lifetimes.iter().sum::<f64>() / n,
        fitted_rate: -fit.slope,
        fitted_rate_stderr: var.max(0.0).sqrt(),
        lifetimes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run() -> DecayRun {
        let model = DecayModel::new(1.0, 1_000_000).unwrap();
        decay_sample(&model, &mut RngStream::new(77, 0), 3.0, 30).unwrap()
    }

    #[test]
    fn mean_lifetime_and_fitted_rate() {
        let r = run();
        assert!((r.mean_lifetime - 1.0).abs() < 0.003, "{}", r.mean_lifetime);
        assert!((r.fitted_rate - 1.0).abs() < 0.01, "{}", r.fitted_rate);
        assert!((r.fitted_rate - 1.0).abs() < 3.0 * r.fitted_rate_stderr);
    }

    #[test]
    fn survival_is_monotone() {
        let r = run();
        assert_eq!(r.survival[0], 1.0);
        assert!(r.survival.windows(2).all(|w| w[1] <= w[0]));
    }

    #[test]
    fn memoryless_residual_lifetime() {
        let r = run();
        let residual: Vec<f64> = r.lifetimes.iter().filter(|&&t| t > 1.0).map(|t| t - 1.0).collect();
        let mean = residual.iter().sum::<f64>() / residual.len() as f64;
        assert!((mean - 1.0).abs() < 0.01, "{mean}");
    }

    #[test]
    fn stderr_covers_truth_across_seeds() {
        let model = DecayModel::new(2.0, 20_000).unwrap();
        let mut inside = 0;
        for s in 0..50 {
            let r = decay_sample(&model, &mut RngStream::new(s, 0), 2.0, 20).unwrap();
            if (r.fitted_rate - 2.0).abs() < 2.0 * r.fitted_rate_stderr {
                inside += 1;
            }
        }
        // ~95% expected inside 2 sigma.
        assert!(inside >= 42, "{inside}/50");
    }

    #[test]
    fn invalid_inputs() {
        assert!(DecayModel::new(0.0, 10).is_err());
        let m = DecayModel::new(1.0, 10).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert!(decay_sample(&m, &mut rng, 0.0, 10).is_err());
        assert!(decay_sample(&m, &mut rng, 1.0, 1).is_err());
    }
}
