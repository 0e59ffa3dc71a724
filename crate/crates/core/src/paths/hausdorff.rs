use serde::Serialize;

use super::metropolis::{sample_chains, Ensemble, MetropolisConfig};
use super::{Boundary, EuclideanAction, Lattice, LatticePath};
use crate::potential::Potential;
use crate::stats::linear_fit;
use crate::{Error, Result, RngStream};

/// Mean path length as a function of resolution and the fitted exponent
/// `<L> ~ dx^alpha`, `d_h = 1 - alpha`.
#[derive(Clone, Debug, Serialize)]
pub struct HausdorffScan {
    /// Effective resolutions actually used, strictly decreasing.
    pub resolutions: Vec<f64>,
    /// Block size in slices behind each resolution.
    pub block_sizes: Vec<usize>,
    pub mean_lengths: Vec<f64>,
    /// Standard error of each mean length over the ensemble.
    pub length_stderr: Vec<f64>,
    pub alpha: f64,
    pub alpha_stderr: f64,
    pub d_h: f64,
}

/// Coarse-grains every path by averaging blocks of `b` consecutive slices
/// and measures `L = (n_links / b) * mean |X_{k+1} - X_k|` over the block
/// means `X_k` (the mean link length rescaled to the full extent, so a
/// straight path has the same length at every resolution).
///
/// A requested resolution `dx` selects `b = round(m dx^2 / (hbar a_t))`,
/// the number of slices over which a free path spreads by `dx`; the
/// effective resolution `sqrt(hbar b a_t / m)` enters the fit. Block sizes
/// leaving fewer than two blocks are dropped, as are duplicates.
pub fn hausdorff_scan(ensemble: &Ensemble, resolutions: &[f64]) -> Result<HausdorffScan> {
    let first = ensemble.paths.first().ok_or_else(|| Error::argument("ensemble is empty"))?;
    let (n, a_t) = (first.len(), first.a_t);
    if ensemble.paths.iter().any(|p| p.len() != n || p.a_t != a_t) {
        return Err(Error::argument("ensemble paths live on different lattices"));
    }
    if resolutions.iter().any(|&r| !(r > 0.0) || !r.is_finite()) {
        return Err(Error::domain("resolutions must be > 0"));
    }
    let lo = resolutions.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = resolutions.iter().cloned().fold(0.0, f64::max);
    if hi < 10.0 * lo {
        return Err(Error::argument("resolutions must span at least one decade"));
    }
    let unit = ensemble.hbar * a_t / ensemble.mass;
    let mut blocks: Vec<usize> = resolutions
        .iter()
        .map(|r| ((r * r / unit).round() as usize).max(1))
        .filter(|&b| n / b >= 2)
        .collect();
    blocks.sort_unstable_by(|a, b| b.cmp(a));
    blocks.dedup();
    if blocks.len() < 3 {
        return Err(Error::Fit(format!(
            "only {} usable resolutions on a {n}-slice lattice",
            blocks.len()
        )));
    }

    let mut means = Vec::with_capacity(blocks.len());
    let mut errs = Vec::with_capacity(blocks.len());
    for &b in &blocks {
        let lengths: Vec<f64> = ensemble.paths.iter().map(|p| coarse_length(&p.positions, b)).collect();
        let k = lengths.len() as f64;
        let mean = lengths.iter().sum::<f64>() / k;
        let var = if lengths.len() > 1 {
            lengths.iter().map(|l| (l - mean).powi(2)).sum::<f64>() / (k - 1.0)
        } else {
            0.0
        };
        means.push(mean);
        errs.push((var / k).sqrt());
    }
    if means.iter().any(|&m| !(m > 0.0)) {
        return Err(Error::Fit("zero mean length; paths are constant".into()));
    }
    let res: Vec<f64> = blocks.iter().map(|&b| (unit * b as f64).sqrt()).collect();
    let lx: Vec<f64> = res.iter().map(|r| r.ln()).collect();
    let ly: Vec<f64> = means.iter().map(|m| m.ln()).collect();
    let fit = linear_fit(&lx, &ly)?;
    Ok(HausdorffScan {
        resolutions: res,
        block_sizes: blocks,
        mean_lengths: means,
        length_stderr: errs,
        alpha: fit.slope,
        alpha_stderr: fit.slope_stderr,
        d_h: 1.0 - fit.slope,
    })
}

fn coarse_length(x: &[f64], b: usize) -> f64 {
    let m = x.len() / b;
    let means: Vec<f64> = x[..m * b].chunks_exact(b).map(|c| c.iter().sum::<f64>() / b as f64).collect();
    let total: f64 = means.windows(2).map(|w| (w[1] - w[0]).abs()).sum();
    total / (m - 1) as f64 * (x.len() - 1) as f64 / b as f64
}

/// A single classical straight path from 0 to `end`, as an ensemble.
pub fn straight_line_ensemble(n_t: usize, a_t: f64, end: f64) -> Result<Ensemble> {
    let x = (0..n_t).map(|j| end * j as f64 / (n_t - 1) as f64).collect();
    Ensemble::from_paths(vec![LatticePath::new(a_t, x)?], 1.0, 1.0)
}

/// Full sample-then-scan experiment.
///
/// Paths start at `x = 0` with a free far end (the propagator out of a
/// point), over imaginary time `[0, extent]`. Each chain starts from an
/// exact free-particle path, and independent chains supply the
/// low-frequency path modes that a local Metropolis chain decorrelates
/// slowly.
#[derive(Clone, Debug)]
pub struct HausdorffSpec {
    pub potential: Potential,
    pub mass: f64,
    pub hbar: f64,
    pub n_t: usize,
    pub extent: f64,
    pub sweeps: usize,
    pub thermalization: usize,
    pub chains: usize,
    pub samples_per_chain: usize,
    /// Defaults to block sizes `1, 2, 4, ..` up to `n_t / 2`.
    pub resolutions: Option<Vec<f64>>,
}

impl Default for HausdorffSpec {
    fn default() -> Self {
        Self {
            potential: Potential::Free,
            mass: 1.0,
            hbar: 1.0,
            n_t: 256,
            extent: 0.5,
            sweeps: 10_000,
            thermalization: 1_000,
            chains: 128,
            samples_per_chain: 32,
            resolutions: None,
        }
    }
}

impl HausdorffSpec {
    pub fn a_t(&self) -> f64 {
        self.extent / (self.n_t - 1) as f64
    }

    pub fn default_resolutions(&self) -> Vec<f64> {
        let unit = self.hbar * self.a_t() / self.mass;
        std::iter::successors(Some(1usize), |b| Some(b * 2))
            .take_while(|&b| b <= self.n_t / 2)
            .map(|b| (unit * b as f64).sqrt())
            .collect()
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HausdorffRun {
    pub scan: HausdorffScan,
    pub paths: usize,
    pub chains: usize,
    pub acceptance_rate: f64,
    pub mean_tau_int: f64,
    pub action_trace: Vec<f64>,
}

pub fn hausdorff_experiment(spec: &HausdorffSpec, rng: &RngStream) -> Result<HausdorffRun> {
    if spec.chains * spec.samples_per_chain < 100 {
        return Err(Error::argument("need at least 100 sampled paths (chains * samples_per_chain)"));
    }
    let lattice = Lattice::with_extent(spec.n_t, spec.extent, Boundary::FreeEnd { start: 0.0 })?;
    let dynamics = EuclideanAction::new(spec.mass, spec.potential.clone(), lattice.a_t)?.with_hbar(spec.hbar)?;
    let config = MetropolisConfig {
        sweeps: spec.sweeps,
        thermalization: spec.thermalization,
        max_samples: spec.samples_per_chain,
        ..Default::default()
    };
    let ensemble = sample_chains(&dynamics, &lattice, rng, &config, spec.chains)?;
    let resolutions = spec.resolutions.clone().unwrap_or_else(|| spec.default_resolutions());
    let scan = hausdorff_scan(&ensemble, &resolutions)?;
    let mean_tau_int = ensemble.chains.iter().map(|c| c.tau_int).sum::<f64>() / spec.chains as f64;
    Ok(HausdorffRun {
        scan,
        paths: ensemble.paths.len(),
        chains: spec.chains,
        acceptance_rate: ensemble.acceptance_rate(),
        mean_tau_int,
        action_trace: ensemble.chains[0].action_trace.clone(),
    })
}
