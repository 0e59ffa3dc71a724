use rayon::prelude::*;
use serde::Serialize;

use super::{check_spacing, Boundary, EuclideanAction, Lattice, LatticePath};
use crate::stats::{integrated_autocorrelation_time, standard_normal};
use crate::{Error, Result, RngStream};

/// Sampler settings. `sweeps` counts thermalization sweeps too.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetropolisConfig {
    pub sweeps: usize,
    pub thermalization: usize,
    /// Half-width of the uniform site proposal `x_j + U(-w, w)`.
    pub proposal_width: f64,
    /// Rescale the width toward 50% acceptance every 10 thermalization
    /// sweeps; frozen afterwards.
    pub tune_width: bool,
    /// Start from an exact free-particle path (random walk or bridge)
    /// instead of the classical straight line.
    pub hot_start: bool,
    /// Upper bound on stored paths per chain; the stride is raised when
    /// `2 tau_int` would store more.
    pub max_samples: usize,
    /// Number of production proposals logged for the acceptance audit.
    pub audit_len: usize,
}

impl Default for MetropolisConfig {
    fn default() -> Self {
        Self {
            sweeps: 10_000,
            thermalization: 1_000,
            proposal_width: 0.5,
            tune_width: true,
            hot_start: true,
            max_samples: 64,
            audit_len: 1_000,
        }
    }
}

impl MetropolisConfig {
    fn validate(&self) -> Result<()> {
        if self.sweeps <= self.thermalization {
            return Err(Error::argument("sweeps must exceed thermalization"));
        }
        if !(self.proposal_width > 0.0) {
            return Err(Error::domain("proposal_width must be > 0"));
        }
        if self.max_samples == 0 {
            return Err(Error::argument("max_samples must be >= 1"));
        }
        Ok(())
    }
}

/// One logged proposal: the action change and whether it was accepted.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Proposal {
    pub delta_s: f64,
    pub accepted: bool,
}

/// Diagnostics of a single Markov chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainRun {
    /// Action after every production sweep.
    pub action_trace: Vec<f64>,
    pub acceptance_rate: f64,
    /// Frozen proposal width used in production.
    pub proposal_width: f64,
    pub tau_int: f64,
    pub stride: usize,
    #[serde(skip)]
    pub audit: Vec<Proposal>,
}

/// Sampled paths together with the chain diagnostics.
#[derive(Clone, Debug, Serialize)]
pub struct Ensemble {
    pub paths: Vec<LatticePath>,
    pub chains: Vec<ChainRun>,
    pub mass: f64,
    pub hbar: f64,
}

impl Ensemble {
    /// Wraps externally constructed paths (no chain diagnostics).
    pub fn from_paths(paths: Vec<LatticePath>, mass: f64, hbar: f64) -> Result<Self> {
        if paths.is_empty() {
            return Err(Error::argument("ensemble is empty"));
        }
        if !(mass > 0.0) || !(hbar > 0.0) {
            return Err(Error::domain("mass and hbar must be > 0"));
        }
        Ok(Self { paths, chains: Vec::new(), mass, hbar })
    }

    pub fn acceptance_rate(&self) -> f64 {
        self.chains.iter().map(|c| c.acceptance_rate).sum::<f64>() / self.chains.len().max(1) as f64
    }
}

#[derive(Clone)]
struct Chain<'a> {
    dynamics: &'a EuclideanAction,
    free_end: bool,
    x: Vec<f64>,
    rng: RngStream,
    width: f64,
    action: f64,
}

impl Chain<'_> {
    /// One left-to-right pass over the movable slices; returns the number
    /// of accepted proposals.
    fn sweep(&mut self, mut audit: Option<(&mut Vec<Proposal>, usize)>) -> usize {
        let n = self.x.len();
        let last = if self.free_end { n } else { n - 1 };
        let k = self.dynamics.kinetic_coefficient();
        let a = self.dynamics.a_t;
        let inv_hbar = 1.0 / self.dynamics.hbar;
        let mut accepted = 0;
        for j in 1..last {
            let old = self.x[j];
            let new = old + self.width * (2.0 * self.rng.uniform() - 1.0);
            let left = self.x[j - 1];
            let mut d_kin = (new - left).powi(2) - (old - left).powi(2);
            let mut w = 0.5;
            if j + 1 < n {
                let right = self.x[j + 1];
                d_kin += (right - new).powi(2) - (right - old).powi(2);
                w = 1.0;
            }
            let pot = &self.dynamics.potential;
            let delta_s = k * d_kin + a * w * (pot.eval(new) - pot.eval(old));
            let accept = delta_s <= 0.0 || self.rng.uniform() < (-delta_s * inv_hbar).exp();
            if accept {
                self.x[j] = new;
                self.action += delta_s;
                accepted += 1;
            }
            if let Some((log, cap)) = audit.as_mut() {
                if log.len() < *cap {
                    log.push(Proposal { delta_s, accepted: accept });
                }
            }
        }
        accepted
    }

    fn moves_per_sweep(&self) -> usize {
        self.x.len() - if self.free_end { 1 } else { 2 }
    }
}

fn initial_path(dynamics: &EuclideanAction, lattice: &Lattice, rng: &mut RngStream, hot: bool) -> Vec<f64> {
    let n = lattice.n_t;
    let start = lattice.boundary.start();
    let mut x = vec![start; n];
    match lattice.boundary {
        Boundary::Fixed { start, end } => {
            for (j, v) in x.iter_mut().enumerate() {
                *v = start + (end - start) * j as f64 / (n - 1) as f64;
            }
            if hot {
                // Brownian bridge added to the straight line.
                let sigma = (dynamics.hbar * lattice.a_t / dynamics.mass).sqrt();
                let mut walk = vec![0.0; n];
                for j in 1..n {
                    walk[j] = walk[j - 1] + sigma * standard_normal(rng);
                }
                let tail = walk[n - 1];
                for j in 1..n - 1 {
                    x[j] += walk[j] - tail * j as f64 / (n - 1) as f64;
                }
            }
        }
        Boundary::FreeEnd { .. } => {
            if hot {
                let sigma = (dynamics.hbar * lattice.a_t / dynamics.mass).sqrt();
                for j in 1..n {
                    x[j] = x[j - 1] + sigma * standard_normal(rng);
                }
            }
        }
    }
    x
}

/// Runs one chain: thermalization (with optional width tuning), then
/// production sweeps. The action series of the production phase fixes
/// the stride `max(ceil(2 tau_int), production / max_samples)`; the
/// production phase is then replayed from the same chain state and random
/// stream to collect paths at that stride, so the stored paths are exactly
/// the configurations the action series describes.
pub fn metropolis_sample(
    dynamics: &EuclideanAction,
    lattice: &Lattice,
    rng: &mut RngStream,
    config: &MetropolisConfig,
) -> Result<Ensemble> {
    let (paths, run) = run_chain(dynamics, lattice, rng, config)?;
    Ok(Ensemble { paths, chains: vec![run], mass: dynamics.mass, hbar: dynamics.hbar })
}

/// Independent chains on sub-streams `0..chains` of `rng`, run in parallel
/// and merged in chain order.
pub fn sample_chains(
    dynamics: &EuclideanAction,
    lattice: &Lattice,
    rng: &RngStream,
    config: &MetropolisConfig,
    chains: usize,
) -> Result<Ensemble> {
    if chains == 0 {
        return Err(Error::argument("chains must be >= 1"));
    }
    let runs = (0..chains as u64)
        .into_par_iter()
        .map(|c| run_chain(dynamics, lattice, &mut rng.substream(c), config))
        .collect::<Result<Vec<_>>>()?;
    let mut paths = Vec::new();
    let mut diagnostics = Vec::with_capacity(chains);
    for (p, r) in runs {
        paths.extend(p);
        diagnostics.push(r);
    }
    Ok(Ensemble { paths, chains: diagnostics, mass: dynamics.mass, hbar: dynamics.hbar })
}

fn run_chain(
    dynamics: &EuclideanAction,
    lattice: &Lattice,
    rng: &mut RngStream,
    config: &MetropolisConfig,
) -> Result<(Vec<LatticePath>, ChainRun)> {
    config.validate()?;
    check_spacing(&LatticePath::new(lattice.a_t, vec![0.0; 2])?, dynamics)?;
    let x = initial_path(dynamics, lattice, rng, config.hot_start);
    let mut chain = Chain {
        dynamics,
        free_end: matches!(lattice.boundary, Boundary::FreeEnd { .. }),
        x,
        rng: rng.clone(),
        width: config.proposal_width,
        action: 0.0,
    };
    let moves = chain.moves_per_sweep();

    let mut batch_acc = 0;
    for s in 0..config.thermalization {
        batch_acc += chain.sweep(None);
        if config.tune_width && (s + 1) % 10 == 0 {
            let rate = batch_acc as f64 / (10 * moves) as f64;
            chain.width *= (rate / 0.5).clamp(0.5, 2.0);
            batch_acc = 0;
        }
    }

    let production = config.sweeps - config.thermalization;
    chain.action = dynamics.evaluate(&chain.x);
    let replay = chain.clone();
    let mut audit = Vec::with_capacity(config.audit_len);
    let mut accepted = 0;
    let mut trace = Vec::with_capacity(production);
    for _ in 0..production {
        accepted += chain.sweep(Some((&mut audit, config.audit_len)));
        trace.push(chain.action);
    }
    let tau_int = integrated_autocorrelation_time(&trace);
    let stride = ((2.0 * tau_int).ceil() as usize)
        .max(production.div_ceil(config.max_samples))
        .max(1);

    let mut chain = replay;
    let mut paths = Vec::with_capacity(production / stride);
    for s in 1..=production {
        chain.sweep(None);
        if s % stride == 0 {
            paths.push(LatticePath { a_t: lattice.a_t, positions: chain.x.clone() });
        }
    }
    *rng = chain.rng;
    let run = ChainRun {
        action_trace: trace,
        acceptance_rate: accepted as f64 / (production * moves) as f64,
        proposal_width: chain.width,
        tau_int,
        stride,
        audit,
    };
    Ok((paths, run))
}
