use serde::Serialize;

use super::{energy, flip, CouplingMatrix, SpinConfig};
use crate::{Error, Result, RngStream};

/// Geometric cooling `T_k = t_initial * ratio^k`, `k = 0..levels`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct AnnealSchedule {
    pub t_initial: f64,
    pub ratio: f64,
    pub levels: usize,
    pub sweeps_per_level: usize,
}

impl AnnealSchedule {
    pub fn validate(&self) -> Result<()> {
        if !(self.t_initial > 0.0) || !self.t_initial.is_finite() {
            return Err(Error::domain("t_initial must be > 0"));
        }
        if !(self.ratio > 0.0 && self.ratio < 1.0) {
            return Err(Error::domain("ratio must lie in (0, 1)"));
        }
        if self.levels == 0 || self.sweeps_per_level == 0 {
            return Err(Error::argument("levels and sweeps_per_level must be >= 1"));
        }
        Ok(())
    }

    pub fn temperatures(&self) -> Vec<f64> {
        (0..self.levels).map(|k| self.t_initial * self.ratio.powi(k as i32)).collect()
    }

    /// Same temperature range covered with `factor` times as many levels.
    pub fn slower(&self, factor: usize) -> Self {
        Self {
            ratio: self.ratio.powf(1.0 / factor as f64),
            levels: (self.levels - 1) * factor + 1,
            ..*self
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct AnnealRun {
    /// Lowest-energy configuration seen.
    pub config: SpinConfig,
    pub energy: f64,
    /// Metropolis acceptance rate per level.
    pub acceptance_trace: Vec<f64>,
    /// Best energy seen up to the end of each level.
    pub best_trace: Vec<f64>,
}

/// Metropolis sweeps (spins visited in index order) at each temperature of
/// the schedule, from a random start.
pub fn simulated_annealing(couplings: &CouplingMatrix, schedule: &AnnealSchedule, rng: &mut RngStream) -> Result<AnnealRun> {
    schedule.validate()?;
    let n = couplings.n;
    let mut s = SpinConfig::random(n, rng);
    let mut h = couplings.fields(&s);
    let mut e = energy(&s, couplings)?;
    let mut best = (s.clone(), e);
    let mut acceptance_trace = Vec::with_capacity(schedule.levels);
    let mut best_trace = Vec::with_capacity(schedule.levels);
    for t in schedule.temperatures() {
        let beta = 1.0 / t;
        let mut accepted = 0usize;
        for _ in 0..schedule.sweeps_per_level {
            for i in 0..n {
                let delta = 2.0 * s.spins[i] as f64 * h[i];
                if delta <= 0.0 || rng.uniform() < (-beta * delta).exp() {
                    flip(&mut s, &mut h, couplings, i);
                    e += delta;
                    accepted += 1;
                    if e < best.1 {
                        best = (s.clone(), e);
                    }
                }
            }
        }
        acceptance_trace.push(accepted as f64 / (n * schedule.sweeps_per_level) as f64);
        best_trace.push(best.1);
    }
    let energy = energy(&best.0, couplings)?;
    Ok(AnnealRun { config: best.0, energy, acceptance_trace, best_trace })
}
