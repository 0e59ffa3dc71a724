//! Nearest-neighbour lattice random walks and their heat-kernel limit.
//!
//! A walker moves `+-a_s` along one uniformly chosen axis per time step
//! `a_t`, so after `n` steps each axis has variance `n a_s^2 / dim`. With
//! `t = n a_t` this is `2 D t` for `D = a_s^2 / (2 dim a_t)`; holding
//! `a_s^2 / a_t = 2 dim` fixes `D = 1`. Another `D` is reached by
//! rescaling lengths `x -> x sqrt(D)`.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::PI;

use rand::RngCore;
use rayon::prelude::*;
use serde::Serialize;

use crate::{Error, Result, RngStream};

const BLOCK: usize = 1 << 16;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct WalkSpec {
    pub dim: usize,
    pub a_s: f64,
    pub a_t: f64,
    pub n_walkers: usize,
    pub n_steps: usize,
    /// Starting lattice site; `dim` coordinates.
    pub origin: Vec<i64>,
}

impl WalkSpec {
    /// Walk from the lattice origin with `a_t = a_s^2 / (2 dim)` (so
    /// `D = 1`) and enough steps to reach time `t`.
    pub fn unit_diffusion(dim: usize, a_s: f64, t: f64, n_walkers: usize) -> Self {
        let a_t = a_s * a_s / (2.0 * dim as f64);
        Self {
            dim,
            a_s,
            a_t,
            n_walkers,
            n_steps: (t / a_t).round() as usize,
            origin: vec![0; dim],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(1..=3).contains(&self.dim) {
            return Err(Error::argument(format!("dim must be 1, 2 or 3, got {}", self.dim)));
        }
        if !(self.a_s > 0.0) || !(self.a_t > 0.0) {
            return Err(Error::domain("a_s and a_t must be > 0"));
        }
        if self.n_walkers == 0 {
            return Err(Error::argument("n_walkers must be >= 1"));
        }
        if self.origin.len() != self.dim {
            return Err(Error::argument("origin must have dim coordinates"));
        }
        Ok(())
    }

    /// `a_s^2 / a_t`.
    pub fn ratio(&self) -> f64 {
        self.a_s * self.a_s / self.a_t
    }

    pub fn d_coeff(&self) -> f64 {
        self.ratio() / (2.0 * self.dim as f64)
    }

    pub fn time(&self) -> f64 {
        self.n_steps as f64 * self.a_t
    }
}

/// Occupation counts of the walkers at the final time.
#[derive(Clone, Debug, Serialize)]
pub struct DiffusionField {
    pub dim: usize,
    pub a_s: f64,
    pub time: f64,
    pub d_coeff: f64,
    pub n_walkers: usize,
    pub n_steps: usize,
    pub origin: Vec<i64>,
    /// Site (padded to three coordinates) to walker count.
    pub bins: BTreeMap<[i64; 3], u64>,
    /// Sum of bin masses, exactly 1 for integer counts.
    pub normalization: f64,
}

impl DiffusionField {
    pub fn mass(&self, site: &[i64]) -> f64 {
        self.bins.get(&pad(site)).copied().unwrap_or(0) as f64 / self.n_walkers as f64
    }

    /// Lattice volume per reachable site: after `n` steps only sites whose
    /// coordinate sum has the parity of `n` (relative to the origin) are
    /// occupied, so each carries volume `2 a_s^dim` (`a_s^dim` at `n = 0`).
    pub fn cell_volume(&self) -> f64 {
        let v = self.a_s.powi(self.dim as i32);
        if self.n_steps == 0 {
            v
        } else {
            2.0 * v
        }
    }

    /// `(displacement from origin, density)` for every occupied site.
    pub fn densities(&self) -> Vec<(Vec<f64>, f64)> {
        let norm = 1.0 / (self.n_walkers as f64 * self.cell_volume());
        self.bins
            .iter()
            .map(|(site, &c)| (self.displacement(site), c as f64 * norm))
            .collect()
    }

    fn displacement(&self, site: &[i64; 3]) -> Vec<f64> {
        (0..self.dim).map(|k| (site[k] - self.origin[k]) as f64 * self.a_s).collect()
    }

    /// Mean displacement per axis and its standard error.
    pub fn mean(&self) -> Vec<(f64, f64)> {
        self.moments().into_iter().map(|(m, v, n)| (m, (v / n).sqrt())).collect()
    }

    /// Sample variance per axis.
    pub fn variance(&self) -> Vec<f64> {
        self.moments().into_iter().map(|(_, v, _)| v).collect()
    }

    fn moments(&self) -> Vec<(f64, f64, f64)> {
        let n = self.n_walkers as f64;
        (0..self.dim)
            .map(|k| {
                let (mut s1, mut s2) = (0.0, 0.0);
                for (site, &c) in &self.bins {
                    let x = (site[k] - self.origin[k]) as f64 * self.a_s;
                    s1 += c as f64 * x;
                    s2 += c as f64 * x * x;
                }
                let mean = s1 / n;
                let var = if self.n_walkers > 1 { (s2 - n * mean * mean) / (n - 1.0) } else { 0.0 };
                (mean, var.max(0.0), n)
            })
            .collect()
    }
}

fn pad(site: &[i64]) -> [i64; 3] {
    let mut p = [0; 3];
    p[..site.len()].copy_from_slice(site);
    p
}

/// Simulates all walkers in blocks of 65536, each on its own sub-stream of
/// `rng`, and merges the integer counts.
pub fn simulate_walk(spec: &WalkSpec, rng: &RngStream) -> Result<DiffusionField> {
    spec.validate()?;
    let blocks = spec.n_walkers.div_ceil(BLOCK);
    let partial: Vec<HashMap<[i64; 3], u64>> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = rng.substream(b as u64);
            let count = BLOCK.min(spec.n_walkers - b * BLOCK);
            let mut bins = HashMap::new();
            for _ in 0..count {
                let d = displacement(spec.dim, spec.n_steps, &mut r);
                let mut site = pad(&spec.origin);
                for k in 0..3 {
                    site[k] += d[k];
                }
                *bins.entry(site).or_insert(0) += 1;
            }
            bins
        })
        .collect();
    let mut bins = BTreeMap::new();
    for part in partial {
        for (k, v) in part {
            *bins.entry(k).or_insert(0) += v;
        }
    }
    let total: u64 = bins.values().sum();
    Ok(DiffusionField {
        dim: spec.dim,
        a_s: spec.a_s,
        time: spec.time(),
        d_coeff: spec.d_coeff(),
        n_walkers: spec.n_walkers,
        n_steps: spec.n_steps,
        origin: spec.origin.clone(),
        bins,
        normalization: total as f64 / spec.n_walkers as f64,
    })
}

fn displacement(dim: usize, n_steps: usize, rng: &mut RngStream) -> [i64; 3] {
    let mut d = [0i64; 3];
    match dim {
        1 => {
            // One random bit per step: +1 for a set bit.
            let mut left = n_steps;
            let mut ones = 0i64;
            while left > 0 {
                let take = left.min(64);
                let bits = rng.next_u64();
                let mask = if take == 64 { u64::MAX } else { (1u64 << take) - 1 };
                ones += (bits & mask).count_ones() as i64;
                left -= take;
            }
            d[0] = 2 * ones - n_steps as i64;
        }
        2 => {
            // Two bits per step: axis, then sign.
            let mut left = n_steps;
            while left > 0 {
                let take = left.min(32);
                let mut bits = rng.next_u64();
                for _ in 0..take {
                    d[(bits & 1) as usize] += if bits & 2 == 0 { 1 } else { -1 };
                    bits >>= 2;
                }
                left -= take;
            }
        }
        _ => {
            for _ in 0..n_steps {
                let dir = rng.below(6) as usize;
                d[dir / 2] += if dir % 2 == 0 { 1 } else { -1 };
            }
        }
    }
    d
}

/// Heat kernel `(4 pi D t)^(-dim/2) exp(-|x|^2 / (4 D t))` for a unit
/// point source at the origin; each point has `dim` coordinates.
pub fn analytic_kernel(dim: usize, d_coeff: f64, t: f64, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    if !(t > 0.0) {
        return Err(Error::domain(format!("t must be > 0, got {t}")));
    }
    if !(d_coeff > 0.0) {
        return Err(Error::domain(format!("d_coeff must be > 0, got {d_coeff}")));
    }
    let norm = (4.0 * PI * d_coeff * t).powf(-(dim as f64) / 2.0);
    points
        .iter()
        .map(|p| {
            if p.len() != dim {
                return Err(Error::argument("point dimension differs from dim"));
            }
            let r2: f64 = p.iter().map(|x| x * x).sum();
            Ok(norm * (-r2 / (4.0 * d_coeff * t)).exp())
        })
        .collect()
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanLevel {
    pub a_s: f64,
    pub a_t: f64,
    pub n_steps: usize,
    /// `max |density - kernel|` over occupied sites.
    pub sup_error: f64,
    pub peak_density: f64,
    /// Leading lattice correction at the peak, `peak * dim / (4 n)`.
    pub discretization_estimate: f64,
    /// Standard error of the walk density at the peak site.
    pub sampling_stderr: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceScan {
    pub levels: Vec<ScanLevel>,
    pub ratio: f64,
}

/// Base level plus `refinements` halvings of `a_s` at fixed
/// `a_s^2 / a_t = 2 dim` and fixed final time, each compared with the
/// `D = 1` heat kernel. Fails with a convergence error when the finest
/// level's peak sampling error exceeds its discretization estimate.
pub fn convergence_scan(base: &WalkSpec, refinements: usize, rng: &RngStream) -> Result<ConvergenceScan> {
    base.validate()?;
    if refinements < 2 {
        return Err(Error::argument("refinements must be >= 2"));
    }
    let target = 2.0 * base.dim as f64;
    if (base.ratio() - target).abs() > 1e-9 * target {
        return Err(Error::argument(format!(
            "base spec must satisfy a_s^2 / a_t = {target}, got {}",
            base.ratio()
        )));
    }
    if base.n_steps == 0 {
        return Err(Error::argument("base spec needs n_steps >= 1"));
    }
    let mut levels = Vec::with_capacity(refinements + 1);
    for level in 0..=refinements {
        let scale = 1u64 << level;
        let spec = WalkSpec {
            a_s: base.a_s / scale as f64,
            a_t: base.a_t / (scale * scale) as f64,
            n_steps: base.n_steps * (scale * scale) as usize,
            ..base.clone()
        };
        let field = simulate_walk(&spec, &rng.substream(level as u64))?;
        let dens = field.densities();
        let points: Vec<Vec<f64>> = dens.iter().map(|(x, _)| x.clone()).collect();
        let kernel = analytic_kernel(spec.dim, 1.0, spec.time(), &points)?;
        let sup_error = dens
            .iter()
            .zip(&kernel)
            .map(|((_, d), k)| (d - k).abs())
            .fold(0.0, f64::max);
        let peak = analytic_kernel(spec.dim, 1.0, spec.time(), &[vec![0.0; spec.dim]])?[0];
        let p = (peak * field.cell_volume()).min(1.0);
        levels.push(ScanLevel {
            a_s: spec.a_s,
            a_t: spec.a_t,
            n_steps: spec.n_steps,
            sup_error,
            peak_density: peak,
            discretization_estimate: peak * spec.dim as f64 / (4.0 * spec.n_steps as f64),
            sampling_stderr: (p * (1.0 - p) / spec.n_walkers as f64).sqrt() / field.cell_volume(),
        });
    }
    let finest = levels.last().expect("at least three levels");
    if finest.sampling_stderr > finest.discretization_estimate {
        return Err(Error::Convergence(format!(
            "finest level is sampling dominated (stderr {:.3e} > lattice error {:.3e}); add walkers",
            finest.sampling_stderr, finest.discretization_estimate
        )));
    }
    Ok(ConvergenceScan { levels, ratio: target })
}
