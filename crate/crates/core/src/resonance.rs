//! Periodically driven overdamped particle in the quartic double well
//! `V(x) = x^4/4 - x^2/2`:
//!
//! `dx = (x - x^3 + A sin(omega t)) dt + sqrt(2 D dt) N(0, 1)`.

use std::f64::consts::PI;

use rayon::prelude::*;
use serde::Serialize;

use crate::spectrum::{periodogram_with, Detrend};
use crate::stats::{median, standard_normal};
use crate::{Error, Result, RngStream};

/// Trajectory samples per drive period for [`DoubleWellSpec::driven`].
pub const SAMPLES_PER_PERIOD: usize = 64;
/// Integrator steps per stored sample for [`DoubleWellSpec::driven`].
pub const STEPS_PER_SAMPLE: usize = 100;
/// Segments averaged in the SNR periodogram.
pub const SNR_SEGMENTS: usize = 8;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoubleWellSpec {
    pub amplitude: f64,
    pub omega: f64,
    pub noise_d: f64,
    pub dt: f64,
    pub t_total: f64,
    pub x0: f64,
    /// Integrator steps between stored samples.
    pub stride: usize,
}

impl DoubleWellSpec {
    /// `periods` drive periods, step `2 pi / (omega * 6400)`, one sample
    /// every 100 steps (64 per period), starting in the right well.
    pub fn driven(amplitude: f64, omega: f64, noise_d: f64, periods: usize) -> Self {
        let period = 2.0 * PI / omega;
        Self {
            amplitude,
            omega,
            noise_d,
            dt: period / (SAMPLES_PER_PERIOD * STEPS_PER_SAMPLE) as f64,
            t_total: period * periods as f64,
            x0: 1.0,
            stride: STEPS_PER_SAMPLE,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) || !self.dt.is_finite() {
            return Err(Error::domain("dt must be > 0"));
        }
        if !(self.noise_d >= 0.0) {
            return Err(Error::domain("noise_d must be >= 0"));
        }
        if !(self.t_total >= 0.0) || !self.omega.is_finite() || !self.amplitude.is_finite() {
            return Err(Error::domain("t_total must be >= 0 and parameters finite"));
        }
        if self.stride == 0 {
            return Err(Error::argument("stride must be >= 1"));
        }
        Ok(())
    }

    pub fn steps(&self) -> usize {
        (self.t_total / self.dt).round() as usize
    }
}

/// Positions sampled every `sample_step` time units, starting at `t = 0`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub sample_step: f64,
    pub x: Vec<f64>,
}

impl Trajectory {
    pub fn new(sample_step: f64, x: Vec<f64>) -> Result<Self> {
        if !(sample_step > 0.0) {
            return Err(Error::domain("sample_step must be > 0"));
        }
        Ok(Self { sample_step, x })
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.x.len()).map(|i| i as f64 * self.sample_step).collect()
    }

    /// Mean time spent in one well between switches. A switch is counted
    /// when the particle reaches the opposite half-well (`|x| >= 1/2`);
    /// the first and last, incomplete, stays are discarded. `None` with
    /// fewer than two switches.
    pub fn mean_residence_time(&self) -> Option<f64> {
        let mut state = 0i8;
        let mut switches = Vec::new();
        for (i, &x) in self.x.iter().enumerate() {
            let s = if x >= 0.5 {
                1
            } else if x <= -0.5 {
                -1
            } else {
                continue;
            };
            if s != state {
                if state != 0 {
                    switches.push(i);
                }
                state = s;
            }
        }
        if switches.len() < 2 {
            return None;
        }
        let span = (switches[switches.len() - 1] - switches[0]) as f64 * self.sample_step;
        Some(span / (switches.len() - 1) as f64)
    }
}

/// Euler-Maruyama integration; fails if `|x|` exceeds `10^3`.
pub fn integrate(spec: &DoubleWellSpec, rng: &mut RngStream) -> Result<Trajectory> {
    spec.validate()?;
    let steps = spec.steps();
    let noise = (2.0 * spec.noise_d * spec.dt).sqrt();
    let mut x = spec.x0;
    let mut out = Vec::with_capacity(steps / spec.stride + 1);
    out.push(x);
    for i in 0..steps {
        let t = i as f64 * spec.dt;
        let force = x - x * x * x + spec.amplitude * (spec.omega * t).sin();
        x += force * spec.dt;
        if noise > 0.0 {
            x += noise * standard_normal(rng);
        }
        if !(x.abs() <= 1e3) {
            return Err(Error::Integration(format!(
                "trajectory diverged at t = {t:.4} (|x| > 1e3); reduce dt below {}",
                spec.dt
            )));
        }
        if (i + 1) % spec.stride == 0 {
            out.push(x);
        }
    }
    Trajectory::new(spec.dt * spec.stride as f64, out)
}

/// Power in the periodogram bin containing `omega / 2 pi` over the median
/// of the background bins two to ten bins away on either side, in dB. The
/// periodogram averages 8 mean-removed segments.
pub fn snr_at_drive(trajectory: &Trajectory, omega: f64) -> Result<f64> {
    let spec = periodogram_with(&trajectory.x, trajectory.sample_step, SNR_SEGMENTS, Detrend::Mean)?;
    let f = omega / (2.0 * PI);
    let k = (f / spec.resolution()).round() as usize;
    if k < 11 || k + 10 >= spec.power.len() {
        return Err(Error::argument(format!(
            "drive frequency {f} falls in bin {k}; need 10 background bins on each side of it \
             (lengthen the trajectory or sample faster)"
        )));
    }
    let background: Vec<f64> = (k - 10..=k - 2).chain(k + 2..=k + 10).map(|j| spec.power[j]).collect();
    let bg = median(&background).expect("nonempty background");
    Ok(10.0 * (spec.power[k] / bg).log10())
}

#[derive(Clone, Debug, Serialize)]
pub struct SnrCurve {
    pub noise_levels: Vec<f64>,
    /// Replica-averaged SNR per noise level.
    pub snr_db: Vec<f64>,
    pub snr_stderr: Vec<f64>,
    /// `snr_by_replica[level][replica]`.
    pub snr_by_replica: Vec<Vec<f64>>,
    pub peak_d: f64,
    /// Peak exceeds both end levels by more than 3 dB.
    pub interior_peak: bool,
}

/// SNR over `noise_levels`; level `i`, replica `r` runs on
/// `rng.substream(i).substream(r)`. A missing interior peak is reported in
/// `interior_peak`, not as an error.
pub fn resonance_scan(base: &DoubleWellSpec, noise_levels: &[f64], replicas: usize, rng: &RngStream) -> Result<SnrCurve> {
    if noise_levels.len() < 5 {
        return Err(Error::argument("need at least 5 noise levels"));
    }
    let lo = noise_levels.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = noise_levels.iter().cloned().fold(0.0, f64::max);
    if !(lo > 0.0) || hi < 10.0 * lo {
        return Err(Error::argument("noise levels must be positive and span at least one decade"));
    }
    if replicas < 4 {
        return Err(Error::argument("need at least 4 replicas"));
    }
    let jobs: Vec<(usize, usize)> = (0..noise_levels.len()).flat_map(|i| (0..replicas).map(move |r| (i, r))).collect();
    let snrs = jobs
        .par_iter()
        .map(|&(i, r)| {
            let spec = DoubleWellSpec { noise_d: noise_levels[i], ..base.clone() };
            let traj = integrate(&spec, &mut rng.substream(i as u64).substream(r as u64))?;
            snr_at_drive(&traj, spec.omega)
        })
        .collect::<Result<Vec<f64>>>()?;
    let snr_by_replica: Vec<Vec<f64>> = snrs.chunks(replicas).map(|c| c.to_vec()).collect();
    let mut snr_db = Vec::new();
    let mut snr_stderr = Vec::new();
    for row in &snr_by_replica {
        let n = row.len() as f64;
        let m = row.iter().sum::<f64>() / n;
        let v = row.iter().map(|s| (s - m).powi(2)).sum::<f64>() / (n - 1.0);
        snr_db.push(m);
        snr_stderr.push((v / n).sqrt());
    }
    let peak = (0..snr_db.len()).max_by(|&a, &b| snr_db[a].total_cmp(&snr_db[b])).unwrap();
    let first = noise_levels.iter().enumerate().min_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let last = noise_levels.iter().enumerate().max_by(|a, b| a.1.total_cmp(b.1)).unwrap().0;
    let interior_peak = snr_db[peak] > snr_db[first] + 3.0 && snr_db[peak] > snr_db[last] + 3.0;
    Ok(SnrCurve {
        noise_levels: noise_levels.to_vec(),
        snr_db,
        snr_stderr,
        snr_by_replica,
        peak_d: noise_levels[peak],
        interior_peak,
    })
}
