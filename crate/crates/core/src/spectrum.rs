//! Segment-averaged periodogram.
//!
//! The signal is cut into `segments` equal, non-overlapping, rectangular
//! windows (a trailing remainder is dropped). Power is one-sided and
//! normalized so that `power.iter().sum()` equals the mean square of the
//! segmented signal (Parseval).

use rustfft::{num_complex::Complex64, FftPlanner};
use serde::Serialize;

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Detrend {
    /// Keep the zero-frequency content.
    #[default]
    None,
    /// Subtract each segment's mean before transforming.
    Mean,
}

#[derive(Clone, Debug, Serialize)]
pub struct PowerSpectrum {
    pub frequencies: Vec<f64>,
    pub power: Vec<f64>,
    pub segment_count: usize,
    pub segment_len: usize,
}

impl PowerSpectrum {
    pub fn total_power(&self) -> f64 {
        self.power.iter().sum()
    }

    /// Index of the bin whose centre is closest to `freq`.
    pub fn bin_of(&self, freq: f64) -> usize {
        let df = self.frequencies.get(1).copied().unwrap_or(1.0) - self.frequencies[0];
        ((freq - self.frequencies[0]) / df).round().max(0.0) as usize
    }

    pub fn resolution(&self) -> f64 {
        self.frequencies[1] - self.frequencies[0]
    }
}

pub fn periodogram(signal: &[f64], sample_step: f64, segments: usize) -> Result<PowerSpectrum> {
    periodogram_with(signal, sample_step, segments, Detrend::None)
}

pub fn periodogram_with(
    signal: &[f64],
    sample_step: f64,
    segments: usize,
    detrend: Detrend,
) -> Result<PowerSpectrum> {
    if segments < 1 {
        return Err(Error::argument("segments must be >= 1"));
    }
    if signal.len() < 2 * segments {
        return Err(Error::argument(format!(
            "signal of length {} too short for {segments} segments",
            signal.len()
        )));
    }
    if !(sample_step > 0.0) {
        return Err(Error::domain("sample_step must be > 0"));
    }
    let len = signal.len() / segments;
    let n_bins = len / 2 + 1;
    let fft = FftPlanner::new().plan_fft_forward(len);
    let mut power = vec![0.0; n_bins];
    let mut buf = vec![Complex64::new(0.0, 0.0); len];
    let norm = 1.0 / (len as f64 * len as f64 * segments as f64);
    for seg in signal.chunks_exact(len).take(segments) {
        let offset = match detrend {
            Detrend::None => 0.0,
            Detrend::Mean => seg.iter().sum::<f64>() / len as f64,
        };
        for (b, &x) in buf.iter_mut().zip(seg) {
            *b = Complex64::new(x - offset, 0.0);
        }
        fft.process(&mut buf);
        for (k, p) in power.iter_mut().enumerate() {
            // Fold negative frequencies onto positive ones; DC and Nyquist
            // have no mirror image.
            let mirrored = k != 0 && !(len % 2 == 0 && k == len / 2);
            let w = if mirrored { 2.0 } else { 1.0 };
            *p += w * buf[k].norm_sqr() * norm;
        }
    }
    let df = 1.0 / (len as f64 * sample_step);
    Ok(PowerSpectrum {
        frequencies: (0..n_bins).map(|k| k as f64 * df).collect(),
        power,
        segment_count: segments,
        segment_len: len,
    })
}
