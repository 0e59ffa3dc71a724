//! Two-slit intensity on a distant screen.
//!
//! Far-field (Fraunhofer) model: the path difference between the two
//! slits to a detector at lateral position `x` is `d x / L`, and each slit
//! on its own illuminates the screen with the Gaussian-aperture envelope
//! `E(x) = exp(-2 x^2 / w^2)`, `w = 2 lambda L / (pi a)` for slit width
//! `a`. The model is only meaningful for `L >> d` and `|x| << L`.

use std::f64::consts::PI;

use serde::Serialize;

use super::amplitude::ComplexAmplitude;
use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SlitMode {
    /// Sum amplitudes of the two paths, then square.
    Amplitude,
    /// Sum the two single-slit probabilities.
    Classical,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SlitGeometry {
    pub wavelength: f64,
    pub slit_separation: f64,
    pub screen_distance: f64,
    /// `None` means a quarter of the separation.
    pub slit_width: Option<f64>,
}

impl SlitGeometry {
    pub fn new(wavelength: f64, slit_separation: f64, screen_distance: f64) -> Self {
        Self {
            wavelength,
            slit_separation,
            screen_distance,
            slit_width: None,
        }
    }

    fn validate(&self) -> Result<()> {
        let fields = [
            ("wavelength", self.wavelength),
            ("slit_separation", self.slit_separation),
            ("screen_distance", self.screen_distance),
            ("slit_width", self.width()),
        ];
        for (name, v) in fields {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::domain(format!("{name} must be > 0, got {v}")));
            }
        }
        Ok(())
    }

    pub fn width(&self) -> f64 {
        self.slit_width.unwrap_or(self.slit_separation / 4.0)
    }

    /// Lateral position of the `n`-th dark fringe (`n = 0` is the first).
    pub fn dark_fringe(&self, n: usize) -> f64 {
        (n as f64 + 0.5) * self.wavelength * self.screen_distance / self.slit_separation
    }

    /// Spacing between adjacent bright fringes.
    pub fn fringe_spacing(&self) -> f64 {
        self.wavelength * self.screen_distance / self.slit_separation
    }

    fn envelope(&self, x: f64) -> f64 {
        let w = 2.0 * self.wavelength * self.screen_distance / (PI * self.width());
        (-2.0 * x * x / (w * w)).exp()
    }

    /// Amplitude reaching `x` through slit `side` (`+1` or `-1`).
    pub fn slit_amplitude(&self, x: f64, side: f64) -> ComplexAmplitude {
        let k = 2.0 * PI / self.wavelength;
        let phase = side * k * self.slit_separation * x / (2.0 * self.screen_distance);
        ComplexAmplitude::from_polar(self.envelope(x).sqrt(), phase)
    }
}

pub fn double_slit_pattern(geometry: &SlitGeometry, detector_xs: &[f64], mode: SlitMode) -> Result<Vec<f64>> {
    geometry.validate()?;
    Ok(detector_xs
        .iter()
        .map(|&x| {
            let upper = geometry.slit_amplitude(x, 1.0);
            let lower = geometry.slit_amplitude(x, -1.0);
            match mode {
                SlitMode::Amplitude => (upper + lower).probability(),
                SlitMode::Classical => upper.probability() + lower.probability(),
            }
        })
        .collect())
}

/// Number of strict interior local maxima (plateaus count once).
pub fn count_local_maxima(values: &[f64]) -> usize {
    let mut count = 0;
    let mut i = 1;
    while i + 1 < values.len() {
        if values[i] > values[i - 1] {
            let mut j = i;
            while j + 1 < values.len() && values[j + 1] == values[i] {
                j += 1;
            }
            if j + 1 < values.len() && values[j + 1] < values[i] {
                count += 1;
            }
            i = j + 1;
        } else {
            i += 1;
        }
    }
    count
}
