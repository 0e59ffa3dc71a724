//! Euclidean lattice path integrals: action, path distance, Metropolis
//! sampling and the length-versus-resolution (Hausdorff) scan.

mod hausdorff;
mod metropolis;

use serde::Serialize;

use crate::potential::Potential;
use crate::{Error, Result};

pub use hausdorff::{
    hausdorff_experiment, hausdorff_scan, straight_line_ensemble, HausdorffRun, HausdorffScan, HausdorffSpec,
};
pub use metropolis::{metropolis_sample, sample_chains, ChainRun, Ensemble, MetropolisConfig, Proposal};

/// How the ends of the imaginary-time interval are treated.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub enum Boundary {
    /// Both ends pinned (diagonal propagator element when equal).
    Fixed { start: f64, end: f64 },
    /// First slice pinned, last slice sampled.
    FreeEnd { start: f64 },
}

impl Default for Boundary {
    fn default() -> Self {
        Boundary::Fixed { start: 0.0, end: 0.0 }
    }
}

impl Boundary {
    pub fn start(&self) -> f64 {
        match *self {
            Boundary::Fixed { start, .. } | Boundary::FreeEnd { start } => start,
        }
    }
}

/// Lattice geometry: `n_t` slices spaced `a_t`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Lattice {
    pub n_t: usize,
    pub a_t: f64,
    pub boundary: Boundary,
}

impl Lattice {
    pub fn new(n_t: usize, a_t: f64, boundary: Boundary) -> Result<Self> {
        if n_t < 3 {
            return Err(Error::argument("lattice needs n_t >= 3"));
        }
        if !(a_t > 0.0) || !a_t.is_finite() {
            return Err(Error::domain("a_t must be > 0"));
        }
        Ok(Self { n_t, a_t, boundary })
    }

    /// `n_t` slices covering imaginary time `[0, extent]`.
    pub fn with_extent(n_t: usize, extent: f64, boundary: Boundary) -> Result<Self> {
        if n_t < 3 {
            return Err(Error::argument("lattice needs n_t >= 3"));
        }
        Self::new(n_t, extent / (n_t - 1) as f64, boundary)
    }
}

/// Discretized path `x_j = x(j a_t)`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LatticePath {
    pub a_t: f64,
    pub positions: Vec<f64>,
}

impl LatticePath {
    pub fn new(a_t: f64, positions: Vec<f64>) -> Result<Self> {
        if positions.len() < 2 {
            return Err(Error::argument("path needs at least 2 slices"));
        }
        if !(a_t > 0.0) {
            return Err(Error::domain("a_t must be > 0"));
        }
        Ok(Self { a_t, positions })
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn times(&self) -> Vec<f64> {
        (0..self.len()).map(|j| j as f64 * self.a_t).collect()
    }
}

/// `S = sum_j m/(2 a_t) (x_{j+1} - x_j)^2 + a_t sum_j w_j V(x_j)` with
/// `w_j = 1/2` at the two end slices and 1 elsewhere; paths are weighted
/// by `exp(-S / hbar)`.
#[derive(Clone, Debug)]
pub struct EuclideanAction {
    pub mass: f64,
    pub potential: Potential,
    pub a_t: f64,
    pub hbar: f64,
}

impl EuclideanAction {
    pub fn new(mass: f64, potential: Potential, a_t: f64) -> Result<Self> {
        if !(mass > 0.0) {
            return Err(Error::domain("mass must be > 0"));
        }
        if !(a_t > 0.0) {
            return Err(Error::domain("a_t must be > 0"));
        }
        Ok(Self { mass, potential, a_t, hbar: 1.0 })
    }

    pub fn with_hbar(mut self, hbar: f64) -> Result<Self> {
        if !(hbar > 0.0) {
            return Err(Error::domain("hbar must be > 0"));
        }
        self.hbar = hbar;
        Ok(self)
    }

    fn kinetic_coefficient(&self) -> f64 {
        self.mass / (2.0 * self.a_t)
    }

    fn evaluate(&self, x: &[f64]) -> f64 {
        let k = self.kinetic_coefficient();
        let kinetic: f64 = x.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() * k;
        let n = x.len();
        let interior: f64 = x[1..n - 1].iter().map(|&v| self.potential.eval(v)).sum();
        let ends = 0.5 * (self.potential.eval(x[0]) + self.potential.eval(x[n - 1]));
        kinetic + self.a_t * (interior + ends)
    }
}

fn check_spacing(path: &LatticePath, dynamics: &EuclideanAction) -> Result<()> {
    if (path.a_t - dynamics.a_t).abs() > 1e-12 * dynamics.a_t {
        return Err(Error::argument(format!(
            "path spacing {} differs from action spacing {}",
            path.a_t, dynamics.a_t
        )));
    }
    Ok(())
}

pub fn action(path: &LatticePath, dynamics: &EuclideanAction) -> Result<f64> {
    check_spacing(path, dynamics)?;
    Ok(dynamics.evaluate(&path.positions))
}

/// `|S(p1) - S(p2)|`, a pseudo-metric on paths.
pub fn path_distance(p1: &LatticePath, p2: &LatticePath, dynamics: &EuclideanAction) -> Result<f64> {
    if p1.len() != p2.len() || (p1.a_t - p2.a_t).abs() > 1e-12 * p1.a_t {
        return Err(Error::argument("paths live on different lattices"));
    }
    Ok((action(p1, dynamics)? - action(p2, dynamics)?).abs())
}
