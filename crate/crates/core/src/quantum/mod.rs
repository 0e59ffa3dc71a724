//! Amplitude arithmetic and one-dimensional wave mechanics.
//!
//! Natural units `hbar = m = 1` are the defaults everywhere; both are
//! carried explicitly on [`WaveState`] and can be overridden.

mod amplitude;
mod decay;
mod levels;
mod slit;
mod wave;

pub use amplitude::{superpose, ComplexAmplitude, Superposition};
pub use decay::{decay_sample, DecayModel, DecayRun};
pub use levels::{ground_state, spectrum_gaps, spectrum_gaps_with, GroundState, Level, GAP_STABILITY};
pub use slit::{count_local_maxima, double_slit_pattern, SlitGeometry, SlitMode};
pub use wave::{evolve_free, uncertainty_product, wick_rotate_check, Grid, Uncertainty, WaveState, WickCheck};
