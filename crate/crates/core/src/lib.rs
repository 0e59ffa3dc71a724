//! Seeded stochastic-dynamics laboratory.
//!
//! Every experiment draws its randomness from an [`RngStream`], addressed by
//! `(seed, stream_id)`, so any result can be replayed bit-for-bit. The
//! modules are independent experiment families sharing the statistics
//! utilities in [`stats`] and [`spectrum`].

pub mod diffusion;
pub mod error;
pub mod memory;
pub mod network;
pub mod paths;
pub mod potential;
pub mod quantum;
pub mod resonance;
pub mod rng;
pub mod sandpile;
pub mod search;
pub mod spectrum;
pub mod stats;

pub use error::{Error, Result};
pub use rng::RngStream;
