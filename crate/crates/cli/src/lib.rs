//! Batch front end: resolves experiment parameters, runs seeded replicas
//! and records every output file in a manifest that can be replayed.

pub mod experiments;
pub mod output;
pub mod params;
pub mod run;

pub use run::{execute, rerun, resolve_request, Manifest, Request, RunConfig, RunError};
