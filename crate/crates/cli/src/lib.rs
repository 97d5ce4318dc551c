//! Batch front end for the gawcga library: run, witness, check, modulus and sweep.

pub mod commands;
pub mod config;
pub mod error;
pub mod output;

pub use commands::{cmd_check, cmd_modulus, cmd_run, cmd_sweep, cmd_witness};
pub use config::{Overrides, RunConfig, WitnessConfig};
pub use error::CliError;
