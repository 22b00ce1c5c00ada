//! Experiment harness on top of `htopt-core`: TOML configs, seeded runs over
//! a grid of budgets, CSV/JSON output and the `htopt` command line.

pub mod config;
pub mod error;
pub mod experiment;
pub mod io;
pub mod suites;

pub use config::ExperimentConfig;
pub use error::HarnessError;
pub use experiment::{run_experiment, sweep, RunRecord, SweepReport};
