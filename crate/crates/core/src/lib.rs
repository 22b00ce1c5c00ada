//! Building blocks for studying nonconvex stochastic optimization under
//! heavy-tailed gradient noise.
//!
//! The crate is `no_std` with `alloc`. It provides:
//!
//! * [`vector`]: dense vectors, norms, clipping and the normalized step.
//! * [`rng`]: seeded, counter-addressable random streams.
//! * [`noise`]: calibrated heavy-tailed noise families.
//! * [`instances`]: the zero-chain hard instance, the two-point instance and a
//!   quadratic benchmark, together with their stochastic oracles.
//! * [`optimizers`]: normalized, clipped and unnormalized momentum methods,
//!   baselines, and step-size schedules.
//! * [`verify`]: numerical checks of the structural properties everything
//!   above is expected to satisfy.
//! * [`analysis`]: log-log rate fits and quantile summaries.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` is used on purpose so that NaN parameters are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

pub mod analysis;
pub mod error;
pub mod instances;
pub mod math;
pub mod noise;
pub mod oracle;
pub mod optimizers;
pub mod rng;
pub mod vector;
pub mod verify;

pub use error::Error;
pub use oracle::{Objective, OracleSample, StochasticOracle};
pub use rng::RngStream;
pub use vector::{clip, norm, normalized_step, Vector};
