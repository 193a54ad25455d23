//! Tabular-regression benchmarking for NR-V2X quality-of-service
//! prediction: six regressor families implemented from first principles,
//! evaluated under leakage-free nested cross-validation with reported
//! MAE, RMSE and R2 per target.
//!
//! The `examples/` directory shows one runnable example per capability;
//! the `qosbench` binary wraps the runner module behind `run`, `synth`
//! and `report` subcommands.

pub mod cv;
pub mod dataset;
pub mod error;
pub mod metrics;
pub mod mlp;
pub mod model;
pub mod runner;
pub mod seed;
pub mod svr;
pub mod tree;

pub use error::{Error, Result};
