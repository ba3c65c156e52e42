//! Configuration, sweep orchestration and CSV output behind the `nv-cycle`
//! binary.

pub mod config;
pub mod sweep;
pub mod units;

pub use config::RunConfig;
pub use sweep::{run_sweep, SweepResult};
