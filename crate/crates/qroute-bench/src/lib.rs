//! Benchmark harness: ensemble experiments over the routing engine, record
//! and aggregate schemas, crossover sweeps, and plot-ready report output.

pub mod config;
pub mod crossover;
pub mod report;
pub mod runner;
pub mod seeds;

pub use config::{Connectivity, ExperimentConfig, RouterKind, SweepMode};
pub use runner::{aggregate, run_experiment, write_outputs, AggregateRow, RunOutput, RunRecord};
