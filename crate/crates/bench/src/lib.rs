//! Benchmark harness for the btai planner: runs batches of deep-reward
//! trials, aggregates goal/bad/timeout rates and timings, and renders CSV or
//! markdown reports. The `btai-bench` binary is a thin CLI over this
//! library.

mod config;
mod error;
mod report;
mod runner;

pub use config::{
    BenchmarkSpec, ReportFormat, SpecOverrides, DEFAULT_EXPLORATION, DEFAULT_LENGTHS,
    DEFAULT_MAX_CYCLES, DEFAULT_M_BAD, DEFAULT_N_GOOD, DEFAULT_PLANNING_ITERATIONS,
    DEFAULT_PREFERENCE, DEFAULT_TRIALS,
};
pub use error::{BenchError, Result};
pub use report::{aggregate, emit_report, BenchmarkReport};
pub use runner::{build_agent_model, run_benchmark, run_trials};
