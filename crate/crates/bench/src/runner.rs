//! Trial execution: builds the model once, runs independent trials, and
//! aggregates them into a report.

use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::thread;
use std::time::Instant;

use btai::{build_model, AgentModel, DeepRewardConfig, DeepRewardEnv, PlannerConfig, TrialResult};

use crate::config::BenchmarkSpec;
use crate::error::Result;
use crate::report::{aggregate, BenchmarkReport};

/// Runs a full benchmark: one model build, `spec.trials` independent trials,
/// outcome aggregation. With `spec.trace_path` set, the first cycle's
/// finished planning tree from the first trial is written out as DOT text.
pub fn run_benchmark(spec: &BenchmarkSpec) -> Result<BenchmarkReport> {
    spec.validate()?;
    let model = build_agent_model(spec)?;

    let started = Instant::now();

    // the first trial always runs on this thread so the trace hook has a
    // stable target
    let mut trace_dot = None;
    let mut results = Vec::with_capacity(spec.trials);
    {
        let mut env = DeepRewardEnv::new(spec.env.clone());
        let result = if spec.trace_path.is_some() {
            model.run_trial_observed(&mut env, spec.max_cycles, |cycle, tree| {
                if cycle == 0 {
                    trace_dot = Some(tree.to_dot());
                }
            })?
        } else {
            model.run_trial(&mut env, spec.max_cycles)?
        };
        results.push(result);
    }

    let remaining = spec.trials - 1;
    if spec.parallel {
        results.extend(run_trials_parallel(
            &model,
            &spec.env,
            remaining,
            spec.max_cycles,
        )?);
    } else {
        for _ in 0..remaining {
            let mut env = DeepRewardEnv::new(spec.env.clone());
            results.push(model.run_trial(&mut env, spec.max_cycles)?);
        }
    }
    let total_runtime = started.elapsed();

    if let Some(path) = &spec.trace_path {
        let dot = trace_dot.expect("trial 0 planned at least one cycle");
        std::fs::write(path, dot)?;
    }

    Ok(aggregate(
        spec.clone(),
        results,
        total_runtime,
        !spec.parallel,
    ))
}

/// Builds the ground-truth model an agent plans with under this spec.
pub fn build_agent_model(spec: &BenchmarkSpec) -> Result<AgentModel> {
    let (a, b, c, d) = build_model(&spec.env, spec.preference_strength)?;
    let planner = PlannerConfig {
        exploration_constant: spec.exploration_constant,
        planning_iterations: spec.planning_iterations,
    };
    Ok(AgentModel::new(a, b, c, d, planner)?)
}

/// Runs `count` independent trials of `model` sequentially on the calling
/// thread. Exposed so callers can benchmark hand-built models (for example
/// with altered preferences) through the same path the benchmark uses.
pub fn run_trials(
    model: &AgentModel,
    env_config: &DeepRewardConfig,
    count: usize,
    max_cycles: usize,
) -> Result<Vec<TrialResult>> {
    let mut results = Vec::with_capacity(count);
    for _ in 0..count {
        let mut env = DeepRewardEnv::new(env_config.clone());
        results.push(model.run_trial(&mut env, max_cycles)?);
    }
    Ok(results)
}

/// Work-stealing parallel trial execution; each trial owns its environment
/// and runs on exactly one thread, so per-trial planning timings stay
/// self-consistent even though the batch wall clock does not.
fn run_trials_parallel(
    model: &AgentModel,
    env_config: &DeepRewardConfig,
    count: usize,
    max_cycles: usize,
) -> Result<Vec<TrialResult>> {
    let workers = thread::available_parallelism()
        .map(usize::from)
        .unwrap_or(1)
        .min(count.max(1));
    let next = AtomicUsize::new(0);
    let slots: Mutex<Vec<Option<btai::Result<TrialResult>>>> = Mutex::new(vec![None; count]);

    thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let index = next.fetch_add(1, Ordering::Relaxed);
                if index >= count {
                    break;
                }
                let mut env = DeepRewardEnv::new(env_config.clone());
                let result = model.run_trial(&mut env, max_cycles);
                slots.lock().expect("no panics hold this lock")[index] = Some(result);
            });
        }
    });

    slots
        .into_inner()
        .expect("all workers joined")
        .into_iter()
        .map(|slot| Ok(slot.expect("every index was claimed")?))
        .collect()
}
