//! Benchmark-level behavior: preference direction drives outcomes, and
//! repeated runs are bit-for-bit reproducible.

use std::time::Duration;

use btai::{build_model, AgentModel, Categorical, PlannerConfig, TrialOutcome};
use btai_bench::{aggregate, run_benchmark, run_trials, BenchmarkSpec, SpecOverrides};

fn spec_with(trials: usize, planning_iterations: usize) -> BenchmarkSpec {
    let flags = SpecOverrides {
        trials: Some(trials),
        planning_iterations: Some(planning_iterations),
        ..Default::default()
    };
    BenchmarkSpec::resolve(None, flags).unwrap()
}

#[test]
fn default_task_reaches_the_goal_every_trial() {
    let report = run_benchmark(&spec_with(5, 25)).unwrap();
    assert_eq!(report.p_goal, 1.0);
    assert_eq!(report.p_bad, 0.0);
    assert_eq!(report.p_timeout, 0.0);
    assert!(report.mean_cycle_planning_time > Duration::ZERO);
}

#[test]
fn inverted_preferences_chase_the_bad_state() {
    // swap the preference mass onto the unpleasant observation and run the
    // same aggregation path the benchmark uses
    let spec = spec_with(1, 25);
    let (a, b, c, d) = build_model(&spec.env, spec.preference_strength).unwrap();
    let inverted = Categorical::new(c.probs().iter().rev().cloned().collect()).unwrap();
    let planner = PlannerConfig {
        exploration_constant: spec.exploration_constant,
        planning_iterations: spec.planning_iterations,
    };
    let model = AgentModel::new(a, b, inverted, d, planner).unwrap();

    let trials = run_trials(&model, &spec.env, spec.trials, spec.max_cycles).unwrap();
    let report = aggregate(spec, trials, Duration::from_millis(1), true);
    assert_eq!(report.p_bad, 1.0);
    assert_eq!(report.p_goal, 0.0);
}

#[test]
fn starving_the_planner_walks_into_the_short_path_trap() {
    // one planning iteration sees one step ahead: both good paths tie and
    // the tie-break walks path 1, which dead-ends
    let report = run_benchmark(&spec_with(2, 1)).unwrap();
    assert_eq!(report.p_bad, 1.0);
}

#[test]
fn outcome_rates_are_reproducible_across_runs() {
    let spec = spec_with(4, 50);
    let first = run_benchmark(&spec).unwrap();
    let second = run_benchmark(&spec).unwrap();
    assert_eq!(first.p_goal, second.p_goal);
    assert_eq!(first.p_bad, second.p_bad);
    assert_eq!(first.p_timeout, second.p_timeout);
    for (a, b) in first.trials.iter().zip(&second.trials) {
        assert_eq!(a.outcome, b.outcome);
        assert_eq!(a.cycle_count(), b.cycle_count());
        let actions = |t: &btai::TrialResult| -> Vec<usize> {
            t.cycles.iter().map(|c| c.chosen_action).collect()
        };
        assert_eq!(actions(a), actions(b));
    }
}

#[test]
fn timeout_is_reported_when_cycles_cannot_reach_the_goal() {
    // the longest path needs 9 actions; 3 cycles cannot finish
    let flags = SpecOverrides {
        trials: Some(1),
        max_cycles: Some(3),
        ..Default::default()
    };
    let spec = BenchmarkSpec::resolve(None, flags).unwrap();
    let report = run_benchmark(&spec).unwrap();
    assert_eq!(report.p_timeout, 1.0);
    assert_eq!(report.trials[0].outcome, TrialOutcome::Timeout);
}
