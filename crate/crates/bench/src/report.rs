//! Aggregation of trial outcomes into a report, and its CSV/markdown
//! renderings.

use std::fmt::Write as _;
use std::time::Duration;

use btai::{TrialOutcome, TrialResult};

use crate::config::{BenchmarkSpec, ReportFormat};

/// Aggregated outcomes and timings of one benchmark run.
#[derive(Debug, Clone)]
pub struct BenchmarkReport {
    pub spec: BenchmarkSpec,
    /// Fraction of trials that reached the goal state.
    pub p_goal: f64,
    /// Fraction of trials that reached the bad state.
    pub p_bad: f64,
    /// Fraction of trials that ran out of cycles.
    pub p_timeout: f64,
    /// Wall-clock time of the whole trial loop.
    pub total_runtime: Duration,
    /// Mean planning time per action-perception cycle.
    pub mean_cycle_planning_time: Duration,
    pub trials: Vec<TrialResult>,
    /// False when trials ran in parallel; such timings cannot be compared
    /// against sequential runs.
    pub timing_comparable: bool,
}

/// Folds per-trial results into exact outcome ratios.
pub fn aggregate(
    spec: BenchmarkSpec,
    trials: Vec<TrialResult>,
    total_runtime: Duration,
    timing_comparable: bool,
) -> BenchmarkReport {
    assert!(!trials.is_empty(), "a benchmark runs at least one trial");
    let count = trials.len() as f64;
    let outcomes =
        |wanted: TrialOutcome| trials.iter().filter(|t| t.outcome == wanted).count() as f64 / count;

    let cycle_count: usize = trials.iter().map(TrialResult::cycle_count).sum();
    let planning_total: Duration = trials.iter().map(TrialResult::total_planning).sum();
    let mean_cycle_planning_time = if cycle_count == 0 {
        Duration::ZERO
    } else {
        planning_total / cycle_count as u32
    };

    BenchmarkReport {
        spec,
        p_goal: outcomes(TrialOutcome::Goal),
        p_bad: outcomes(TrialOutcome::Bad),
        p_timeout: outcomes(TrialOutcome::Timeout),
        total_runtime,
        mean_cycle_planning_time,
        trials,
        timing_comparable,
    }
}

/// Renders a report as CSV (fixed header, one data row) or as a markdown
/// table carrying the same numbers.
pub fn emit_report(report: &BenchmarkReport, format: ReportFormat) -> String {
    let spec = &report.spec;
    let lengths = spec
        .env
        .lengths()
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(";");
    let runtime = format!("{:.3}", report.total_runtime.as_secs_f64());

    match format {
        ReportFormat::Csv => format!(
            "n,m,lengths,planning_iters,p_goal,p_bad,p_timeout,runtime_seconds\n\
             {},{},{},{},{:.3},{:.3},{:.3},{}\n",
            spec.env.n_good(),
            spec.env.m_bad(),
            lengths,
            spec.planning_iterations,
            report.p_goal,
            report.p_bad,
            report.p_timeout,
            runtime,
        ),
        ReportFormat::Markdown => {
            let mut out = String::new();
            out.push_str(
                "| n | m | lengths | planning iterations | P(goal) | P(bad) | P(timeout) | runtime (s) |\n",
            );
            out.push_str(
                "|---|---|---------|---------------------|---------|--------|------------|-------------|\n",
            );
            writeln!(
                out,
                "| {} | {} | {} | {} | {:.3} | {:.3} | {:.3} | {} |",
                spec.env.n_good(),
                spec.env.m_bad(),
                lengths,
                spec.planning_iterations,
                report.p_goal,
                report.p_bad,
                report.p_timeout,
                runtime,
            )
            .expect("writing to a string cannot fail");
            if !report.timing_comparable {
                out.push_str(
                    "\ntrials ran in parallel; timings are not comparable to sequential runs\n",
                );
            }
            out
        }
    }
}
