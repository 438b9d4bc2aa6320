use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use btai_bench::{emit_report, run_benchmark, BenchmarkSpec, ReportFormat, SpecOverrides};

/// Deep-reward benchmark runner for the btai planner.
#[derive(Debug, Parser)]
#[command(name = "btai-bench", version, about)]
struct Cli {
    /// Configuration file with `key = value` lines; flags override it.
    #[arg(long, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Number of good paths.
    #[arg(long = "n-good", value_name = "N")]
    n_good: Option<usize>,

    /// Number of bad actions from every state.
    #[arg(long = "m-bad", value_name = "M")]
    m_bad: Option<usize>,

    /// Comma-separated good-path lengths, e.g. `5,8`.
    #[arg(long, value_name = "L1,L2,..", value_delimiter = ',')]
    lengths: Option<Vec<usize>>,

    /// Planning iterations per action-perception cycle.
    #[arg(long = "planning-iters", value_name = "N")]
    planning_iters: Option<usize>,

    /// Maximum action-perception cycles per trial.
    #[arg(long = "cycles", value_name = "M")]
    cycles: Option<usize>,

    /// Number of independent trials.
    #[arg(long, value_name = "N")]
    trials: Option<usize>,

    /// UCT exploration constant.
    #[arg(long, value_name = "C")]
    exploration: Option<f64>,

    /// Preference mass on the pleasant observation, strictly between 0.5
    /// and 1.
    #[arg(long, value_name = "P")]
    preference: Option<f64>,

    /// Report format.
    #[arg(long, value_name = "csv|markdown", default_value = "csv")]
    format: ReportFormat,

    /// Write the first trial's first planning tree to PATH as DOT text.
    #[arg(long, value_name = "PATH")]
    trace: Option<PathBuf>,

    /// Run trials on multiple threads; timings become non-comparable.
    #[arg(long)]
    parallel: bool,
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> btai_bench::Result<()> {
    let file = match &cli.config {
        Some(path) => Some(SpecOverrides::from_file(path)?),
        None => None,
    };
    let flags = SpecOverrides {
        n_good: cli.n_good,
        m_bad: cli.m_bad,
        lengths: cli.lengths,
        planning_iterations: cli.planning_iters,
        max_cycles: cli.cycles,
        trials: cli.trials,
        exploration_constant: cli.exploration,
        preference_strength: cli.preference,
        trace_path: cli.trace,
    };
    let mut spec = BenchmarkSpec::resolve(file, flags)?;
    spec.parallel = cli.parallel;

    if !spec.env.has_unique_longest() {
        eprintln!(
            "warning: several good paths tie for longest; each of them reaches the goal, \
             which makes the task easier than intended"
        );
    }
    if spec.parallel {
        eprintln!("warning: trials run in parallel; timings are not comparable to sequential runs");
    }

    let report = run_benchmark(&spec)?;
    print!("{}", emit_report(&report, cli.format));
    Ok(())
}
