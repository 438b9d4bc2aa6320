//! Runs one deep-reward trial and prints the outcome.

use btai::{build_model, AgentModel, DeepRewardConfig, DeepRewardEnv, PlannerConfig};

fn main() -> btai::Result<()> {
    let config = DeepRewardConfig::new(2, 5, vec![5, 8])?;
    let (a, b, c, d) = build_model(&config, 0.9)?;
    let planner = PlannerConfig {
        exploration_constant: 2.0,
        planning_iterations: 100,
    };
    let model = AgentModel::new(a, b, c, d, planner)?;

    let mut env = DeepRewardEnv::new(config);
    let result = model.run_trial(&mut env, 20)?;
    println!("{:?} after {} cycles", result.outcome, result.cycle_count());
    Ok(())
}
