//! The action-perception cycle.
//!
//! A trial alternates perception and planning: integrate the first
//! observation into the state prior, grow a planning tree for a fixed number
//! of iterations, execute the root child with the lowest average cost, then
//! re-root. Re-rooting pushes the old root beliefs through the executed
//! action's transition matrix (the empirical prior) and integrates the new
//! observation with one more Bayes update; the old tree is discarded
//! wholesale. Nothing here is stochastic: on a deterministic environment two
//! runs produce identical action sequences.

use std::time::{Duration, Instant};

use crate::categorical::{Categorical, LikelihoodMatrix, TransitionTensor};
use crate::error::{Error, Result};
use crate::tree::{PlannerConfig, Tree};

/// Terminal status reported by an environment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EnvStatus {
    Ongoing,
    Goal,
    Bad,
}

/// A discrete environment the agent can act in. Observations and actions are
/// dense indices matching the model's observation and action spaces.
pub trait Environment {
    /// Restarts the trial and returns the initial observation.
    fn reset(&mut self) -> usize;
    /// Performs an action and returns the resulting observation.
    fn execute(&mut self, action: usize) -> usize;
    fn status(&self) -> EnvStatus;
    fn observation_count(&self) -> usize;
    fn action_count(&self) -> usize;
}

/// A complete generative model plus planner configuration.
///
/// Dimensions are validated once here, so the planning and filtering
/// operations can index freely.
#[derive(Debug, Clone)]
pub struct AgentModel {
    likelihood: LikelihoodMatrix,
    transitions: TransitionTensor,
    preferences: Categorical,
    initial_prior: Categorical,
    planner: PlannerConfig,
}

impl AgentModel {
    pub fn new(
        likelihood: LikelihoodMatrix,
        transitions: TransitionTensor,
        preferences: Categorical,
        initial_prior: Categorical,
        planner: PlannerConfig,
    ) -> Result<Self> {
        if transitions.n_states() != likelihood.n_states() {
            return Err(Error::InvalidConfiguration(format!(
                "transition tensor covers {} states but the likelihood has {}",
                transitions.n_states(),
                likelihood.n_states()
            )));
        }
        if initial_prior.len() != likelihood.n_states() {
            return Err(Error::InvalidConfiguration(format!(
                "initial prior covers {} states but the likelihood has {}",
                initial_prior.len(),
                likelihood.n_states()
            )));
        }
        if preferences.len() != likelihood.n_observations() {
            return Err(Error::InvalidConfiguration(format!(
                "preferences cover {} observations but the likelihood has {}",
                preferences.len(),
                likelihood.n_observations()
            )));
        }
        if !preferences.is_strictly_positive() {
            return Err(Error::InvalidConfiguration(
                "preferences must be strictly positive to keep divergences finite".into(),
            ));
        }
        if planner.planning_iterations == 0 {
            return Err(Error::InvalidConfiguration(
                "planning_iterations must be at least 1".into(),
            ));
        }
        if !planner.exploration_constant.is_finite() || planner.exploration_constant < 0.0 {
            return Err(Error::InvalidConfiguration(format!(
                "exploration_constant must be a finite non-negative number, got {}",
                planner.exploration_constant
            )));
        }
        Ok(Self {
            likelihood,
            transitions,
            preferences,
            initial_prior,
            planner,
        })
    }

    pub fn likelihood(&self) -> &LikelihoodMatrix {
        &self.likelihood
    }

    pub fn transitions(&self) -> &TransitionTensor {
        &self.transitions
    }

    pub fn preferences(&self) -> &Categorical {
        &self.preferences
    }

    pub fn initial_prior(&self) -> &Categorical {
        &self.initial_prior
    }

    pub fn planner(&self) -> &PlannerConfig {
        &self.planner
    }

    pub fn n_states(&self) -> usize {
        self.likelihood.n_states()
    }

    pub fn n_observations(&self) -> usize {
        self.likelihood.n_observations()
    }

    pub fn n_actions(&self) -> usize {
        self.transitions.n_actions()
    }

    /// Integrates the first observation into the initial state prior and
    /// wraps the posterior in a fresh planning tree.
    pub fn perceive_initial(&self, observation: usize) -> Result<Tree> {
        let beliefs = self
            .likelihood
            .bayes_update(observation, &self.initial_prior)?;
        Ok(Tree::new(beliefs, None))
    }

    /// Runs the configured number of planning iterations on `tree` and
    /// returns the best root action. The tree may already contain earlier
    /// iterations; planning just continues.
    pub fn plan(&self, tree: &mut Tree) -> Result<usize> {
        for _ in 0..self.planner.planning_iterations {
            let leaf = tree.select(self.planner.exploration_constant);
            tree.expand(leaf, &self.transitions, &self.likelihood, &self.preferences)?;
            tree.backpropagate(leaf);
        }
        tree.best_action()
    }

    /// Re-roots after acting: predicts the old root beliefs through the
    /// executed action (the empirical prior), integrates the new
    /// observation, and returns a fresh single-node tree. The old tree is
    /// dropped by the caller; no subtree is reused.
    pub fn transition_root(&self, tree: &Tree, action: usize, observation: usize) -> Result<Tree> {
        let old_beliefs = tree.node(tree.root()).beliefs();
        let empirical_prior = self.transitions.predict_state(action, old_beliefs);
        let beliefs = self
            .likelihood
            .bayes_update(observation, &empirical_prior)?;
        Ok(Tree::new(beliefs, Some(action)))
    }

    /// Runs one trial: perception, then up to `max_cycles` plan/act/re-root
    /// cycles, stopping early when the environment reports a terminal state.
    /// The environment is reset first.
    pub fn run_trial<E: Environment>(&self, env: &mut E, max_cycles: usize) -> Result<TrialResult> {
        self.run_trial_observed(env, max_cycles, |_, _| {})
    }

    /// [`run_trial`](Self::run_trial) with a hook called after each cycle's
    /// planning finishes, receiving the cycle index and the finished tree.
    /// Used for tracing; the hook cannot influence the trial.
    pub fn run_trial_observed<E, F>(
        &self,
        env: &mut E,
        max_cycles: usize,
        mut observer: F,
    ) -> Result<TrialResult>
    where
        E: Environment,
        F: FnMut(usize, &Tree),
    {
        if env.action_count() != self.n_actions() {
            return Err(Error::InvalidConfiguration(format!(
                "environment has {} actions but the model has {}",
                env.action_count(),
                self.n_actions()
            )));
        }
        if env.observation_count() != self.n_observations() {
            return Err(Error::InvalidConfiguration(format!(
                "environment has {} observations but the model has {}",
                env.observation_count(),
                self.n_observations()
            )));
        }

        let first_observation = env.reset();
        let mut tree = self.perceive_initial(first_observation)?;
        let mut cycles = Vec::new();
        let mut outcome = TrialOutcome::Timeout;

        for cycle_index in 0..max_cycles {
            // wall-clock time of tree growth and action selection only;
            // environment stepping is excluded
            let planning_started = Instant::now();
            let chosen_action = self.plan(&mut tree)?;
            let planning_duration = planning_started.elapsed();
            observer(cycle_index, &tree);

            let observation = env.execute(chosen_action);
            cycles.push(CycleRecord {
                cycle_index,
                observation,
                chosen_action,
                root_beliefs: tree.node(tree.root()).beliefs().clone(),
                planning_duration,
            });

            match env.status() {
                EnvStatus::Goal => {
                    outcome = TrialOutcome::Goal;
                    break;
                }
                EnvStatus::Bad => {
                    outcome = TrialOutcome::Bad;
                    break;
                }
                EnvStatus::Ongoing => {
                    tree = self.transition_root(&tree, chosen_action, observation)?;
                }
            }
        }

        Ok(TrialResult { outcome, cycles })
    }
}

/// How a trial ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    /// The goal state was reached.
    Goal,
    /// The bad state was reached.
    Bad,
    /// The cycle budget ran out with the environment still ongoing.
    Timeout,
}

/// What happened during one action-perception cycle.
#[derive(Debug, Clone)]
pub struct CycleRecord {
    pub cycle_index: usize,
    /// Observation received after executing the chosen action.
    pub observation: usize,
    pub chosen_action: usize,
    /// Root beliefs the plan was made from.
    pub root_beliefs: Categorical,
    /// Wall-clock time spent planning this cycle.
    pub planning_duration: Duration,
}

/// Outcome and per-cycle records of one trial.
#[derive(Debug, Clone)]
pub struct TrialResult {
    pub outcome: TrialOutcome,
    pub cycles: Vec<CycleRecord>,
}

impl TrialResult {
    pub fn cycle_count(&self) -> usize {
        self.cycles.len()
    }

    /// Total wall-clock planning time across all cycles.
    pub fn total_planning(&self) -> Duration {
        self.cycles.iter().map(|c| c.planning_duration).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::deep_reward::{build_model, DeepRewardConfig, DeepRewardEnv, StateLabel, PLEASANT};
    use approx::assert_abs_diff_eq;

    fn cat(probs: &[f64]) -> Categorical {
        Categorical::new(probs.to_vec()).unwrap()
    }

    fn planner(iterations: usize) -> PlannerConfig {
        PlannerConfig {
            exploration_constant: 2.0,
            planning_iterations: iterations,
        }
    }

    fn deep_reward_model(
        n_good: usize,
        m_bad: usize,
        lengths: Vec<usize>,
        iterations: usize,
    ) -> (AgentModel, DeepRewardEnv) {
        let config = DeepRewardConfig::new(n_good, m_bad, lengths).unwrap();
        let (a, b, c, d) = build_model(&config, 0.9).unwrap();
        let model = AgentModel::new(a, b, c, d, planner(iterations)).unwrap();
        (model, DeepRewardEnv::new(config))
    }

    #[test]
    fn model_validation_catches_mismatches() {
        let a = LikelihoodMatrix::identity(2);
        let b = TransitionTensor::from_action_matrices(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
            .unwrap();

        // state count mismatch between prior and likelihood
        let bad_prior = AgentModel::new(
            a.clone(),
            b.clone(),
            cat(&[0.5, 0.5]),
            cat(&[0.2, 0.3, 0.5]),
            planner(1),
        );
        assert!(matches!(bad_prior, Err(Error::InvalidConfiguration(_))));

        // zero preference mass is rejected up front
        let zero_preference = AgentModel::new(
            a.clone(),
            b.clone(),
            cat(&[1.0, 0.0]),
            cat(&[0.5, 0.5]),
            planner(1),
        );
        assert!(matches!(
            zero_preference,
            Err(Error::InvalidConfiguration(_))
        ));

        // planner sanity
        let no_iterations = AgentModel::new(
            a.clone(),
            b.clone(),
            cat(&[0.5, 0.5]),
            cat(&[0.5, 0.5]),
            PlannerConfig {
                exploration_constant: 2.0,
                planning_iterations: 0,
            },
        );
        assert!(matches!(no_iterations, Err(Error::InvalidConfiguration(_))));

        let negative_exploration = AgentModel::new(
            a,
            b,
            cat(&[0.5, 0.5]),
            cat(&[0.5, 0.5]),
            PlannerConfig {
                exploration_constant: -1.0,
                planning_iterations: 1,
            },
        );
        assert!(matches!(
            negative_exploration,
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn perceive_initial_examples() {
        // deep-reward: one-hot prior and deterministic likelihood collapse
        // onto the initial state
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 1);
        let tree = model.perceive_initial(PLEASANT).unwrap();
        let root = tree.node(tree.root());
        assert_eq!(root.beliefs().prob(0), 1.0);
        assert_eq!(root.action(), None);
        assert_eq!(root.cost_aggregate(), 0.0);
        assert_eq!(root.visits(), 1);

        // exact likelihood pins the state named by the observation
        let exact = AgentModel::new(
            LikelihoodMatrix::identity(2),
            TransitionTensor::from_action_matrices(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
                .unwrap(),
            cat(&[0.5, 0.5]),
            cat(&[0.3, 0.7]),
            planner(1),
        )
        .unwrap();
        let tree = exact.perceive_initial(1).unwrap();
        assert_eq!(tree.node(tree.root()).beliefs().probs(), &[0.0, 1.0]);

        // uninformative likelihood leaves the prior untouched
        let flat = AgentModel::new(
            LikelihoodMatrix::from_rows(vec![vec![0.5, 0.5], vec![0.5, 0.5]]).unwrap(),
            TransitionTensor::from_action_matrices(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
                .unwrap(),
            cat(&[0.5, 0.5]),
            cat(&[0.3, 0.7]),
            planner(1),
        )
        .unwrap();
        let tree = flat.perceive_initial(0).unwrap();
        assert_abs_diff_eq!(
            tree.node(tree.root()).beliefs().prob(0),
            0.3,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            tree.node(tree.root()).beliefs().prob(1),
            0.7,
            epsilon = 1e-12
        );
    }

    #[test]
    fn perceive_initial_impossible_evidence() {
        let model = AgentModel::new(
            LikelihoodMatrix::identity(2),
            TransitionTensor::from_action_matrices(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
                .unwrap(),
            cat(&[0.5, 0.5]),
            cat(&[1.0, 0.0]),
            planner(1),
        )
        .unwrap();
        assert_eq!(
            model.perceive_initial(1).map(|_| ()),
            Err(Error::ImpossibleEvidence)
        );
    }

    #[test]
    fn single_iteration_plan_structure() {
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 1);
        let mut tree = model.perceive_initial(PLEASANT).unwrap();
        let action = model.plan(&mut tree).unwrap();

        let root = tree.node(tree.root());
        assert_eq!(root.children().len(), 7);
        assert_eq!(root.visits(), 2);
        // one iteration only sees one step ahead: both good paths tie on
        // expected free energy and the tie breaks to action 0
        assert_eq!(action, 0);
    }

    #[test]
    fn plan_continues_on_a_partially_planned_tree() {
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 10);
        let mut tree = model.perceive_initial(PLEASANT).unwrap();
        model.plan(&mut tree).unwrap();
        model.plan(&mut tree).unwrap();
        assert_eq!(tree.node(tree.root()).visits(), 21);
        assert_eq!(tree.node_count(), 1 + 20 * 7);
    }

    #[test]
    fn plan_picks_the_longest_path_in_both_reference_tasks() {
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 25);
        let mut tree = model.perceive_initial(PLEASANT).unwrap();
        assert_eq!(model.plan(&mut tree).unwrap(), 1);

        let (model, _) = deep_reward_model(3, 5, vec![6, 5, 8], 100);
        let mut tree = model.perceive_initial(PLEASANT).unwrap();
        assert_eq!(model.plan(&mut tree).unwrap(), 2);
    }

    #[test]
    fn transition_root_arithmetic() {
        let model = AgentModel::new(
            LikelihoodMatrix::from_rows(vec![vec![0.8, 0.2], vec![0.2, 0.8]]).unwrap(),
            TransitionTensor::from_action_matrices(vec![vec![vec![0.9, 0.3], vec![0.1, 0.7]]])
                .unwrap(),
            cat(&[0.5, 0.5]),
            cat(&[0.5, 0.5]),
            planner(1),
        )
        .unwrap();
        let tree = Tree::new(cat(&[0.5, 0.5]), None);
        let new_tree = model.transition_root(&tree, 0, 0).unwrap();
        let root = new_tree.node(new_tree.root());
        // empirical prior [0.6, 0.4], numerator [0.48, 0.08]
        assert_abs_diff_eq!(root.beliefs().prob(0), 0.857143, epsilon = 1e-6);
        assert_abs_diff_eq!(root.beliefs().prob(1), 0.142857, epsilon = 1e-6);
        assert_eq!(root.action(), Some(0));
        assert_eq!(root.visits(), 1);
        assert_eq!(root.cost_aggregate(), 0.0);
        assert!(root.is_leaf());
    }

    #[test]
    fn transition_root_deterministic_chain() {
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 1);
        let tree = model.perceive_initial(PLEASANT).unwrap();
        let new_tree = model.transition_root(&tree, 1, PLEASANT).unwrap();
        let expected = DeepRewardConfig::new(2, 5, vec![5, 8])
            .unwrap()
            .state_index(StateLabel::Path { path: 2, depth: 1 });
        assert_eq!(new_tree.node(new_tree.root()).beliefs().prob(expected), 1.0);
    }

    #[test]
    fn transition_root_identity_slices_pin_the_observed_state() {
        let model = AgentModel::new(
            LikelihoodMatrix::identity(2),
            TransitionTensor::from_action_matrices(vec![vec![vec![1.0, 0.0], vec![0.0, 1.0]]])
                .unwrap(),
            cat(&[0.5, 0.5]),
            cat(&[0.5, 0.5]),
            planner(1),
        )
        .unwrap();
        let tree = Tree::new(cat(&[0.4, 0.6]), None);
        let new_tree = model.transition_root(&tree, 0, 1).unwrap();
        assert_eq!(
            new_tree.node(new_tree.root()).beliefs().probs(),
            &[0.0, 1.0]
        );
    }

    #[test]
    fn run_trial_reaches_the_goal() {
        let (model, mut env) = deep_reward_model(2, 5, vec![5, 8], 25);
        let result = model.run_trial(&mut env, 20).unwrap();
        assert_eq!(result.outcome, TrialOutcome::Goal);
        // entering the path, walking it, and one final step to the goal
        assert_eq!(result.cycle_count(), 9);
        let actions: Vec<usize> = result.cycles.iter().map(|c| c.chosen_action).collect();
        assert_eq!(&actions[..8], &[1; 8]);
    }

    #[test]
    fn run_trial_with_inverted_preferences_chases_the_bad_state() {
        let config = DeepRewardConfig::new(2, 5, vec![5, 8]).unwrap();
        let (a, b, c, d) = build_model(&config, 0.9).unwrap();
        // swap the preference mass onto the unpleasant observation
        let inverted = Categorical::new(c.probs().iter().rev().cloned().collect()).unwrap();
        let model = AgentModel::new(a, b, inverted, d, planner(25)).unwrap();
        let mut env = DeepRewardEnv::new(config);
        let result = model.run_trial(&mut env, 20).unwrap();
        assert_eq!(result.outcome, TrialOutcome::Bad);
        assert_eq!(result.cycle_count(), 1);
    }

    #[test]
    fn tied_longest_paths_still_reach_the_goal() {
        // with a tie every longest path ends at the goal, so the tie-broken
        // choice of path 1 wins anyway
        let (model, mut env) = deep_reward_model(2, 1, vec![3, 3], 20);
        let result = model.run_trial(&mut env, 20).unwrap();
        assert_eq!(result.outcome, TrialOutcome::Goal);
        assert_eq!(result.cycle_count(), 4);
        assert_eq!(result.cycles[0].chosen_action, 0);
    }

    #[test]
    fn run_trial_with_zero_cycles_times_out() {
        let (model, mut env) = deep_reward_model(2, 5, vec![5, 8], 25);
        let result = model.run_trial(&mut env, 0).unwrap();
        assert_eq!(result.outcome, TrialOutcome::Timeout);
        assert_eq!(result.cycle_count(), 0);
    }

    #[test]
    fn run_trial_rejects_mismatched_environment() {
        let (model, _) = deep_reward_model(2, 5, vec![5, 8], 1);
        let mut other_env = DeepRewardEnv::new(DeepRewardConfig::new(3, 5, vec![6, 5, 8]).unwrap());
        assert!(matches!(
            model.run_trial(&mut other_env, 20),
            Err(Error::InvalidConfiguration(_))
        ));
    }

    #[test]
    fn trials_are_deterministic() {
        let (model, mut env) = deep_reward_model(3, 5, vec![6, 5, 8], 50);
        let first = model.run_trial(&mut env, 20).unwrap();
        let second = model.run_trial(&mut env, 20).unwrap();
        assert_eq!(first.outcome, second.outcome);
        assert_eq!(first.cycle_count(), second.cycle_count());
        for (a, b) in first.cycles.iter().zip(&second.cycles) {
            assert_eq!(a.chosen_action, b.chosen_action);
            assert_eq!(a.observation, b.observation);
            assert_eq!(a.root_beliefs.probs(), b.root_beliefs.probs());
        }
    }

    #[test]
    fn root_beliefs_track_the_true_state_exactly() {
        let config = DeepRewardConfig::new(2, 5, vec![5, 8]).unwrap();
        let (a, b, c, d) = build_model(&config, 0.9).unwrap();
        let model = AgentModel::new(a, b, c, d, planner(25)).unwrap();
        let mut env = DeepRewardEnv::new(config);

        let first_observation = env.reset();
        let mut tree = model.perceive_initial(first_observation).unwrap();
        assert_eq!(
            tree.node(tree.root()).beliefs().prob(env.current_state()),
            1.0
        );

        loop {
            let action = model.plan(&mut tree).unwrap();
            let observation = env.execute(action);
            if env.status() != EnvStatus::Ongoing {
                break;
            }
            tree = model.transition_root(&tree, action, observation).unwrap();
            // beliefs sum to one and sit entirely on the environment's state
            let beliefs = tree.node(tree.root()).beliefs();
            assert_abs_diff_eq!(beliefs.probs().iter().sum::<f64>(), 1.0, epsilon = 1e-9);
            assert_eq!(beliefs.prob(env.current_state()), 1.0);
        }
        assert_eq!(env.status(), EnvStatus::Goal);
    }

    #[test]
    fn planning_allocates_exactly_the_budgeted_nodes_each_cycle() {
        let (model, mut env) = deep_reward_model(2, 5, vec![5, 8], 25);
        let mut node_counts = Vec::new();
        model
            .run_trial_observed(&mut env, 20, |_, tree| node_counts.push(tree.node_count()))
            .unwrap();
        assert!(!node_counts.is_empty());
        for count in node_counts {
            assert_eq!(count, 1 + 25 * 7);
        }
    }
}
