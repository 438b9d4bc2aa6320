//! The deep-reward benchmark task and its ground-truth generative model.
//!
//! The environment is a tree-shaped graph. From the initial state the agent
//! chooses between `n` good paths and `m` bad actions. Each good path `k` is
//! a chain of `L_k` states that emit the pleasant observation, but at every
//! step only one of the `n + m` actions continues the chain; every other
//! action drops into the absorbing bad state, which emits the unpleasant
//! observation forever. Walking a good path to its end pays off only if that
//! path is the longest one: its final state then leads to the absorbing goal
//! state (pleasant forever) under every action, while shorter paths dead-end
//! into the bad state. Solving the task therefore requires looking at least
//! `max(L) + 1` steps ahead.
//!
//! All bad paths collapse into the single absorbing bad state: they are
//! indistinguishable in observations and consequences, and one state keeps
//! the model small.
//!
//! [`build_model`] produces the matching likelihood, transition, preference,
//! and initial-state tensors; environment and model share one transition
//! rule, so they agree exactly on every `(state, action)` pair.

use crate::agent::{EnvStatus, Environment};
use crate::categorical::{Categorical, LikelihoodMatrix, TransitionTensor};
use crate::error::{Error, Result};

/// Observation index for the pleasant outcome.
pub const PLEASANT: usize = 0;
/// Observation index for the unpleasant outcome.
pub const UNPLEASANT: usize = 1;

/// Parameters of the task: `n_good` path lengths plus `m_bad` decoy actions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeepRewardConfig {
    n_good: usize,
    m_bad: usize,
    lengths: Vec<usize>,
}

/// Symbolic name of a state, mapped to a dense index by
/// [`DeepRewardConfig::state_index`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateLabel {
    /// The root of the graph, where every trial starts.
    Initial,
    /// The absorbing bad state shared by all bad paths.
    Bad,
    /// The absorbing goal state at the end of the longest good path.
    Goal,
    /// The `depth`-th state of the `path`-th good path (both 1-based).
    Path { path: usize, depth: usize },
}

impl DeepRewardConfig {
    pub fn new(n_good: usize, m_bad: usize, lengths: Vec<usize>) -> Result<Self> {
        if n_good == 0 {
            return Err(Error::InvalidConfiguration(
                "n_good must be at least 1".into(),
            ));
        }
        if m_bad == 0 {
            return Err(Error::InvalidConfiguration(
                "m_bad must be at least 1".into(),
            ));
        }
        if lengths.len() != n_good {
            return Err(Error::InvalidConfiguration(format!(
                "lengths has {} entries but n_good is {n_good}",
                lengths.len()
            )));
        }
        if lengths.contains(&0) {
            return Err(Error::InvalidConfiguration(
                "every path length must be at least 1".into(),
            ));
        }
        Ok(Self {
            n_good,
            m_bad,
            lengths,
        })
    }

    pub fn n_good(&self) -> usize {
        self.n_good
    }

    pub fn m_bad(&self) -> usize {
        self.m_bad
    }

    pub fn lengths(&self) -> &[usize] {
        &self.lengths
    }

    pub fn max_length(&self) -> usize {
        *self.lengths.iter().max().expect("at least one path")
    }

    /// Whether exactly one path has maximal length. The task is well posed
    /// only in that case: with a tie, every longest path reaches the goal,
    /// and callers should surface a warning.
    pub fn has_unique_longest(&self) -> bool {
        let max = self.max_length();
        self.lengths.iter().filter(|l| **l == max).count() == 1
    }

    /// Total number of states: initial + bad + goal + all path states.
    pub fn state_count(&self) -> usize {
        3 + self.lengths.iter().sum::<usize>()
    }

    pub fn action_count(&self) -> usize {
        self.n_good + self.m_bad
    }

    pub fn observation_count(&self) -> usize {
        2
    }

    /// Dense state layout: 0 = initial, 1 = bad, 2 = goal, then the path
    /// states in path order and depth order.
    ///
    /// Panics on out-of-range path coordinates.
    pub fn state_index(&self, label: StateLabel) -> usize {
        match label {
            StateLabel::Initial => 0,
            StateLabel::Bad => 1,
            StateLabel::Goal => 2,
            StateLabel::Path { path, depth } => {
                assert!(
                    path >= 1 && path <= self.n_good,
                    "path {path} out of range 1..={}",
                    self.n_good
                );
                assert!(
                    depth >= 1 && depth <= self.lengths[path - 1],
                    "depth {depth} out of range 1..={} on path {path}",
                    self.lengths[path - 1]
                );
                3 + self.lengths[..path - 1].iter().sum::<usize>() + (depth - 1)
            }
        }
    }

    /// The symbolic name of a dense state index.
    pub fn state_label(&self, state: usize) -> StateLabel {
        assert!(state < self.state_count(), "state {state} out of range");
        match state {
            0 => StateLabel::Initial,
            1 => StateLabel::Bad,
            2 => StateLabel::Goal,
            _ => {
                let mut offset = state - 3;
                for (i, &length) in self.lengths.iter().enumerate() {
                    if offset < length {
                        return StateLabel::Path {
                            path: i + 1,
                            depth: offset + 1,
                        };
                    }
                    offset -= length;
                }
                unreachable!("state {state} below state_count but past all paths");
            }
        }
    }

    /// The deterministic transition rule shared by the environment and the
    /// model's transition tensor.
    ///
    /// Panics on an out-of-range action.
    pub fn successor(&self, state: usize, action: usize) -> usize {
        assert!(
            action < self.action_count(),
            "action {action} out of range 0..{}",
            self.action_count()
        );
        match self.state_label(state) {
            StateLabel::Bad => self.state_index(StateLabel::Bad),
            StateLabel::Goal => self.state_index(StateLabel::Goal),
            StateLabel::Initial => {
                if action < self.n_good {
                    self.state_index(StateLabel::Path {
                        path: action + 1,
                        depth: 1,
                    })
                } else {
                    self.state_index(StateLabel::Bad)
                }
            }
            StateLabel::Path { path, depth } => {
                let length = self.lengths[path - 1];
                if depth < length {
                    if action == path - 1 {
                        self.state_index(StateLabel::Path {
                            path,
                            depth: depth + 1,
                        })
                    } else {
                        self.state_index(StateLabel::Bad)
                    }
                } else if length == self.max_length() {
                    self.state_index(StateLabel::Goal)
                } else {
                    self.state_index(StateLabel::Bad)
                }
            }
        }
    }

    /// The observation a state emits: unpleasant only from the bad state.
    pub fn emitted_observation(&self, state: usize) -> usize {
        if state == self.state_index(StateLabel::Bad) {
            UNPLEASANT
        } else {
            PLEASANT
        }
    }
}

/// Builds the ground-truth generative model `(A, B, C, D)` for a task.
///
/// The likelihood and transitions are deterministic copies of the
/// environment rules. Preferences put `preference_strength` on the pleasant
/// observation, which must lie strictly between 0.5 and 1 so the agent
/// strictly prefers pleasant outcomes with finite divergences. The initial
/// state prior is one-hot on the initial state.
pub fn build_model(
    config: &DeepRewardConfig,
    preference_strength: f64,
) -> Result<(LikelihoodMatrix, TransitionTensor, Categorical, Categorical)> {
    if !(preference_strength > 0.5 && preference_strength < 1.0) {
        return Err(Error::InvalidConfiguration(format!(
            "preference_strength must lie strictly between 0.5 and 1, got {preference_strength}"
        )));
    }
    let n_states = config.state_count();

    let mut rows = vec![vec![0.0; n_states]; config.observation_count()];
    for state in 0..n_states {
        rows[config.emitted_observation(state)][state] = 1.0;
    }
    let a = LikelihoodMatrix::from_rows(rows)?;

    let mut matrices = vec![vec![vec![0.0; n_states]; n_states]; config.action_count()];
    for action in 0..config.action_count() {
        for state in 0..n_states {
            matrices[action][config.successor(state, action)][state] = 1.0;
        }
    }
    let b = TransitionTensor::from_action_matrices(matrices)?;

    let c = Categorical::new(vec![preference_strength, 1.0 - preference_strength])?;
    let d = Categorical::one_hot(n_states, config.state_index(StateLabel::Initial));
    Ok((a, b, c, d))
}

/// Current position in a trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvState {
    pub current: usize,
    pub status: EnvStatus,
}

/// A running instance of the task.
#[derive(Debug, Clone)]
pub struct DeepRewardEnv {
    config: DeepRewardConfig,
    current: usize,
}

impl DeepRewardEnv {
    /// Creates a freshly reset environment at the initial state.
    pub fn new(config: DeepRewardConfig) -> Self {
        Self { config, current: 0 }
    }

    pub fn config(&self) -> &DeepRewardConfig {
        &self.config
    }

    pub fn current_state(&self) -> usize {
        self.current
    }

    pub fn state(&self) -> EnvState {
        EnvState {
            current: self.current,
            status: self.status(),
        }
    }
}

impl Environment for DeepRewardEnv {
    /// Puts the agent back at the initial state and emits its observation.
    fn reset(&mut self) -> usize {
        self.current = self.config.state_index(StateLabel::Initial);
        self.config.emitted_observation(self.current)
    }

    /// Applies the transition rule and emits the new state's observation.
    /// Terminal states self-loop.
    fn execute(&mut self, action: usize) -> usize {
        self.current = self.config.successor(self.current, action);
        self.config.emitted_observation(self.current)
    }

    fn status(&self) -> EnvStatus {
        if self.current == self.config.state_index(StateLabel::Goal) {
            EnvStatus::Goal
        } else if self.current == self.config.state_index(StateLabel::Bad) {
            EnvStatus::Bad
        } else {
            EnvStatus::Ongoing
        }
    }

    fn observation_count(&self) -> usize {
        self.config.observation_count()
    }

    fn action_count(&self) -> usize {
        self.config.action_count()
    }
}
