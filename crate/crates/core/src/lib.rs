//! Branching-time active inference with exact Bayesian filtering.
//!
//! A planner for discrete generative models that treats planning as growing
//! a tree over future belief states. Node beliefs are maintained by exact
//! categorical filtering (a Bayes update on new evidence, a matrix-vector
//! product for prediction: a single forward pass, never an iterative
//! optimization), selection is guided by UCT, and nodes are scored by
//! expected free energy: divergence from preferred observations plus
//! expected observation entropy.
//!
//! The crate ships four pieces:
//!
//! * [`categorical`]: distributions, likelihood matrices, transition
//!   tensors, and the filtering arithmetic on them;
//! * [`tree`]: the expandable planning tree with UCT selection, expansion by
//!   prediction, expected-free-energy evaluation, and cost backpropagation;
//! * [`agent`]: the action-perception cycle and trial runner over any
//!   [`agent::Environment`];
//! * [`deep_reward`]: the deep-reward benchmark task and its ground-truth
//!   model builder.
//!
//! ```
//! use btai::{
//!     build_model, AgentModel, DeepRewardConfig, DeepRewardEnv, PlannerConfig, TrialOutcome,
//! };
//!
//! let config = DeepRewardConfig::new(2, 5, vec![2, 3])?;
//! let (a, b, c, d) = build_model(&config, 0.9)?;
//! let planner = PlannerConfig { exploration_constant: 2.0, planning_iterations: 30 };
//! let model = AgentModel::new(a, b, c, d, planner)?;
//!
//! let mut env = DeepRewardEnv::new(config);
//! let result = model.run_trial(&mut env, 20)?;
//! assert_eq!(result.outcome, TrialOutcome::Goal);
//! # Ok::<(), btai::Error>(())
//! ```

pub mod agent;
pub mod categorical;
pub mod deep_reward;
mod error;
pub mod tree;

pub use agent::{AgentModel, CycleRecord, EnvStatus, Environment, TrialOutcome, TrialResult};
pub use categorical::{kl_divergence, Categorical, LikelihoodMatrix, TransitionTensor};
pub use deep_reward::{build_model, DeepRewardConfig, DeepRewardEnv, StateLabel};
pub use error::{Error, Result};
pub use tree::{expected_free_energy, uct_score, PlannerConfig, Tree};
