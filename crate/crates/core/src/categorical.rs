//! Exact categorical-distribution arithmetic: normalization, Bayes updates,
//! linear prediction through transition models, KL divergence, and expected
//! observation entropy (ambiguity).
//!
//! Everything here is a pure function over dense `f64` probability vectors.
//! Evidence integration is a single Bayes update and prediction is a single
//! matrix-vector product, so inference never iterates to convergence. All
//! work is done in probability space: the models this crate targets have at
//! most tens of states and horizons of a few dozen steps, well away from
//! underflow territory.

use crate::error::{Error, Result};

/// Tolerance used when validating that probabilities sum to one.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// A normalized probability distribution over a finite set of outcomes.
///
/// Invariants, checked at construction: every entry is non-negative and the
/// entries sum to one within [`NORMALIZATION_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct Categorical {
    probs: Vec<f64>,
}

impl Categorical {
    /// Builds a distribution from probabilities that must already be
    /// normalized.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution(
                "a distribution needs at least one outcome".into(),
            ));
        }
        if let Some(p) = probs.iter().find(|p| p.is_nan() || **p < 0.0) {
            return Err(Error::InvalidDistribution(format!(
                "negative or non-numeric probability {p}"
            )));
        }
        let drift = (probs.iter().sum::<f64>() - 1.0).abs();
        if drift.is_nan() || drift > NORMALIZATION_TOLERANCE {
            return Err(Error::InvalidDistribution(format!(
                "probabilities sum to {}, expected 1",
                probs.iter().sum::<f64>()
            )));
        }
        Ok(Self { probs })
    }

    /// Normalizes a vector of non-negative weights into a distribution.
    ///
    /// A zero-sum or negative input admits no normalization; it signals an
    /// event with probability zero under the model and is reported as
    /// [`Error::ImpossibleEvidence`].
    pub fn normalized(weights: &[f64]) -> Result<Self> {
        if weights.is_empty() || weights.iter().any(|w| w.is_nan() || *w < 0.0) {
            return Err(Error::ImpossibleEvidence);
        }
        let sum: f64 = weights.iter().sum();
        if !sum.is_finite() || sum <= 0.0 {
            return Err(Error::ImpossibleEvidence);
        }
        Ok(Self {
            probs: weights.iter().map(|w| w / sum).collect(),
        })
    }

    /// The uniform distribution over `len` outcomes.
    pub fn uniform(len: usize) -> Self {
        assert!(len > 0, "a distribution needs at least one outcome");
        Self {
            probs: vec![1.0 / len as f64; len],
        }
    }

    /// A distribution with all mass on a single outcome.
    pub fn one_hot(len: usize, outcome: usize) -> Self {
        assert!(
            outcome < len,
            "outcome {outcome} out of range for length {len}"
        );
        let mut probs = vec![0.0; len];
        probs[outcome] = 1.0;
        Self { probs }
    }

    /// Constructs from values already known to be normalized (outputs of the
    /// prediction operations, which preserve total mass analytically).
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!(
            (probs.iter().sum::<f64>() - 1.0).abs() < 1e-6,
            "internal construction from an unnormalized vector"
        );
        Self { probs }
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false // at least one outcome, by construction
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn prob(&self, outcome: usize) -> f64 {
        self.probs[outcome]
    }

    /// True when every entry is strictly positive.
    pub fn is_strictly_positive(&self) -> bool {
        self.probs.iter().all(|p| *p > 0.0)
    }
}

/// Kullback-Leibler divergence `Σ p_i ln(p_i / q_i)` in nats, with the
/// convention `0 ln 0 = 0`.
///
/// Returns [`Error::InfiniteDivergence`] when `q` has a zero where `p` is
/// positive. The result is clamped at zero: it is non-negative analytically
/// (Gibbs' inequality) and only rounding can push it below.
pub fn kl_divergence(p: &Categorical, q: &Categorical) -> Result<f64> {
    assert_eq!(p.len(), q.len(), "KL divergence over mismatched supports");
    let mut divergence = 0.0;
    for (outcome, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if pi == 0.0 {
            continue;
        }
        if qi == 0.0 {
            return Err(Error::InfiniteDivergence { outcome });
        }
        divergence += pi * (pi / qi).ln();
    }
    Ok(divergence.max(0.0))
}

/// Shannon entropy in nats of a probability slice, with `0 ln 0 = 0`.
fn entropy(probs: impl Iterator<Item = f64>) -> f64 {
    probs.filter(|p| *p > 0.0).map(|p| -p * p.ln()).sum()
}

/// The observation model `P(O|S)`: an `|O| x |S|` matrix whose column `s` is
/// the distribution over observations emitted from state `s`.
///
/// Invariants, checked at construction: every entry is non-negative and each
/// column sums to one within [`NORMALIZATION_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct LikelihoodMatrix {
    /// Row-major `n_observations x n_states`.
    entries: Vec<f64>,
    n_observations: usize,
    n_states: usize,
}

impl LikelihoodMatrix {
    /// Builds from observation rows: `rows[o][s] = P(O = o | S = s)`.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_observations = rows.len();
        if n_observations == 0 {
            return Err(Error::InvalidDistribution(
                "a likelihood matrix needs at least one observation row".into(),
            ));
        }
        let n_states = rows[0].len();
        if n_states == 0 {
            return Err(Error::InvalidDistribution(
                "a likelihood matrix needs at least one state column".into(),
            ));
        }
        let mut entries = Vec::with_capacity(n_observations * n_states);
        for (o, row) in rows.iter().enumerate() {
            if row.len() != n_states {
                return Err(Error::InvalidDistribution(format!(
                    "row {o} has {} entries, expected {n_states}",
                    row.len()
                )));
            }
            entries.extend_from_slice(row);
        }
        let matrix = Self {
            entries,
            n_observations,
            n_states,
        };
        for s in 0..n_states {
            validate_column(matrix.column(s), &format!("state column {s}"))?;
        }
        Ok(matrix)
    }

    /// The `n x n` identity: state `s` emits observation `s` with certainty.
    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|o| (0..n).map(|s| if o == s { 1.0 } else { 0.0 }).collect())
            .collect();
        Self::from_rows(rows).expect("identity columns are one-hot")
    }

    pub fn n_observations(&self) -> usize {
        self.n_observations
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn get(&self, observation: usize, state: usize) -> f64 {
        assert!(observation < self.n_observations && state < self.n_states);
        self.entries[observation * self.n_states + state]
    }

    fn row(&self, observation: usize) -> &[f64] {
        let start = observation * self.n_states;
        &self.entries[start..start + self.n_states]
    }

    fn column(&self, state: usize) -> impl Iterator<Item = f64> + '_ {
        (0..self.n_observations).map(move |o| self.entries[o * self.n_states + state])
    }

    /// Integrates the evidence carried by `observation` into `prior` via
    /// Bayes' theorem: the posterior is `P(o|s) prior(s)` renormalized.
    pub fn bayes_update(&self, observation: usize, prior: &Categorical) -> Result<Categorical> {
        assert!(
            observation < self.n_observations,
            "observation {observation} out of range"
        );
        assert_eq!(prior.len(), self.n_states, "prior has the wrong dimension");
        let weights: Vec<f64> = self
            .row(observation)
            .iter()
            .zip(prior.probs())
            .map(|(likelihood, p)| likelihood * p)
            .collect();
        Categorical::normalized(&weights)
    }

    /// Pushes state beliefs forward through the observation model:
    /// `B(O) = Σ_s P(O|s) B(s)`.
    pub fn predict_observation(&self, beliefs: &Categorical) -> Categorical {
        assert_eq!(
            beliefs.len(),
            self.n_states,
            "beliefs have the wrong dimension"
        );
        let probs = (0..self.n_observations)
            .map(|o| {
                self.row(o)
                    .iter()
                    .zip(beliefs.probs())
                    .map(|(likelihood, p)| likelihood * p)
                    .sum()
            })
            .collect();
        Categorical::from_normalized(probs)
    }

    /// Expected observation entropy under `beliefs`:
    /// `Σ_s B(s) H[P(O|s)]`, in nats. Zero exactly when every state the
    /// beliefs can reach emits a deterministic observation.
    pub fn ambiguity(&self, beliefs: &Categorical) -> f64 {
        assert_eq!(
            beliefs.len(),
            self.n_states,
            "beliefs have the wrong dimension"
        );
        (0..self.n_states)
            .map(|s| beliefs.prob(s) * entropy(self.column(s)))
            .sum()
    }
}

/// The transition model `P(S'|S,U)`: for each action `u`, an `|S| x |S|`
/// matrix whose column `s` is the successor distribution from state `s`.
///
/// Invariants, checked at construction: every entry is non-negative and each
/// `(state, action)` column sums to one within [`NORMALIZATION_TOLERANCE`].
#[derive(Debug, Clone, PartialEq)]
pub struct TransitionTensor {
    /// Indexed `[action][next_state][state]`, flattened row-major.
    entries: Vec<f64>,
    n_states: usize,
    n_actions: usize,
}

impl TransitionTensor {
    /// Builds from one matrix per action:
    /// `matrices[u][s'][s] = P(S' = s' | S = s, U = u)`.
    pub fn from_action_matrices(matrices: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let n_actions = matrices.len();
        if n_actions == 0 {
            return Err(Error::InvalidDistribution(
                "a transition tensor needs at least one action".into(),
            ));
        }
        let n_states = matrices[0].len();
        if n_states == 0 {
            return Err(Error::InvalidDistribution(
                "a transition tensor needs at least one state".into(),
            ));
        }
        let mut entries = Vec::with_capacity(n_actions * n_states * n_states);
        for (u, matrix) in matrices.iter().enumerate() {
            if matrix.len() != n_states {
                return Err(Error::InvalidDistribution(format!(
                    "action {u} has {} rows, expected {n_states}",
                    matrix.len()
                )));
            }
            for (next, row) in matrix.iter().enumerate() {
                if row.len() != n_states {
                    return Err(Error::InvalidDistribution(format!(
                        "action {u} row {next} has {} entries, expected {n_states}",
                        row.len()
                    )));
                }
                entries.extend_from_slice(row);
            }
        }
        let tensor = Self {
            entries,
            n_states,
            n_actions,
        };
        for u in 0..n_actions {
            for s in 0..n_states {
                validate_column(
                    (0..n_states).map(|next| tensor.get(next, s, u)),
                    &format!("column (state {s}, action {u})"),
                )?;
            }
        }
        Ok(tensor)
    }

    pub fn n_states(&self) -> usize {
        self.n_states
    }

    pub fn n_actions(&self) -> usize {
        self.n_actions
    }

    pub fn get(&self, next_state: usize, state: usize, action: usize) -> f64 {
        assert!(next_state < self.n_states && state < self.n_states && action < self.n_actions);
        self.entries[(action * self.n_states + next_state) * self.n_states + state]
    }

    /// The prediction phase of filtering: pushes beliefs one step forward
    /// through the chosen action's transition matrix,
    /// `B(S') = Σ_s P(S'|s,u) B(s)`. Total mass is preserved analytically.
    pub fn predict_state(&self, action: usize, beliefs: &Categorical) -> Categorical {
        assert!(action < self.n_actions, "action {action} out of range");
        assert_eq!(
            beliefs.len(),
            self.n_states,
            "beliefs have the wrong dimension"
        );
        let base = action * self.n_states * self.n_states;
        let probs = (0..self.n_states)
            .map(|next| {
                let row =
                    &self.entries[base + next * self.n_states..base + (next + 1) * self.n_states];
                row.iter().zip(beliefs.probs()).map(|(t, p)| t * p).sum()
            })
            .collect();
        Categorical::from_normalized(probs)
    }
}

fn validate_column(column: impl Iterator<Item = f64>, what: &str) -> Result<()> {
    let mut sum = 0.0;
    for value in column {
        if value.is_nan() || value < 0.0 {
            return Err(Error::InvalidDistribution(format!(
                "{what} has negative or non-numeric entry {value}"
            )));
        }
        sum += value;
    }
    let drift = (sum - 1.0).abs();
    if drift.is_nan() || drift > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "{what} sums to {sum}, expected 1"
        )));
    }
    Ok(())
}
