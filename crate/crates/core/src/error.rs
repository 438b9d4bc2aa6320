use thiserror::Error;

/// Error type shared by every module in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An observation had probability zero under the model: the Bayes
    /// numerator vanished, so no posterior exists.
    #[error("impossible evidence: the observation has probability zero under the model")]
    ImpossibleEvidence,

    /// The reference distribution assigns zero probability to an outcome the
    /// predicted distribution can produce, so the divergence is unbounded.
    /// Usually a sign of ill-formed prior preferences.
    #[error(
        "infinite divergence: outcome {outcome} is predicted but has zero reference probability"
    )]
    InfiniteDivergence { outcome: usize },

    /// A probability vector, matrix column, or tensor column failed
    /// validation (negative entry, or a sum away from one).
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    /// Mutually inconsistent, out-of-range, or otherwise unusable
    /// model/environment parameters.
    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    /// An action was requested from a tree whose root was never expanded.
    #[error("planning never ran: the root has no children to choose from")]
    PlanningNeverRan,
}

pub type Result<T> = std::result::Result<T, Error>;
