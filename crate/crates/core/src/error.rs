use std::fmt;

/// Errors surfaced by coders, channel models and samplers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// A pmf does not sum to one or has an entry outside [0, 1].
    NotNormalized(String),
    /// A value is outside the domain of the operation.
    Domain(String),
    /// A symbol with zero frequency was pushed, or a table is unusable.
    Coding(String),
    /// A pop ran out of pad bits; the caller must enlarge the pad.
    RandomnessUnderflow,
    /// Two streams with different pad constructions were compared.
    PadMismatch,
    /// A sampler exceeded its step budget.
    BudgetExceeded { steps: u64 },
    /// An internal invariant was violated (fatal; indicates a model bug
    /// or encoder/decoder divergence).
    Invariant(String),
    /// A channel configuration is invalid.
    Config(String),
    /// A serialized stream is malformed.
    MalformedStream(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NotNormalized(msg) => write!(f, "pmf not normalized: {msg}"),
            Error::Domain(msg) => write!(f, "domain error: {msg}"),
            Error::Coding(msg) => write!(f, "coding error: {msg}"),
            Error::RandomnessUnderflow => write!(f, "randomness underflow: pad exhausted"),
            Error::PadMismatch => write!(f, "streams built from different pad seeds"),
            Error::BudgetExceeded { steps } => write!(f, "step budget exceeded after {steps} steps"),
            Error::Invariant(msg) => write!(f, "invariant violation: {msg}"),
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::MalformedStream(msg) => write!(f, "malformed stream: {msg}"),
        }
    }
}

impl std::error::Error for Error {}
