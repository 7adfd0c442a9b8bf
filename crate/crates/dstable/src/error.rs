use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A parameter is outside the range its family allows.
    #[error("{name} must lie in {range} for {context}")]
    Domain {
        name: &'static str,
        range: String,
        context: String,
    },
    #[error("branch cut reached: {0}")]
    Branch(String),
    #[error("did not converge: {0}")]
    NonConvergence(String),
    #[error("numerically unstable: {0}")]
    Instability(String),
    #[error("overflow: {0}")]
    Overflow(String),
    #[error("family mismatch: {0}")]
    FamilyMismatch(String),
    #[error("expected {expected} arguments, got {got}")]
    Dimension { expected: usize, got: usize },
    #[error("negative probability {value:e} at k = {k} ({context})")]
    NegativeMass { k: i64, value: f64, context: String },
    #[error("invalid distribution spec: {0}")]
    InvalidSpec(String),
    #[error("random walk exceeded the step cap of {0}")]
    StepCap(u64),
}

impl Error {
    pub(crate) fn domain(name: &'static str, range: &str, context: impl Into<String>) -> Self {
        Error::Domain {
            name,
            range: range.to_string(),
            context: context.into(),
        }
    }
}
