use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("empty sample: {0}")]
    EmptySample(String),

    #[error("degenerate marginals: annotators are constant but disagree")]
    DegenerateMarginals,

    #[error("summary has no term embeddable in either table")]
    UnembeddableSummary,

    #[error("out of vocabulary: {}", .0.join(", "))]
    OutOfVocabulary(Vec<String>),

    #[error("shape mismatch: expected {expected}, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("non-binary label {0}")]
    NonBinaryLabel(f64),

    #[error("loss became NaN at epoch {epoch}, batch {batch} (lr {lr})")]
    NanLoss { epoch: usize, batch: usize, lr: f64 },

    #[error("no distribution family converged on the sample")]
    Unfittable,

    #[error("degenerate sample: all {0} values are equal")]
    DegenerateSample(usize),

    #[error("fit for family {0} did not converge")]
    NotConverged(String),

    #[error("unknown player {0}")]
    UnknownPlayer(String),

    #[error("no model for {0}")]
    MissingModel(String),

    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(location: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Parse {
            location: location.into(),
            message: message.into(),
        }
    }

    /// Wraps an error with the pipeline stage that produced it.
    pub fn in_stage(self, stage: &'static str) -> Self {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }
}
