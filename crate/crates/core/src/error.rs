use thiserror::Error;

/// Errors produced by bpa construction, combination, and the benchmark harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvidenceError {
    #[error("frame must have between 1 and 64 elements, got {0}")]
    FrameSize(usize),
    #[error(
        "invalid frame label `{0}`: labels must be nonempty and free of whitespace, `,` and `#`"
    )]
    InvalidLabel(String),
    #[error("duplicate frame label `{0}`")]
    DuplicateLabel(String),
    #[error("unknown frame element `{0}`")]
    UnknownElement(String),
    #[error("focal set contains elements outside the frame")]
    OutOfFrame,
    #[error("the empty set cannot carry positive mass")]
    EmptyFocalSet,
    #[error("mass {0} is not a finite non-negative number")]
    InvalidMass(f64),
    #[error("masses sum to {sum}, expected 1")]
    MassNotNormalized { sum: f64 },
    #[error("operands are defined over different frames")]
    FrameMismatch,
    #[error("total conflict: the sources share no common ground (conflict mass {conflict})")]
    TotalConflict { conflict: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}
