use alloc::string::String;

/// Everything that can go wrong across the crate.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^31")]
    NotOddPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("operands belong to different fields")]
    ModulusMismatch,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(&'static str),
    #[error("matrix is singular")]
    Singular,
    #[error("parameters too large for exhaustive work: {0}")]
    ParameterTooLarge(String),
    #[error("tensor is zero")]
    ZeroTensor,
    #[error("lambda must be nonzero")]
    ZeroLambda,
    #[error("lambda^4 lies in {{0, 1}}")]
    DegenerateLambda,
    #[error("invalid suborbit label `{0}`")]
    InvalidLabel(String),
    #[error("connection set union is empty")]
    EmptyUnion,
    #[error("connection set is not closed under negation")]
    NotNegationClosed,
    #[error("connection set is not the punctured union of the two direction spaces")]
    BadDecomposition,
    #[error("projection index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("degenerate direction configuration: {0}")]
    DegenerateConfig(String),
    #[error("cross-ratio quadruple has repeated points")]
    DegenerateQuad,
    #[error("lemma `{lemma}` violated: {counterexample}")]
    LemmaViolation { lemma: String, counterexample: String },
    #[error("permuted cross-ratio table violated: {0}")]
    TableViolation(String),
    #[error("prime scan violated: {0}")]
    ScanViolation(String),
    #[error("certification failed: {0}")]
    CertificationFailed(String),
}

pub type Result<T> = core::result::Result<T, Error>;
