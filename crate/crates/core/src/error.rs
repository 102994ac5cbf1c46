use thiserror::Error;

use crate::algebra::Condition;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("conditions belong to different algebras ({left} vs {right} atoms)")]
    AlgebraMismatch { left: usize, right: usize },
    #[error("algebra must have between 1 and {cap} atoms, got {got}")]
    InvalidAlgebra { got: usize, cap: usize },
    #[error("atom {atom} is outside the algebra of {atoms} atoms")]
    AtomOutOfRange { atom: usize, atoms: usize },
    #[error("invalid assignment: {0}")]
    InvalidAssignment(String),
    #[error("condition {sub} is not below {sup}")]
    ConditionNotBelow { sub: Condition, sup: Condition },
    #[error("conditions differ: {left} vs {right}")]
    ConditionMismatch { left: Condition, right: Condition },
    #[error("empty family")]
    EmptyFamily,
    #[error("complement requires an ambient universe on 1")]
    MissingUniverse,
    #[error("sequence has {available} terms, {needed} needed")]
    InsufficientSequence { needed: usize, available: usize },
    #[error("series truncation requires a certified tail bound")]
    UncertifiedTail,
    #[error("dimension mismatch on atom {atom}: expected {expected}, got {got}")]
    DimensionMismatch { atom: usize, expected: usize, got: usize },
    #[error("direction grids differ on atom {atom}")]
    GridMismatch { atom: usize },
    #[error("dimension {dim} exceeds the supported cap {cap}")]
    UnsupportedDimension { dim: usize, cap: usize },
    #[error("unsupported norm kind: {0}")]
    UnsupportedNormKind(String),
    #[error("basis is not injective on atom {atom}")]
    NotInjective { atom: usize },
    #[error("body is not bounded on {0}")]
    NotBounded(Condition),
    #[error("functional {index} has zero norm")]
    ZeroFunctional { index: usize },
    #[error("budget exhausted without a decision on {0}")]
    Undecided(Condition),
    #[error("sequence is unbounded on {0}")]
    UnboundedOnCondition(Condition),
    #[error("point {witness:?} on atom {atom} is not covered")]
    NotACover { atom: usize, witness: Vec<f64> },
    #[error("refinement schedule exhausted on atom {atom} after {depth} levels")]
    ResolutionExhausted { atom: usize, depth: usize, trace: Vec<(Vec<f64>, f64)> },
    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),
    #[error("instance generation failed: {0}")]
    GenerationFailed(String),
    #[error("invalid value: {0}")]
    InvalidValue(String),
}
