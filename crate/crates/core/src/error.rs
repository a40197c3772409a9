use thiserror::Error;

/// Errors raised while building or manipulating instances.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum InstanceError {
    #[error("dimension mismatch: points have dim {points}, directions have dim {directions}")]
    DimensionMismatch { points: usize, directions: usize },
    #[error("non-finite coordinate at point {point}, coordinate {coordinate}")]
    NonFinite { point: usize, coordinate: usize },
    #[error("direction {0} has zero norm")]
    ZeroNorm(usize),
    #[error("permutation {index} is not a bijection onto 1..=n")]
    NotBijection { index: usize },
    #[error("empty point set")]
    EmptyPointSet,
    #[error("empty direction set")]
    EmptyDirectionSet,
    #[error("restriction to an empty element set")]
    EmptyRestriction,
    #[error("element id {id} out of range for n = {n}")]
    ElementOutOfRange { id: usize, n: usize },
    #[error("direction index {index} out of range for D = {d}")]
    DirectionOutOfRange { index: usize, d: usize },
    #[error("window [{a}, {b}] invalid for n = {n}")]
    BadWindow { a: usize, b: usize, n: usize },
    #[error("corruption budget {budget} exceeds n = {n}")]
    BudgetTooLarge { budget: usize, n: usize },
    #[error("planted truth inconsistent: {0}")]
    BadPlant(String),
}

/// Errors raised by the learners.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LearnError {
    /// No permutation orders the observed labels monotonically and the
    /// inconsistency was detected against a queried bit.
    #[error("labeling is not realizable by any threshold hypothesis")]
    NotRealizable,
    #[error("candidate set is empty")]
    EmptyCandidates,
}
