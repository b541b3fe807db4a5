//! P-recursive recurrences: the input model, sign normalization, and exact
//! forward term generation.

mod normalize;
mod spec;
mod terms;

pub use normalize::{normalize, validate_denominators, NormalizedRecurrence, Relaxation};
pub(crate) use normalize::cauchy_bound;
pub use spec::{parse_spec, RecurrenceSpec};
pub use terms::{term, TermGenerator};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecError {
    #[error("malformed spec document: {0}")]
    Malformed(String),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum NormalizeError {
    #[error("denominator {j} is the zero polynomial")]
    ZeroDenominator { j: usize },
    #[error("numerator dominates denominator: deg Q1{j} = {degree} > deg P2{j} = {expected}")]
    NumeratorDominates { j: usize, degree: usize, expected: usize },
    #[error("denominator degrees differ: deg P2{j} = {degree}, expected {expected}")]
    DenominatorDegreeMismatch { j: usize, degree: usize, expected: usize },
    #[error("degree mismatch with strict mode: numerator {j} has degree {}, expected {expected}", .degree.map_or("-inf".to_string(), |d| d.to_string()))]
    StrictDegree { j: usize, degree: Option<usize>, expected: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum TermError {
    #[error("index {n} is below the first known index {first}")]
    BelowFirstIndex { n: i64, first: i64 },
    #[error("term {n} is no longer held by this streaming generator")]
    Evicted { n: i64 },
    #[error("denominator {j} vanishes at n = {n}")]
    DenominatorVanishes { n: i64, j: usize },
}
