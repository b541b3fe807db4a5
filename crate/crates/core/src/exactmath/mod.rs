//! Exact rational scalars and dense polynomials over them.

mod poly;
mod rational;

pub use poly::{IntPoly, Poly};
pub use rational::{cmp_int_quotient, cmp_quotient, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MathError {
    #[error("L undefined for zero polynomial")]
    LOfZero,
    #[error("division by zero")]
    DivisionByZero,
    #[error("invalid rational {0:?} (expected \"a\" or \"a/b\")")]
    ParseRational(String),
}
