//! Characteristic polynomial of a normalized recurrence and its positive
//! real roots.
//!
//! Root isolation here is exact. The [`DominanceReport`] is a floating-point
//! heuristic only: nothing in the certificate path consumes it.

mod dominance;
pub mod sturm;

use serde::Serialize;

pub use dominance::{dominance_report, ComplexRoot, DominanceReport, DEFAULT_MARGIN};
pub use sturm::RootInterval;

use crate::exactmath::{Poly, Rational};
use crate::recurrence::{cauchy_bound, NormalizedRecurrence};

/// Monic characteristic polynomial in `t`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(transparent)]
pub struct CharPoly {
    pub poly: Poly,
}

impl CharPoly {
    pub fn degree(&self) -> usize {
        self.poly.degree().expect("monic")
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpectrumError {
    #[error("refinement width must be positive, got {0}")]
    NonPositiveWidth(Rational),
}

/// `t^d - sum_j (w_j * b_j / a_j) t^(d-j)` where `b_j`, `a_j` are the degree-k
/// coefficients of `Q1j` and `P2j`.
pub fn char_poly(nr: &NormalizedRecurrence) -> CharPoly {
    let d = nr.order;
    let mut coeffs = vec![Rational::zero(); d + 1];
    coeffs[d] = Rational::one();
    for j in 1..=d {
        let ratio = &nr.limit_numerator(j) / nr.den_leading(j);
        let signed = if nr.sign(j) < 0 { ratio } else { -ratio };
        coeffs[d - j] = signed;
    }
    CharPoly { poly: Poly::new(coeffs) }
}

/// Isolating intervals for every distinct positive real root, ascending.
pub fn isolate_positive_roots(cp: &CharPoly) -> Vec<RootInterval> {
    let bound = cauchy_bound(&cp.poly);
    sturm::isolate_real_roots(&cp.poly, &Rational::zero(), &bound)
}

/// The largest positive real root, which is the candidate for the dominant
/// root `mu`.
pub fn dominant_root_interval(cp: &CharPoly) -> Option<RootInterval> {
    isolate_positive_roots(cp).pop()
}

/// Narrows an isolating interval to at most `width`.
pub fn refine(cp: &CharPoly, iv: RootInterval, width: &Rational) -> Result<RootInterval, SpectrumError> {
    if !width.is_positive() {
        return Err(SpectrumError::NonPositiveWidth(width.clone()));
    }
    Ok(sturm::refine_root(&cp.poly, iv, width))
}
