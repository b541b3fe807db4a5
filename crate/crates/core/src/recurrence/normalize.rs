use std::collections::BTreeSet;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::{NormalizeError, RecurrenceSpec};
use crate::exactmath::{IntPoly, Poly, Rational};
use crate::spectrum::sturm;

/// A departure from the textbook hypotheses that the normalized recurrence
/// still supports. Recorded in certificates.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Relaxation {
    /// `P1j` is identically zero; the term drops out of every sum.
    ZeroNumerator { j: usize },
    /// `deg Q1j < k`, so its limit coefficient at degree `k` is zero.
    DegreeRelaxed { j: usize },
    /// Positivity is claimed from an index other than 0.
    ClaimStartOffset { claim_start: i64 },
}

impl fmt::Display for Relaxation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relaxation::ZeroNumerator { j } => write!(f, "zero-numerator term j={j}"),
            Relaxation::DegreeRelaxed { j } => write!(f, "degree-relaxed numerator j={j}"),
            Relaxation::ClaimStartOffset { claim_start } => write!(f, "claim starts at index {claim_start}"),
        }
    }
}

/// The recurrence rewritten as `a(n) = sum_j w_j * Q1j(n) / P2j(n) * a(n - j)`
/// with every `P2j` of degree `k` and positive leading coefficient, and every
/// nonzero `Q1j` with positive leading coefficient.
///
/// Vectors are indexed from 0, so entry `j - 1` describes the shift `a(n - j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NormalizedRecurrence {
    pub order: usize,
    pub signs: Vec<i8>,
    pub q_polys: Vec<Poly>,
    pub den_polys: Vec<Poly>,
    pub common_degree: usize,
    /// Terms at indices `first_index .. recurrence_start`.
    pub initial_terms: Vec<Rational>,
    pub first_index: i64,
    pub recurrence_start: i64,
    pub claim_start: i64,
    pub relaxations: Vec<Relaxation>,
}

impl NormalizedRecurrence {
    /// Coefficient of `n^k` in `Q1j`; zero when `w_j = 0` or `deg Q1j < k`.
    /// `j` is 1-based.
    pub fn limit_numerator(&self, j: usize) -> Rational {
        self.q_polys[j - 1].coeff(self.common_degree)
    }

    /// Leading coefficient of `P2j` (always positive). `j` is 1-based.
    pub fn den_leading(&self, j: usize) -> &Rational {
        self.den_polys[j - 1].leading().expect("denominators are nonzero")
    }

    pub fn sign(&self, j: usize) -> i8 {
        self.signs[j - 1]
    }

    /// The original numerator `P1j = w_j * Q1j`. `j` is 1-based.
    pub fn numerator(&self, j: usize) -> Poly {
        match self.sign(j) {
            0 => Poly::zero(),
            1 => self.q_polys[j - 1].clone(),
            _ => -&self.q_polys[j - 1],
        }
    }

    pub(crate) fn int_coefficients(&self) -> Vec<(IntPoly, IntPoly)> {
        (1..=self.order)
            .map(|j| (IntPoly::new(&self.numerator(j)), IntPoly::new(&self.den_polys[j - 1])))
            .collect()
    }
}

/// Normalizes signs so that denominators and numerators have positive leading
/// coefficients.
///
/// Denominators must share one degree `k`. Numerators of lower degree are
/// accepted (recorded as [`Relaxation::DegreeRelaxed`]) unless `strict` is set,
/// in which case every numerator must be nonzero of degree exactly `k`.
pub fn normalize(spec: &RecurrenceSpec, strict: bool) -> Result<NormalizedRecurrence, NormalizeError> {
    let d = spec.order;
    let mut signs = Vec::with_capacity(d);
    let mut q_polys = Vec::with_capacity(d);
    let mut den_polys = Vec::with_capacity(d);
    let mut relaxations = Vec::new();

    for j in 1..=d {
        let mut num = spec.numerators[j - 1].clone();
        let mut den = spec.denominators[j - 1].clone();
        let den_lead = den.leading().ok_or(NormalizeError::ZeroDenominator { j })?;
        if den_lead.is_negative() {
            num = -num;
            den = -den;
        }
        let sign = num.leading().map_or(0, Rational::signum);
        let q = if sign < 0 { -num } else { num };
        signs.push(sign);
        q_polys.push(q);
        den_polys.push(den);
    }

    let k = den_polys[0].degree().expect("nonzero");
    for (j, den) in den_polys.iter().enumerate() {
        let dj = den.degree().expect("nonzero");
        if dj != k {
            return Err(NormalizeError::DenominatorDegreeMismatch { j: j + 1, degree: dj, expected: k });
        }
    }
    for (j, q) in q_polys.iter().enumerate() {
        let j = j + 1;
        match q.degree() {
            None if strict => return Err(NormalizeError::StrictDegree { j, degree: None, expected: k }),
            None => relaxations.push(Relaxation::ZeroNumerator { j }),
            Some(dq) if dq > k => return Err(NormalizeError::NumeratorDominates { j, degree: dq, expected: k }),
            Some(dq) if dq < k && strict => {
                return Err(NormalizeError::StrictDegree { j, degree: Some(dq), expected: k })
            }
            Some(dq) if dq < k => relaxations.push(Relaxation::DegreeRelaxed { j }),
            Some(_) => {}
        }
    }
    if spec.claim_start != 0 {
        relaxations.push(Relaxation::ClaimStartOffset { claim_start: spec.claim_start });
    }

    Ok(NormalizedRecurrence {
        order: d,
        signs,
        q_polys,
        den_polys,
        common_degree: k,
        initial_terms: spec.initial_terms.values().cloned().collect(),
        first_index: spec.first_index(),
        recurrence_start: spec.recurrence_start,
        claim_start: spec.claim_start,
        relaxations,
    })
}

/// Cauchy bound `1 + max |e_i / e_t|` on the absolute value of real roots.
pub(crate) fn cauchy_bound(p: &Poly) -> Rational {
    let lead = p.leading().expect("nonzero polynomial").abs();
    let max = p.coeffs()[..p.coeffs().len() - 1]
        .iter()
        .map(|c| c.abs() / &lead)
        .max()
        .unwrap_or_else(Rational::zero);
    max + Rational::one()
}

/// Spans wider than this use Sturm isolation instead of a direct scan.
const DIRECT_SCAN_LIMIT: i64 = 100_000;

fn integer_roots_from(p: &Poly, start: i64) -> Vec<i64> {
    let bound = cauchy_bound(p).floor();
    let start_big = BigInt::from(start);
    if bound < start_big {
        return Vec::new();
    }
    let ip = IntPoly::new(p);
    let span = (&bound - &start_big).to_i64().unwrap_or(i64::MAX);
    if span <= DIRECT_SCAN_LIMIT {
        return (start..=start + span)
            .filter(|&n| ip.eval_parts(&BigInt::from(n)).0.is_zero())
            .collect();
    }
    // Isolate real roots in (start - 1/2, bound] and test the integers inside
    // each isolating interval once it is narrower than one.
    let lo = Rational::from(start) - Rational::frac(1, 2);
    let hi = Rational::from(bound);
    let mut found = BTreeSet::new();
    for iv in sturm::isolate_real_roots(p, &lo, &hi) {
        let iv = sturm::refine_interval(p, iv, &Rational::frac(1, 2));
        let mut n = iv.lo.ceil();
        while Rational::from(n.clone()) <= iv.hi {
            if ip.eval_parts(&n).0.is_zero() {
                if let Some(v) = n.to_i64() {
                    found.insert(v);
                }
            }
            n += BigInt::one();
        }
    }
    found.into_iter().collect()
}

/// Integer indices `n >= recurrence_start` at which some denominator vanishes.
/// An empty result means every step of the recurrence is well-defined.
pub fn validate_denominators(nr: &NormalizedRecurrence) -> Vec<i64> {
    let mut roots = BTreeSet::new();
    for den in &nr.den_polys {
        roots.extend(integer_roots_from(den, nr.recurrence_start));
    }
    roots.into_iter().collect()
}
