//! Proof parameters for a ratio bracket `p < a(n)/a(n-1) < q`.
//!
//! Given `0 < p < q`, the constants `p0`, `q0`, the guard polynomials `f`,
//! `g` and the threshold `r` are computed exactly. When `p0, q0 > 0`, every
//! guard polynomial is positive for `n >= r`, which drives the induction in
//! [`crate::prover`].

use std::fmt;

use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde::Serialize;

use crate::exactmath::{Poly, Rational};
use crate::recurrence::NormalizedRecurrence;
use crate::spectrum::RootInterval;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum WitnessError {
    #[error("need 0 < p < q, got p = {p}, q = {q}")]
    BadBracket { p: Rational, q: Rational },
    #[error("constants not positive for p = {p}, q = {q}: p0 = {p0}, q0 = {q0}")]
    NonPositiveConstants { p: Rational, q: Rational, p0: Rational, q0: Rational },
    #[error("threshold r = {0} does not fit a 64-bit index")]
    ThresholdTooLarge(BigInt),
    #[error("no valid (p,q) found among {} candidates; {}", .0.len(), summarize(.0))]
    NoValidPq(Vec<FailedCandidate>),
}

/// A rejected `(p, q)` candidate with its constants.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FailedCandidate {
    pub p: Rational,
    pub q: Rational,
    pub p0: Rational,
    pub q0: Rational,
}

fn summarize(c: &[FailedCandidate]) -> String {
    let shown: Vec<String> = c
        .iter()
        .take(3)
        .map(|c| format!("(p={}, q={}: p0={}, q0={})", c.p, c.q, c.p0, c.q0))
        .collect();
    let more = if c.len() > 3 { ", ..." } else { "" };
    format!("e.g. {}{more}", shown.join(", "))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Witness {
    pub p: Rational,
    pub q: Rational,
    pub p0: Rational,
    pub q0: Rational,
    pub f: Poly,
    pub g: Poly,
    pub r: i64,
    /// `l_j`: `p` for negative terms, `q` otherwise.
    pub lower_selectors: Vec<Rational>,
    /// `h_j`: the other endpoint.
    pub upper_selectors: Vec<Rational>,
}

/// The individual floors whose maximum (plus one) is `r`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThresholdBreakdown {
    pub from_f: BigInt,
    pub from_g: BigInt,
    /// `None` where `w_j = 0`.
    pub from_numerators: Vec<Option<BigInt>>,
    pub from_denominators: Vec<BigInt>,
}

impl ThresholdBreakdown {
    pub fn max(&self) -> BigInt {
        let mut m = self.from_f.clone().max(self.from_g.clone());
        for x in self.from_numerators.iter().flatten().chain(&self.from_denominators) {
            if *x > m {
                m = x.clone();
            }
        }
        m
    }
}

impl fmt::Display for ThresholdBreakdown {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let nums: Vec<String> = self
            .from_numerators
            .iter()
            .map(|x| x.as_ref().map_or("-".to_string(), BigInt::to_string))
            .collect();
        let dens: Vec<String> = self.from_denominators.iter().map(BigInt::to_string).collect();
        write!(
            f,
            "f: {}, g: {}, Q: [{}], P2: [{}]",
            self.from_f,
            self.from_g,
            nums.join(", "),
            dens.join(", ")
        )
    }
}

fn check_bracket(p: &Rational, q: &Rational) -> Result<(), WitnessError> {
    if !p.is_positive() || p >= q {
        return Err(WitnessError::BadBracket { p: p.clone(), q: q.clone() });
    }
    Ok(())
}

/// `(l_j, h_j)` for each `j`.
pub fn selectors(nr: &NormalizedRecurrence, p: &Rational, q: &Rational) -> (Vec<Rational>, Vec<Rational>) {
    nr.signs
        .iter()
        .map(|&s| if s < 0 { (p.clone(), q.clone()) } else { (q.clone(), p.clone()) })
        .unzip()
}

/// Weighted sum `sum_j w_j * b_j * A_j / sel_j^(j-1)` over limit coefficients.
fn weighted_leading_sum(nr: &NormalizedRecurrence, sel: &[Rational]) -> Rational {
    let d = nr.order;
    (1..=d)
        .filter(|&j| nr.sign(j) != 0)
        .map(|j| {
            let others: Rational = (1..=d).filter(|&i| i != j).map(|i| nr.den_leading(i).clone()).product();
            let term = nr.limit_numerator(j) * others / sel[j - 1].pow(j as u32 - 1);
            if nr.sign(j) < 0 {
                -term
            } else {
                term
            }
        })
        .sum()
}

/// `(p0, q0)`. Nonpositive values are returned as is; callers reject them.
pub fn compute_constants(
    nr: &NormalizedRecurrence,
    p: &Rational,
    q: &Rational,
) -> Result<(Rational, Rational), WitnessError> {
    check_bracket(p, q)?;
    let (low, high) = selectors(nr, p, q);
    let lead_product: Rational = (1..=nr.order).map(|j| nr.den_leading(j).clone()).product();
    let p0 = weighted_leading_sum(nr, &low) - p * &lead_product;
    let q0 = q * &lead_product - weighted_leading_sum(nr, &high);
    Ok((p0, q0))
}

fn weighted_shifted_sum(nr: &NormalizedRecurrence, shifted_dens: &[Poly], sel: &[Rational]) -> Poly {
    let d = nr.order;
    let one = Rational::one();
    (1..=d)
        .filter(|&j| nr.sign(j) != 0)
        .map(|j| {
            let others: Poly = (1..=d).filter(|&i| i != j).map(|i| shifted_dens[i - 1].clone()).product();
            let q_shift = nr.q_polys[j - 1].shift(&one);
            let scale = sel[j - 1].pow(j as u32 - 1).recip().expect("selectors are positive");
            let term = (q_shift * others).scale(&scale);
            if nr.sign(j) < 0 {
                -term
            } else {
                term
            }
        })
        .sum()
}

/// The guard polynomials `f(n)` and `g(n)`; every factor is evaluated at `n + 1`.
pub fn compute_guards(nr: &NormalizedRecurrence, p: &Rational, q: &Rational) -> Result<(Poly, Poly), WitnessError> {
    check_bracket(p, q)?;
    let (low, high) = selectors(nr, p, q);
    let one = Rational::one();
    let shifted: Vec<Poly> = nr.den_polys.iter().map(|d| d.shift(&one)).collect();
    let den_product: Poly = shifted.iter().cloned().product();
    let f = weighted_shifted_sum(nr, &shifted, &low) - den_product.scale(p);
    let g = den_product.scale(q) - weighted_shifted_sum(nr, &shifted, &high);
    Ok((f, g))
}

fn floor_ratio(l: Rational, lead: &Rational) -> BigInt {
    (l / lead).floor()
}

/// The per-polynomial floors `floor(L(h) / lead(h))` entering `r`.
///
/// Numerators use their own leading coefficient, which is the degree-`k`
/// coefficient except for degree-relaxed terms.
pub fn threshold_breakdown(
    nr: &NormalizedRecurrence,
    f: &Poly,
    g: &Poly,
    p0: &Rational,
    q0: &Rational,
) -> Result<ThresholdBreakdown, WitnessError> {
    if !p0.is_positive() || !q0.is_positive() {
        return Err(WitnessError::NonPositiveConstants {
            p: Rational::zero(),
            q: Rational::zero(),
            p0: p0.clone(),
            q0: q0.clone(),
        });
    }
    let l = |h: &Poly| h.l_bound().expect("guard polynomials are nonzero when p0, q0 > 0");
    Ok(ThresholdBreakdown {
        from_f: floor_ratio(l(f), p0),
        from_g: floor_ratio(l(g), q0),
        from_numerators: (1..=nr.order)
            .map(|j| {
                let qj = &nr.q_polys[j - 1];
                qj.leading().map(|lead| floor_ratio(l(qj), lead))
            })
            .collect(),
        from_denominators: (1..=nr.order)
            .map(|j| floor_ratio(l(&nr.den_polys[j - 1]), nr.den_leading(j)))
            .collect(),
    })
}

/// `r = max(floors) + 1`.
pub fn compute_r(
    nr: &NormalizedRecurrence,
    f: &Poly,
    g: &Poly,
    p0: &Rational,
    q0: &Rational,
) -> Result<i64, WitnessError> {
    let r = threshold_breakdown(nr, f, g, p0, q0)?.max() + BigInt::from(1);
    r.to_i64().ok_or(WitnessError::ThresholdTooLarge(r))
}

/// The exact inequalities that make every guard polynomial positive from `r`
/// on: `lead(h) * r > L(h)` for `f`, `g`, each nonzero `Q1j` and each `P2j`.
pub fn lemma_guard(w: &Witness, nr: &NormalizedRecurrence) -> bool {
    let r = Rational::from(w.r);
    let holds = |lead: &Rational, h: &Poly| match h.l_bound() {
        Ok(l) => lead.is_positive() && lead * &r > l,
        Err(_) => false,
    };
    w.r >= 1
        && holds(&w.p0, &w.f)
        && holds(&w.q0, &w.g)
        && nr
            .q_polys
            .iter()
            .filter(|q| !q.is_zero())
            .all(|q| holds(q.leading().expect("nonzero"), q))
        && nr.den_polys.iter().all(|d| holds(d.leading().expect("nonzero"), d))
}

/// Full witness for a given bracket, rejecting nonpositive constants.
pub fn build_witness(nr: &NormalizedRecurrence, p: &Rational, q: &Rational) -> Result<Witness, WitnessError> {
    let (p0, q0) = compute_constants(nr, p, q)?;
    if !p0.is_positive() || !q0.is_positive() {
        return Err(WitnessError::NonPositiveConstants { p: p.clone(), q: q.clone(), p0, q0 });
    }
    let (f, g) = compute_guards(nr, p, q)?;
    debug_assert_eq!(f.leading(), Some(&p0));
    debug_assert_eq!(g.leading(), Some(&q0));
    let r = compute_r(nr, &f, &g, &p0, &q0)?;
    let (lower_selectors, upper_selectors) = selectors(nr, p, q);
    Ok(Witness { p: p.clone(), q: q.clone(), p0, q0, f, g, r, lower_selectors, upper_selectors })
}

/// Relative margins tried around the root interval, widest first.
pub const MARGINS: [(i64, i64); 7] = [(1, 2), (3, 10), (1, 5), (1, 10), (1, 20), (1, 50), (1, 100)];

/// Largest denominator allowed for automatically chosen `p` and `q`.
pub const DENOMINATOR_CAP: i64 = 64;

/// Largest fraction `a/b <= x` with `1 <= b <= cap`; the smallest such `b` on ties.
fn best_below(x: &Rational, cap: i64) -> Rational {
    let mut best: Option<Rational> = None;
    for b in 1..=cap {
        let bb = BigInt::from(b);
        let cand = Rational::new((x * Rational::from(b)).floor(), bb).expect("nonzero");
        if best.as_ref().is_none_or(|cur| &cand > cur) {
            best = Some(cand);
        }
    }
    best.expect("cap >= 1")
}

/// Smallest fraction `a/b >= x` with `1 <= b <= cap`; the smallest such `b` on ties.
fn best_above(x: &Rational, cap: i64) -> Rational {
    let mut best: Option<Rational> = None;
    for b in 1..=cap {
        let bb = BigInt::from(b);
        let cand = Rational::new((x * Rational::from(b)).ceil(), bb).expect("nonzero");
        if best.as_ref().is_none_or(|cur| &cand < cur) {
            best = Some(cand);
        }
    }
    best.expect("cap >= 1")
}

/// Deterministic search for a bracket around `mu` that minimizes `r`.
///
/// Lower candidates round `lo * (1 - delta)` down and upper candidates round
/// `hi * (1 + delta)` up to fractions with denominator at most
/// [`DENOMINATOR_CAP`]; every lower/upper pair is tried. Ties on `r` prefer a
/// narrower bracket, then smaller denominators.
pub fn auto_select_pq(nr: &NormalizedRecurrence, mu: &RootInterval) -> Result<Witness, WitnessError> {
    let mut lowers: Vec<Rational> = Vec::new();
    let mut uppers: Vec<Rational> = Vec::new();
    for (a, b) in MARGINS {
        let delta = Rational::frac(a, b);
        let lo = best_below(&(&mu.lo * (Rational::one() - &delta)), DENOMINATOR_CAP);
        let hi = best_above(&(&mu.hi * (Rational::one() + &delta)), DENOMINATOR_CAP);
        if lo.is_positive() && !lowers.contains(&lo) {
            lowers.push(lo);
        }
        if !uppers.contains(&hi) {
            uppers.push(hi);
        }
    }

    let mut best: Option<Witness> = None;
    let mut failures = Vec::new();
    for p in &lowers {
        for q in &uppers {
            match build_witness(nr, p, q) {
                Ok(w) => {
                    let key = |w: &Witness| (w.r, &w.q - &w.p, w.p.denom() + w.q.denom());
                    if best.as_ref().is_none_or(|b| key(&w) < key(b)) {
                        best = Some(w);
                    }
                }
                Err(WitnessError::NonPositiveConstants { p, q, p0, q0 }) => {
                    failures.push(FailedCandidate { p, q, p0, q0 })
                }
                Err(e) => return Err(e),
            }
        }
    }
    best.ok_or(WitnessError::NoValidPq(failures))
}
