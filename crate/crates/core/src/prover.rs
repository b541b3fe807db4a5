//! Finding an admissible window and turning it into a positivity verdict.
//!
//! An index `u >= r` is admissible when `p < a(n)/a(n-1) < q` for the `d`
//! indices `n = u, ..., u + d - 1`. With the guard polynomials positive from
//! `r` on, the bracket then propagates to every later `n`, so `a(u) > 0`
//! gives positivity from `u`, and positivity of `a(N0..=u)` extends it back to
//! the claimed start `N0`.
//!
//! Every comparison here is an exact cross-multiplication.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::exactmath::{cmp_int_quotient, cmp_quotient, Rational};
use crate::recurrence::{NormalizedRecurrence, TermError, TermGenerator};
use crate::witness::{lemma_guard, Witness};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ProverError {
    #[error("witness fails the guard inequalities at r = {r}")]
    GuardFailed { r: i64 },
    #[error("window start u = {u} is below the threshold r = {r}")]
    BelowThreshold { u: i64, r: i64 },
    #[error("no admissible u within budget (scanned terms through n = {scanned_through})")]
    BudgetExhausted { scanned_through: i64 },
    #[error(transparent)]
    Term(#[from] TermError),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Verdict {
    PositiveFrom { from: i64 },
    UltimatelyPositiveFrom { from: i64 },
    Inconclusive { reason: String },
}

impl Verdict {
    pub fn is_conclusive(&self) -> bool {
        !matches!(self, Verdict::Inconclusive { .. })
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::PositiveFrom { from } => write!(f, "PositiveFrom({from})"),
            Verdict::UltimatelyPositiveFrom { from } => write!(f, "UltimatelyPositiveFrom({from})"),
            Verdict::Inconclusive { reason } => write!(f, "Inconclusive({reason})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProofResult {
    pub witness: Witness,
    /// The minimal admissible index, when one was found.
    pub u: Option<i64>,
    /// `a(n)/a(n-1)` for `n = u, ..., u + d - 1`.
    pub window_ratios: Vec<Rational>,
    /// `a(u - 1), ..., a(u + d - 1)`.
    pub window_terms: Vec<Rational>,
    /// Claim start `N0` used for the prefix check.
    pub claim_start: i64,
    /// Last index covered by the prefix positivity check.
    pub prefix_checked_through: Option<i64>,
    /// First index `n >= N0` with `a(n) <= 0`, if any was seen.
    pub prefix_failure: Option<i64>,
    /// Largest index whose term was generated.
    pub scanned_through: i64,
    pub verdict: Verdict,
}

/// Where a single ratio falls relative to `(p, q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RatioPosition {
    Inside,
    AtOrBelowP,
    AtOrAboveQ,
    /// `a(n-1) = 0`.
    Undefined,
}

fn position(cmp: impl Fn(&Rational) -> Ordering, p: &Rational, q: &Rational) -> RatioPosition {
    if cmp(p) != Ordering::Greater {
        RatioPosition::AtOrBelowP
    } else if cmp(q) != Ordering::Less {
        RatioPosition::AtOrAboveQ
    } else {
        RatioPosition::Inside
    }
}

/// Locates `cur / prev` relative to the open interval `(p, q)`.
pub fn ratio_position(prev: &Rational, cur: &Rational, p: &Rational, q: &Rational) -> RatioPosition {
    if prev.is_zero() {
        return RatioPosition::Undefined;
    }
    position(|c| cmp_quotient(cur, prev, c), p, q)
}

/// [`ratio_position`] for two numerators over a shared positive denominator.
pub fn scaled_ratio_position(prev: &BigInt, cur: &BigInt, p: &Rational, q: &Rational) -> RatioPosition {
    if prev.is_zero() {
        return RatioPosition::Undefined;
    }
    position(|c| cmp_int_quotient(cur, prev, c), p, q)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowFailure {
    pub n: i64,
    pub position: RatioPosition,
}

impl fmt::Display for WindowFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.position {
            RatioPosition::Undefined => write!(f, "a({}) is zero", self.n - 1),
            RatioPosition::AtOrBelowP => write!(f, "a({0})/a({1}) <= p", self.n, self.n - 1),
            RatioPosition::AtOrAboveQ => write!(f, "a({0})/a({1}) >= q", self.n, self.n - 1),
            RatioPosition::Inside => write!(f, "ratio at n = {} is inside (p, q)", self.n),
        }
    }
}

/// Outcome of checking the window at one `u`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WindowCheck {
    /// Ratios computed before the first failure (all `d` when it passes).
    pub ratios: Vec<Rational>,
    pub failure: Option<WindowFailure>,
}

impl WindowCheck {
    pub fn passes(&self) -> bool {
        self.failure.is_none()
    }
}

/// Checks the window at `u` given the terms `a(u-1), ..., a(u+d-1)`.
pub fn window_from_terms(terms: &[Rational], u: i64, p: &Rational, q: &Rational) -> WindowCheck {
    let mut ratios = Vec::with_capacity(terms.len().saturating_sub(1));
    for (i, pair) in terms.windows(2).enumerate() {
        let n = u + i as i64;
        match ratio_position(&pair[0], &pair[1], p, q) {
            RatioPosition::Inside => ratios.push(&pair[1] / &pair[0]),
            position => return WindowCheck { ratios, failure: Some(WindowFailure { n, position }) },
        }
    }
    WindowCheck { ratios, failure: None }
}

/// Admissibility of `u` for the witness bracket, from freshly generated terms.
pub fn check_window(nr: &NormalizedRecurrence, w: &Witness, u: i64) -> Result<WindowCheck, ProverError> {
    if u < w.r {
        return Err(ProverError::BelowThreshold { u, r: w.r });
    }
    let mut gen = TermGenerator::streaming(nr);
    let terms = (u - 1..u + nr.order as i64)
        .map(|n| gen.term(n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(window_from_terms(&terms, u, &w.p, &w.q))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixCheck {
    pub checked_through: i64,
    pub first_failure: Option<i64>,
}

impl PrefixCheck {
    pub fn passes(&self) -> bool {
        self.first_failure.is_none()
    }
}

/// Checks `a(n) > 0` for `claim_start <= n <= u`, stopping at the first failure.
pub fn check_prefix(nr: &NormalizedRecurrence, claim_start: i64, u: i64) -> Result<PrefixCheck, ProverError> {
    let mut gen = TermGenerator::streaming(nr);
    let start = claim_start.max(gen.first_index());
    if start > u {
        return Ok(PrefixCheck { checked_through: u, first_failure: None });
    }
    if start > gen.first_index() {
        gen.term(start - 1)?;
    }
    while gen.next_index() <= u {
        let n = gen.advance()?;
        if !gen.scaled(n).expect("just produced").is_positive() {
            return Ok(PrefixCheck { checked_through: n, first_failure: Some(n) });
        }
    }
    Ok(PrefixCheck { checked_through: u, first_failure: None })
}

/// Default scan budget `10 r + 10^6`.
pub fn default_scan_budget(r: i64) -> i64 {
    r.saturating_mul(10).saturating_add(1_000_000)
}

struct Scan {
    u: Option<i64>,
    window_terms: Vec<Rational>,
    prefix_failure: Option<i64>,
    scanned_through: i64,
}

/// One streaming pass: tracks the run of in-range ratios ending at each `n`
/// and the first nonpositive term at or after `claim_start`. The first `n`
/// whose run covers `d` ratios starting at or after `r` closes the window at
/// `u = n - d + 1`; every earlier candidate had a failing ratio inside its
/// window, so `u` is minimal.
fn scan(nr: &NormalizedRecurrence, w: &Witness, scan_budget: i64, claim_start: i64) -> Result<Scan, ProverError> {
    let d = nr.order as i64;
    let mut gen = TermGenerator::streaming(nr);
    let start = w.r.max(gen.first_index() + 1);
    let last_u = w.r.saturating_add(scan_budget.max(0));
    let last_n = last_u.saturating_add(d - 1);

    let mut run = 0i64;
    let mut prefix_failure = None;
    while gen.next_index() <= last_n {
        let n = gen.advance()?;
        let a = gen.scaled(n).expect("just produced");
        if n >= claim_start && prefix_failure.is_none() && !a.is_positive() {
            prefix_failure = Some(n);
        }
        let inside = gen
            .scaled(n - 1)
            .is_some_and(|b| scaled_ratio_position(b, a, &w.p, &w.q) == RatioPosition::Inside);
        run = if inside { run + 1 } else { 0 };

        let u = n - d + 1;
        if u >= start && run >= d {
            let window_terms = (u - 1..=n)
                .map(|i| gen.cached(i).expect("window is held"))
                .collect();
            return Ok(Scan { u: Some(u), window_terms, prefix_failure, scanned_through: n });
        }
    }
    Ok(Scan { u: None, window_terms: Vec::new(), prefix_failure, scanned_through: gen.next_index() - 1 })
}

/// Smallest admissible `u` in `[r, r + scan_budget]`.
pub fn find_min_admissible_u(nr: &NormalizedRecurrence, w: &Witness, scan_budget: i64) -> Result<i64, ProverError> {
    if !lemma_guard(w, nr) {
        return Err(ProverError::GuardFailed { r: w.r });
    }
    let s = scan(nr, w, scan_budget, nr.claim_start)?;
    s.u.ok_or(ProverError::BudgetExhausted { scanned_through: s.scanned_through })
}

/// Runs the full argument: admissible window, `a(u) > 0`, then prefix positivity.
pub fn prove(nr: &NormalizedRecurrence, w: &Witness, scan_budget: i64) -> Result<ProofResult, ProverError> {
    if !lemma_guard(w, nr) {
        return Err(ProverError::GuardFailed { r: w.r });
    }
    let claim_start = nr.claim_start;
    let s = scan(nr, w, scan_budget, claim_start)?;
    let mut result = ProofResult {
        witness: w.clone(),
        u: s.u,
        window_ratios: Vec::new(),
        window_terms: Vec::new(),
        claim_start,
        prefix_checked_through: None,
        prefix_failure: s.prefix_failure,
        scanned_through: s.scanned_through,
        verdict: Verdict::Inconclusive { reason: String::new() },
    };
    let Some(u) = s.u else {
        result.verdict = Verdict::Inconclusive {
            reason: ProverError::BudgetExhausted { scanned_through: s.scanned_through }.to_string(),
        };
        return Ok(result);
    };

    let window = window_from_terms(&s.window_terms, u, &w.p, &w.q);
    assert!(window.passes(), "scan reported a window that does not pass");
    result.window_ratios = window.ratios;
    result.window_terms = s.window_terms;

    if !result.window_terms[1].is_positive() {
        result.verdict = Verdict::Inconclusive { reason: format!("a({u}) is not positive") };
        return Ok(result);
    }
    result.prefix_checked_through = Some(u);
    result.prefix_failure = s.prefix_failure.filter(|&n| n <= u);
    result.verdict = match result.prefix_failure {
        None => Verdict::PositiveFrom { from: claim_start },
        Some(_) => Verdict::UltimatelyPositiveFrom { from: u },
    };
    Ok(result)
}
