//! Self-contained positivity certificates and an independent checker.
//!
//! A certificate embeds the recurrence spec and every proof parameter. The
//! checker trusts none of the stored derived values: it re-normalizes the
//! spec, recomputes the constants, guard polynomials and threshold, and
//! regenerates the terms from scratch.

use std::fmt;

use num_traits::Signed;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::exactmath::{Poly, Rational};
use crate::prover::{scaled_ratio_position, ProofResult, RatioPosition, Verdict};
use crate::recurrence::{normalize, NormalizedRecurrence, RecurrenceSpec, Relaxation, TermGenerator};
use crate::witness::{compute_constants, compute_guards, compute_r, lemma_guard, Witness};

pub const FORMAT_VERSION: u32 = 1;

/// Conventional file extension for certificates.
pub const EXTENSION: &str = "poscert.json";

/// The sign normalization the proof was built on.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NormalizationRecord {
    pub signs: Vec<i8>,
    pub q_polys: Vec<Poly>,
    pub common_degree: usize,
}

impl NormalizationRecord {
    fn of(nr: &NormalizedRecurrence) -> Self {
        NormalizationRecord { signs: nr.signs.clone(), q_polys: nr.q_polys.clone(), common_degree: nr.common_degree }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub format_version: u32,
    /// The spec document, as parsed.
    pub spec: Value,
    pub normalization: NormalizationRecord,
    pub p: Rational,
    pub q: Rational,
    pub p0: Rational,
    pub q0: Rational,
    pub f: Poly,
    pub g: Poly,
    pub r: i64,
    pub u: i64,
    pub window_ratios: Vec<Rational>,
    pub claim: Verdict,
    pub relaxations: Vec<Relaxation>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CertificateError {
    #[error("cannot emit a certificate for an inconclusive result")]
    Inconclusive,
    #[error("malformed certificate: {0}")]
    Malformed(String),
    #[error("unsupported certificate format version {0}")]
    UnsupportedVersion(u64),
}

/// Why a certificate was rejected. Each failing step has its own variant.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Rejection {
    #[error("embedded spec is invalid: {0}")]
    InvalidSpec(String),
    #[error("embedded spec does not normalize: {0}")]
    Normalization(String),
    #[error("normalization record does not match the spec")]
    NormalizationMismatch,
    #[error("relaxation flags do not match the spec (expected {expected:?})")]
    RelaxationMismatch { expected: Vec<Relaxation> },
    #[error("invalid bracket: need 0 < p < q")]
    BadBracket,
    #[error("constant mismatch: stored {name} = {stored}, recomputed {recomputed}")]
    ConstantMismatch { name: &'static str, stored: Rational, recomputed: Rational },
    #[error("constants are not positive")]
    NonPositiveConstants,
    #[error("guard polynomial mismatch: stored {name} differs from the recomputed polynomial")]
    GuardMismatch { name: &'static str },
    #[error("r below recomputed threshold: stored {stored}, recomputed {recomputed}")]
    ThresholdTooSmall { stored: i64, recomputed: i64 },
    #[error("guard inequalities fail at r = {r}")]
    GuardInequality { r: i64 },
    #[error("u = {u} is below r = {r}")]
    WindowBelowThreshold { u: i64, r: i64 },
    #[error("claim is inconsistent with the spec and window: {0}")]
    ClaimMismatch(String),
    #[error("expected {expected} window ratios, found {found}")]
    WindowLength { expected: usize, found: usize },
    #[error("window failure at index {n}: {detail}")]
    WindowFailure { n: i64, detail: String },
    #[error("stored window ratio at index {n} differs from the recomputed ratio")]
    WindowRatioMismatch { n: i64 },
    #[error("a({u}) is not positive")]
    NotPositiveAtU { u: i64 },
    #[error("prefix failure at index {n}: term is not positive")]
    PrefixFailure { n: i64 },
    #[error("term generation failed: {0}")]
    TermGeneration(String),
}

/// Summary of an accepted certificate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Acceptance {
    pub claim: Verdict,
    pub recomputed_r: i64,
    pub u: i64,
    /// Largest index whose term was regenerated.
    pub checked_through: i64,
}

/// Builds a certificate from a conclusive proof.
pub fn emit(pr: &ProofResult, nr: &NormalizedRecurrence, spec: &RecurrenceSpec) -> Result<Certificate, CertificateError> {
    let u = match (&pr.verdict, pr.u) {
        (Verdict::Inconclusive { .. }, _) | (_, None) => return Err(CertificateError::Inconclusive),
        (_, Some(u)) => u,
    };
    let Witness { p, q, p0, q0, f, g, r, .. } = pr.witness.clone();
    Ok(Certificate {
        format_version: FORMAT_VERSION,
        spec: spec.to_value(),
        normalization: NormalizationRecord::of(nr),
        p,
        q,
        p0,
        q0,
        f,
        g,
        r,
        u,
        window_ratios: pr.window_ratios.clone(),
        claim: pr.verdict.clone(),
        relaxations: nr.relaxations.clone(),
    })
}

fn sort_keys(v: Value) -> Value {
    match v {
        Value::Object(map) => {
            let mut entries: Vec<(String, Value)> = map.into_iter().collect();
            entries.sort_by(|a, b| a.0.cmp(&b.0));
            Value::Object(entries.into_iter().map(|(k, v)| (k, sort_keys(v))).collect::<Map<_, _>>())
        }
        Value::Array(items) => Value::Array(items.into_iter().map(sort_keys).collect()),
        other => other,
    }
}

impl Certificate {
    /// Canonical JSON: keys sorted at every level, two-space indentation,
    /// trailing newline. Identical certificates give identical bytes.
    pub fn to_canonical_json(&self) -> String {
        let value = sort_keys(serde_json::to_value(self).expect("certificate serializes"));
        let mut out = serde_json::to_string_pretty(&value).expect("value serializes");
        out.push('\n');
        out
    }

    /// Parses certificate JSON, rejecting unknown format versions before
    /// looking at the rest of the document.
    pub fn from_json(text: &str) -> Result<Self, CertificateError> {
        let value: Value = serde_json::from_str(text).map_err(|e| CertificateError::Malformed(e.to_string()))?;
        let version = value
            .get("format_version")
            .ok_or_else(|| CertificateError::Malformed("missing field `format_version`".into()))?
            .as_u64()
            .ok_or_else(|| CertificateError::Malformed("`format_version` must be a nonnegative integer".into()))?;
        if version != u64::from(FORMAT_VERSION) {
            return Err(CertificateError::UnsupportedVersion(version));
        }
        serde_json::from_value(value).map_err(|e| CertificateError::Malformed(e.to_string()))
    }
}

fn expect_eq(name: &'static str, stored: &Rational, recomputed: Rational) -> Result<(), Rejection> {
    if *stored != recomputed {
        return Err(Rejection::ConstantMismatch { name, stored: stored.clone(), recomputed });
    }
    Ok(())
}

impl fmt::Display for Acceptance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "accepted: {} (u = {}, recomputed r = {})", self.claim, self.u, self.recomputed_r)
    }
}

/// Re-verifies a certificate from scratch.
pub fn check(cert: &Certificate) -> Result<Acceptance, Rejection> {
    let spec = RecurrenceSpec::from_value(cert.spec.clone()).map_err(|e| Rejection::InvalidSpec(e.to_string()))?;
    let nr = normalize(&spec, false).map_err(|e| Rejection::Normalization(e.to_string()))?;
    if NormalizationRecord::of(&nr) != cert.normalization {
        return Err(Rejection::NormalizationMismatch);
    }
    if nr.relaxations != cert.relaxations {
        return Err(Rejection::RelaxationMismatch { expected: nr.relaxations.clone() });
    }

    let (p, q) = (&cert.p, &cert.q);
    let (p0, q0) = compute_constants(&nr, p, q).map_err(|_| Rejection::BadBracket)?;
    expect_eq("p0", &cert.p0, p0.clone())?;
    expect_eq("q0", &cert.q0, q0.clone())?;
    if !p0.is_positive() || !q0.is_positive() {
        return Err(Rejection::NonPositiveConstants);
    }
    let (f, g) = compute_guards(&nr, p, q).map_err(|_| Rejection::BadBracket)?;
    if f != cert.f {
        return Err(Rejection::GuardMismatch { name: "f" });
    }
    if g != cert.g {
        return Err(Rejection::GuardMismatch { name: "g" });
    }
    let recomputed_r = compute_r(&nr, &f, &g, &p0, &q0).map_err(|e| Rejection::TermGeneration(e.to_string()))?;
    if cert.r < recomputed_r {
        return Err(Rejection::ThresholdTooSmall { stored: cert.r, recomputed: recomputed_r });
    }
    let witness = Witness {
        p: p.clone(),
        q: q.clone(),
        p0,
        q0,
        f,
        g,
        r: cert.r,
        lower_selectors: Vec::new(),
        upper_selectors: Vec::new(),
    };
    if !lemma_guard(&witness, &nr) {
        return Err(Rejection::GuardInequality { r: cert.r });
    }
    let u = cert.u;
    if u < cert.r {
        return Err(Rejection::WindowBelowThreshold { u, r: cert.r });
    }
    let d = nr.order;
    if cert.window_ratios.len() != d {
        return Err(Rejection::WindowLength { expected: d, found: cert.window_ratios.len() });
    }

    let prefix_from = match &cert.claim {
        Verdict::PositiveFrom { from } if *from == spec.claim_start => Some(*from),
        Verdict::PositiveFrom { from } => {
            return Err(Rejection::ClaimMismatch(format!(
                "positivity claimed from {from} but the spec claims from {}",
                spec.claim_start
            )))
        }
        Verdict::UltimatelyPositiveFrom { from } if *from == u => None,
        Verdict::UltimatelyPositiveFrom { from } => {
            return Err(Rejection::ClaimMismatch(format!("ultimate positivity claimed from {from}, window at {u}")))
        }
        Verdict::Inconclusive { .. } => return Err(Rejection::ClaimMismatch("inconclusive claim".into())),
    };

    let checked_through = regenerate_and_verify(&nr, cert, prefix_from)?;
    Ok(Acceptance { claim: cert.claim.clone(), recomputed_r, u, checked_through })
}

/// Single pass over `a(first) ..= a(u + d - 1)` with a fresh generator.
fn regenerate_and_verify(
    nr: &NormalizedRecurrence,
    cert: &Certificate,
    prefix_from: Option<i64>,
) -> Result<i64, Rejection> {
    let u = cert.u;
    let last = u + nr.order as i64 - 1;
    let mut gen = TermGenerator::streaming(nr);
    if u - 1 < gen.first_index() {
        return Err(Rejection::WindowFailure { n: u, detail: format!("a({}) is not defined", u - 1) });
    }
    while gen.next_index() <= last {
        let n = gen.advance().map_err(|e| Rejection::TermGeneration(e.to_string()))?;
        let a = gen.scaled(n).expect("just produced");
        if prefix_from.is_some_and(|from| n >= from && n <= u) && !a.is_positive() {
            return Err(Rejection::PrefixFailure { n });
        }
        if n == u && !a.is_positive() {
            return Err(Rejection::NotPositiveAtU { u });
        }
        if n >= u {
            let b = gen.scaled(n - 1).expect("a(u - 1) precedes the window");
            let detail = match scaled_ratio_position(b, a, &cert.p, &cert.q) {
                RatioPosition::Inside => None,
                RatioPosition::Undefined => Some(format!("a({}) is zero", n - 1)),
                RatioPosition::AtOrBelowP => Some(format!("a({n})/a({}) <= p", n - 1)),
                RatioPosition::AtOrAboveQ => Some(format!("a({n})/a({}) >= q", n - 1)),
            };
            if let Some(detail) = detail {
                return Err(Rejection::WindowFailure { n, detail });
            }
            // a/b equals the stored ratio exactly iff the cross products agree
            let stored = &cert.window_ratios[(n - u) as usize];
            if a * stored.denom() != stored.numer() * b {
                return Err(Rejection::WindowRatioMismatch { n });
            }
        }
    }
    Ok(last)
}
