use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::SpecError;
use crate::exactmath::{Poly, Rational};

/// A P-recursive sequence given by
/// `a(n) = sum_j P1j(n) / P2j(n) * a(n - j)` for `n >= recurrence_start`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceSpec {
    pub name: String,
    pub order: usize,
    /// Smallest `n` at which the recurrence is asserted.
    pub recurrence_start: i64,
    /// Smallest index from which positivity is claimed.
    pub claim_start: i64,
    pub numerators: Vec<Poly>,
    pub denominators: Vec<Poly>,
    /// Exactly the indices `recurrence_start - order .. recurrence_start`.
    pub initial_terms: BTreeMap<i64, Rational>,
}

/// On-disk layout; all scalars are strings so no precision is lost.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SpecDocument {
    name: String,
    order: i64,
    recurrence_start: i64,
    claim_start: i64,
    numerators: Vec<Vec<String>>,
    denominators: Vec<Vec<String>>,
    initial_terms: BTreeMap<String, String>,
}

fn field_err(field: impl Into<String>, message: impl Into<String>) -> SpecError {
    SpecError::Field { field: field.into(), message: message.into() }
}

fn parse_poly(field: &str, raw: &[String]) -> Result<Poly, SpecError> {
    raw.iter()
        .enumerate()
        .map(|(i, s)| {
            s.parse::<Rational>()
                .map_err(|e| field_err(format!("{field}[{i}]"), e.to_string()))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Poly::new)
}

impl RecurrenceSpec {
    /// Index of the first initial term.
    pub fn first_index(&self) -> i64 {
        self.recurrence_start - self.order as i64
    }

    pub fn from_json(text: &str) -> Result<Self, SpecError> {
        let doc: SpecDocument = serde_json::from_str(text).map_err(|e| SpecError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    pub fn from_value(value: serde_json::Value) -> Result<Self, SpecError> {
        let doc: SpecDocument = serde_json::from_value(value).map_err(|e| SpecError::Malformed(e.to_string()))?;
        Self::from_document(doc)
    }

    fn from_document(doc: SpecDocument) -> Result<Self, SpecError> {
        if doc.order <= 0 {
            return Err(field_err("order", format!("must be a positive integer, got {}", doc.order)));
        }
        let order = doc.order as usize;
        for (field, list) in [("numerators", &doc.numerators), ("denominators", &doc.denominators)] {
            if list.len() != order {
                return Err(field_err(field, format!("expected {order} polynomials, got {}", list.len())));
            }
        }
        let numerators = doc
            .numerators
            .iter()
            .enumerate()
            .map(|(j, raw)| parse_poly(&format!("numerators[{j}]"), raw))
            .collect::<Result<Vec<_>, _>>()?;
        let denominators = doc
            .denominators
            .iter()
            .enumerate()
            .map(|(j, raw)| parse_poly(&format!("denominators[{j}]"), raw))
            .collect::<Result<Vec<_>, _>>()?;
        if let Some(j) = denominators.iter().position(Poly::is_zero) {
            return Err(field_err(format!("denominators[{j}]"), "denominator polynomial is zero"));
        }

        let mut initial_terms = BTreeMap::new();
        for (key, value) in &doc.initial_terms {
            let idx: i64 = key
                .trim()
                .parse()
                .map_err(|_| field_err(format!("initial_terms.{key}"), "index is not an integer"))?;
            let v = value
                .parse::<Rational>()
                .map_err(|e| field_err(format!("initial_terms.{key}"), e.to_string()))?;
            if initial_terms.insert(idx, v).is_some() {
                return Err(field_err(format!("initial_terms.{key}"), "duplicate index"));
            }
        }
        let first = doc
            .recurrence_start
            .checked_sub(doc.order)
            .ok_or_else(|| field_err("recurrence_start", "out of range"))?;
        for idx in first..doc.recurrence_start {
            if !initial_terms.contains_key(&idx) {
                return Err(field_err("initial_terms", format!("missing initial term for index {idx}")));
            }
        }
        if let Some(extra) = initial_terms.keys().find(|&&i| i < first || i >= doc.recurrence_start) {
            return Err(field_err(
                "initial_terms",
                format!("index {extra} outside the initial range {first}..{}", doc.recurrence_start - 1),
            ));
        }
        if doc.claim_start < first {
            return Err(field_err(
                "claim_start",
                format!("{} precedes the first initial term index {first}", doc.claim_start),
            ));
        }

        Ok(RecurrenceSpec {
            name: doc.name,
            order,
            recurrence_start: doc.recurrence_start,
            claim_start: doc.claim_start,
            numerators,
            denominators,
            initial_terms,
        })
    }

    fn to_document(&self) -> SpecDocument {
        let poly_strings = |p: &Poly| p.coeffs().iter().map(Rational::to_string).collect();
        SpecDocument {
            name: self.name.clone(),
            order: self.order as i64,
            recurrence_start: self.recurrence_start,
            claim_start: self.claim_start,
            numerators: self.numerators.iter().map(poly_strings).collect(),
            denominators: self.denominators.iter().map(poly_strings).collect(),
            initial_terms: self
                .initial_terms
                .iter()
                .map(|(k, v)| (k.to_string(), v.to_string()))
                .collect(),
        }
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self.to_document()).expect("spec document serializes")
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(&self.to_document()).expect("spec document serializes")
    }
}

/// Parses a spec document from JSON text.
pub fn parse_spec(document: &str) -> Result<RecurrenceSpec, SpecError> {
    RecurrenceSpec::from_json(document)
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOUBLING: &str = r#"{
        "name": "doubling", "order": 1, "recurrence_start": 1, "claim_start": 0,
        "numerators": [["2", "2"]], "denominators": [["1", "1"]],
        "initial_terms": {"0": "1"}
    }"#;

    fn field_of(err: SpecError) -> String {
        match err {
            SpecError::Field { field, message } => format!("{field}: {message}"),
            other => panic!("expected field error, got {other:?}"),
        }
    }

    #[test]
    fn parses_minimal_spec() {
        let s = parse_spec(DOUBLING).unwrap();
        assert_eq!(s.order, 1);
        assert_eq!(s.first_index(), 0);
        assert_eq!(s.numerators[0], Poly::from_ints(&[2, 2]));
        assert_eq!(s.initial_terms[&0], Rational::one());
    }

    #[test]
    fn missing_initial_term_names_index() {
        let doc = DOUBLING.replace(r#""initial_terms": {"0": "1"}"#, r#""initial_terms": {}"#);
        let msg = field_of(parse_spec(&doc).unwrap_err());
        assert!(msg.contains("missing initial term for index 0"), "{msg}");
    }

    #[test]
    fn rejects_nonpositive_order() {
        let doc = DOUBLING.replace(r#""order": 1"#, r#""order": 0"#);
        assert!(field_of(parse_spec(&doc).unwrap_err()).starts_with("order"));
    }

    #[test]
    fn rejects_zero_denominator() {
        let doc = DOUBLING.replace(r#"[["1", "1"]]"#, r#"[["0", "0/5"]]"#);
        assert!(field_of(parse_spec(&doc).unwrap_err()).starts_with("denominators[0]"));
    }

    #[test]
    fn rejects_bad_coefficient_with_path() {
        let doc = DOUBLING.replace(r#"[["2", "2"]]"#, r#"[["2", "2.5"]]"#);
        assert!(field_of(parse_spec(&doc).unwrap_err()).starts_with("numerators[0][1]"));
    }

    #[test]
    fn rejects_claim_before_first_term() {
        let doc = DOUBLING.replace(r#""claim_start": 0"#, r#""claim_start": -1"#);
        assert!(field_of(parse_spec(&doc).unwrap_err()).starts_with("claim_start"));
    }

    #[test]
    fn rejects_malformed_and_unknown_fields() {
        assert!(matches!(parse_spec("{"), Err(SpecError::Malformed(_))));
        let doc = DOUBLING.replace(r#""name""#, r#""extra": 1, "name""#);
        assert!(matches!(parse_spec(&doc), Err(SpecError::Malformed(_))));
    }

    #[test]
    fn round_trips_through_json() {
        let s = parse_spec(DOUBLING).unwrap();
        let again = parse_spec(&s.to_json_pretty()).unwrap();
        assert_eq!(s, again);
    }
}
