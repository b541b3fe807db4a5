#![allow(dead_code)]

pub mod random;
pub mod tamper;

use std::path::PathBuf;

use prpos_core::exactmath::{Poly, Rational};
use prpos_core::recurrence::{normalize, parse_spec, NormalizedRecurrence, RecurrenceSpec};

pub fn data_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

pub fn fixture(name: &str) -> (RecurrenceSpec, NormalizedRecurrence) {
    let text = std::fs::read_to_string(data_dir().join(format!("{name}.json"))).unwrap();
    let spec = parse_spec(&text).unwrap();
    let nr = normalize(&spec, false).unwrap();
    (spec, nr)
}

pub fn q(s: &str) -> Rational {
    s.parse().unwrap()
}

/// Coefficient `i` places below the leading one.
pub fn from_top(p: &Poly, i: usize) -> Rational {
    p.coeff(p.degree().unwrap() - i)
}
