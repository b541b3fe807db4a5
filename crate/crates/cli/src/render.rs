use prpos_core::exactmath::{Poly, Rational};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

/// Terms with more digits than this are abbreviated unless `--full` is given.
pub const DIGIT_LIMIT: usize = 200;

const LEADING_DIGITS: usize = 12;

/// Digits of ratios shown after the decimal point.
pub const RATIO_DIGITS: usize = 20;

fn abbreviate_digits(digits: &str) -> String {
    format!("⟨{} digits, {}…⟩", digits.len(), &digits[..LEADING_DIGITS])
}

fn render_integer(s: &str, full: bool) -> String {
    let (sign, digits) = s.strip_prefix('-').map_or(("", s), |d| ("-", d));
    if full || digits.len() <= DIGIT_LIMIT {
        s.to_string()
    } else {
        format!("{sign}{}", abbreviate_digits(digits))
    }
}

/// Exact value, or a digit-count summary for very large numerators and
/// denominators.
pub fn render_term(x: &Rational, full: bool) -> String {
    let num = render_integer(&x.numer().to_string(), full);
    if x.is_integer() {
        num
    } else {
        format!("{num}/{}", render_integer(&x.denom().to_string(), full))
    }
}

/// Decimal digit count of the numerator, ignoring the sign.
pub fn digit_count(x: &Rational) -> usize {
    x.numer().magnitude().to_string().len()
}

/// SHA-256 of the canonical string form.
pub fn term_hash(x: &Rational) -> String {
    hex::encode(Sha256::digest(x.to_string().as_bytes()))
}

/// Up to three leading and three trailing coefficients, highest power first.
pub fn poly_ends(p: &Poly) -> Value {
    let c = p.coeffs();
    let head: Vec<String> = c.iter().rev().take(3).map(Rational::to_string).collect();
    let tail: Vec<String> = c.iter().take(3.min(c.len())).rev().map(Rational::to_string).collect();
    json!({ "degree": p.degree(), "leading": head, "trailing": tail })
}
