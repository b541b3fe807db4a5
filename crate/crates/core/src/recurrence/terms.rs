use std::collections::VecDeque;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::{NormalizedRecurrence, TermError};
use crate::exactmath::{IntPoly, Rational};

/// Forward generator of exact sequence terms.
///
/// Terms are produced in index order. A generator built with [`TermGenerator::new`]
/// keeps every term; one built with [`TermGenerator::streaming`] keeps only the
/// last `order + 1` terms, which is what long scans need.
///
/// Held terms are stored as integer numerators over one shared positive
/// denominator, so a step never takes a gcd of large operands. For integer
/// sequences the shared denominator stays 1. Scans that only need signs and
/// ratios can read the numerators directly through [`scaled`](Self::scaled).
#[derive(Debug, Clone)]
pub struct TermGenerator {
    order: usize,
    first_index: i64,
    recurrence_start: i64,
    initial: Vec<Rational>,
    coeffs: Vec<(IntPoly, IntPoly)>,
    window: VecDeque<BigInt>,
    denom: BigInt,
    history: Option<Vec<Rational>>,
    next_index: i64,
}

impl TermGenerator {
    pub fn new(nr: &NormalizedRecurrence) -> Self {
        Self::build(nr, true)
    }

    pub fn streaming(nr: &NormalizedRecurrence) -> Self {
        Self::build(nr, false)
    }

    fn build(nr: &NormalizedRecurrence, keep_history: bool) -> Self {
        TermGenerator {
            order: nr.order,
            first_index: nr.first_index,
            recurrence_start: nr.recurrence_start,
            initial: nr.initial_terms.clone(),
            coeffs: nr.int_coefficients(),
            window: VecDeque::with_capacity(nr.order + 2),
            denom: BigInt::one(),
            history: keep_history.then(Vec::new),
            next_index: nr.first_index,
        }
    }

    pub fn first_index(&self) -> i64 {
        self.first_index
    }

    /// Index the next call to [`advance`](Self::advance) will produce.
    pub fn next_index(&self) -> i64 {
        self.next_index
    }

    /// Shared positive denominator of the held numerators.
    pub fn denominator(&self) -> &BigInt {
        &self.denom
    }

    /// Numerator of held term `n` over [`denominator`](Self::denominator).
    /// Only the last `order + 1` terms are held.
    pub fn scaled(&self, n: i64) -> Option<&BigInt> {
        if n >= self.next_index {
            return None;
        }
        let back = (self.next_index - 1 - n) as usize;
        self.window.len().checked_sub(back + 1).and_then(|i| self.window.get(i))
    }

    fn reduced(&self, numer: &BigInt) -> Rational {
        if self.denom.is_one() {
            Rational::from(numer.clone())
        } else {
            Rational::new(numer.clone(), self.denom.clone()).expect("positive denominator")
        }
    }

    /// Term `n` if it is still held, without advancing.
    pub fn cached(&self, n: i64) -> Option<Rational> {
        if n < self.first_index || n >= self.next_index {
            return None;
        }
        if let Some(h) = &self.history {
            return h.get((n - self.first_index) as usize).cloned();
        }
        self.scaled(n).map(|b| self.reduced(b))
    }

    /// Produces the next term and returns its index.
    pub fn advance(&mut self) -> Result<i64, TermError> {
        let n = self.next_index;
        if n < self.recurrence_start {
            let x = self.initial[(n - self.first_index) as usize].clone();
            let scale = x.denom() / self.denom.gcd(x.denom());
            self.rescale(&scale);
            self.window.push_back(x.numer() * (&self.denom / x.denom()));
        } else {
            let b = self.step(n)?;
            self.window.push_back(b);
        }
        if self.window.len() > self.order + 1 {
            self.window.pop_front();
        }
        if self.history.is_some() {
            let value = self.reduced(self.window.back().expect("just pushed"));
            if let Some(h) = &mut self.history {
                h.push(value);
            }
        }
        self.next_index += 1;
        Ok(n)
    }

    /// Produces the next term and returns `(index, value)`.
    pub fn next_term(&mut self) -> Result<(i64, Rational), TermError> {
        let n = self.advance()?;
        let value = match &self.history {
            Some(h) => h.last().cloned().expect("just pushed"),
            None => self.reduced(self.window.back().expect("just pushed")),
        };
        Ok((n, value))
    }

    /// Exact term `a(n)`, advancing the generator as needed.
    pub fn term(&mut self, n: i64) -> Result<Rational, TermError> {
        if n < self.first_index {
            return Err(TermError::BelowFirstIndex { n, first: self.first_index });
        }
        while self.next_index <= n {
            self.advance()?;
        }
        self.cached(n).ok_or(TermError::Evicted { n })
    }

    fn rescale(&mut self, scale: &BigInt) {
        if scale.is_one() {
            return;
        }
        for b in self.window.iter_mut() {
            *b *= scale;
        }
        self.denom *= scale;
    }

    /// Coefficient `P1j(n) / P2j(n)` as a `(numerator, denominator)` pair with
    /// positive denominator.
    fn coefficient(&self, j: usize, n: &BigInt, index: i64) -> Result<(BigInt, BigInt), TermError> {
        let (num_poly, den_poly) = &self.coeffs[j - 1];
        let (pn, pd) = num_poly.eval_parts(n);
        let (qn, qd) = den_poly.eval_parts(n);
        if qn.is_zero() {
            return Err(TermError::DenominatorVanishes { n: index, j });
        }
        // (pn / pd) / (qn / qd)
        let mut num = pn * qd;
        let mut den = qn * pd;
        if den.is_negative() {
            num = -num;
            den = -den;
        }
        let g = num.gcd(&den);
        if !g.is_one() && !g.is_zero() {
            num /= &g;
            den /= &g;
        }
        Ok((num, den))
    }

    /// Numerator of `a(n)`, after rescaling the window so that it shares the
    /// (possibly enlarged) common denominator.
    fn step(&mut self, n: i64) -> Result<BigInt, TermError> {
        let nb = BigInt::from(n);
        let d = self.order;
        let mut parts = Vec::with_capacity(d);
        for j in 1..=d {
            let (num, den) = self.coefficient(j, &nb, n)?;
            if !num.is_zero() {
                parts.push((j, num, den));
            }
        }
        // a(n) = sum / (lcm * denom), with lcm a small integer
        let lcm = parts.iter().fold(BigInt::one(), |acc, (_, _, den)| acc.lcm(den));
        let len = self.window.len();
        let mut sum = BigInt::zero();
        for (j, num, den) in &parts {
            sum += &self.window[len - j] * (num * (&lcm / den));
        }
        if lcm.is_one() {
            return Ok(sum);
        }
        let g = lcm.gcd(&sum.mod_floor(&lcm));
        let (sum, scale) = if g.is_one() { (sum, lcm) } else { (sum / &g, lcm / &g) };
        self.rescale(&scale);
        Ok(sum)
    }
}

/// Exact term `a(n)` from a fresh generator.
pub fn term(nr: &NormalizedRecurrence, n: i64) -> Result<Rational, TermError> {
    TermGenerator::streaming(nr).term(n)
}
