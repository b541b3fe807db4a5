//! Exact real root isolation by Sturm sequences and bisection.

use num_bigint::BigInt;
use num_integer::Roots;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::exactmath::{Poly, Rational};

/// An isolating interval for a single real root.
///
/// Either `lo < hi` with `p(lo) * p(hi) < 0` and exactly one root inside, or
/// `lo == hi` when the root itself is known exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RootInterval {
    pub lo: Rational,
    pub hi: Rational,
}

impl RootInterval {
    pub fn exact(root: Rational) -> Self {
        RootInterval { lo: root.clone(), hi: root }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn width(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &Rational) -> bool {
        &self.lo <= x && x <= &self.hi
    }

    pub fn midpoint(&self) -> Rational {
        (&self.lo + &self.hi) * Rational::frac(1, 2)
    }
}

/// Standard Sturm chain `p, p', -rem(p, p'), ...`.
pub fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone()];
    let mut next = p.derivative();
    while !next.is_zero() {
        let prev = chain.last().expect("nonempty");
        let (_, rem) = prev.div_rem(&next).expect("nonzero divisor");
        chain.push(next);
        next = -rem;
    }
    chain
}

/// `p / gcd(p, p')`: same distinct roots, all simple.
pub fn square_free(p: &Poly) -> Poly {
    if p.degree().unwrap_or(0) == 0 {
        return p.clone();
    }
    let chain = sturm_chain(p);
    let g = chain.last().expect("nonempty");
    if g.degree() == Some(0) {
        return p.clone();
    }
    p.div_rem(g).expect("nonzero gcd").0
}

fn sign_variations(chain: &[Poly], x: &Rational) -> usize {
    let mut count = 0;
    let mut last = 0i8;
    for p in chain {
        let s = p.eval(x).signum();
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct roots of the square-free polynomial behind `chain` in `(a, b]`.
fn count_roots(chain: &[Poly], a: &Rational, b: &Rational) -> usize {
    sign_variations(chain, a).saturating_sub(sign_variations(chain, b))
}

/// Possible denominators of rational roots of `p`: the divisors of the leading
/// coefficient of its primitive integer form. Empty when that coefficient is
/// too large to factor by trial division.
fn rational_root_denominators(p: &Poly) -> Vec<BigInt> {
    let (nums, _) = p.integer_form();
    let lead = match nums.last() {
        Some(l) => l.abs(),
        None => return Vec::new(),
    };
    let Some(l) = lead.to_u64().filter(|&l| l <= 1_000_000_000_000) else {
        return vec![BigInt::one()];
    };
    let mut divs = Vec::new();
    for i in 1..=l.sqrt() {
        if l % i == 0 {
            divs.push(BigInt::from(i));
            if i != l / i {
                divs.push(BigInt::from(l / i));
            }
        }
    }
    divs.sort();
    divs
}

/// Looks for an exact rational root inside a narrow enough interval.
fn find_exact_root(p: &Poly, denominators: &[BigInt], iv: &RootInterval) -> Option<Rational> {
    let width = iv.width();
    for b in denominators {
        let bq = Rational::from(b.clone());
        if &width * &bq > Rational::from(64) {
            break;
        }
        let mut k = (&iv.lo * &bq).ceil();
        let top = (&iv.hi * &bq).floor();
        while k <= top {
            let cand = Rational::new(k.clone(), b.clone()).expect("nonzero");
            if p.eval(&cand).is_zero() {
                return Some(cand);
            }
            k += BigInt::one();
        }
    }
    None
}

/// Isolates every distinct real root of `p` in `(lo, hi]`.
pub fn isolate_real_roots(p: &Poly, lo: &Rational, hi: &Rational) -> Vec<RootInterval> {
    if p.degree().unwrap_or(0) == 0 || lo >= hi {
        return Vec::new();
    }
    let sqf = square_free(p);
    let chain = sturm_chain(&sqf);
    let denominators = rational_root_denominators(&sqf);
    let mut out = Vec::new();
    let mut stack = vec![(lo.clone(), hi.clone())];
    while let Some((a, b)) = stack.pop() {
        match count_roots(&chain, &a, &b) {
            0 => {}
            1 => out.push(tighten_single(&sqf, &chain, a, b)),
            _ => {
                let mid = (&a + &b) * Rational::frac(1, 2);
                stack.push((mid.clone(), b));
                stack.push((a, mid));
            }
        }
    }
    out.sort_by(|x, y| x.lo.cmp(&y.lo));
    out.into_iter()
        .map(|iv| match find_exact_root(&sqf, &denominators, &iv) {
            Some(r) if !iv.is_exact() => RootInterval::exact(r),
            _ => iv,
        })
        .collect()
}

/// Turns a half-open `(a, b]` holding one root into an isolating interval
/// whose endpoints are not roots (or an exact root).
fn tighten_single(sqf: &Poly, chain: &[Poly], mut a: Rational, mut b: Rational) -> RootInterval {
    if sqf.eval(&b).is_zero() {
        return RootInterval::exact(b);
    }
    while sqf.eval(&a).is_zero() {
        let mid = (&a + &b) * Rational::frac(1, 2);
        if sqf.eval(&mid).is_zero() {
            return RootInterval::exact(mid);
        }
        if count_roots(chain, &a, &mid) == 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    RootInterval { lo: a, hi: b }
}

/// Bisects `iv` (an isolating interval of a simple root of `p`) until its
/// width is at most `width`, collapsing to an exact root if one is hit.
pub fn refine_interval(p: &Poly, iv: RootInterval, width: &Rational) -> RootInterval {
    let denominators = rational_root_denominators(p);
    refine_with(p, &denominators, iv, width)
}

fn refine_with(p: &Poly, denominators: &[BigInt], mut iv: RootInterval, width: &Rational) -> RootInterval {
    if iv.is_exact() {
        return iv;
    }
    let lo_sign = p.eval(&iv.lo).signum();
    debug_assert!(lo_sign != 0 && lo_sign == -p.eval(&iv.hi).signum());
    while &iv.width() > width {
        if let Some(r) = find_exact_root(p, denominators, &iv) {
            return RootInterval::exact(r);
        }
        let mid = iv.midpoint();
        let s = p.eval(&mid).signum();
        if s == 0 {
            return RootInterval::exact(mid);
        }
        if s == lo_sign {
            iv.lo = mid;
        } else {
            iv.hi = mid;
        }
    }
    iv
}

/// Like [`refine_interval`] but accepts any polynomial, refining against its
/// square-free part.
pub fn refine_root(p: &Poly, iv: RootInterval, width: &Rational) -> RootInterval {
    let sqf = square_free(p);
    refine_interval(&sqf, iv, width)
}
