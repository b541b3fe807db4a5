//! Deterministic sample of random recurrences that admit a valid witness.

use std::collections::BTreeMap;

use prpos_core::exactmath::{Poly, Rational};
use prpos_core::recurrence::{normalize, NormalizedRecurrence, RecurrenceSpec};
use prpos_core::spectrum::{char_poly, dominant_root_interval};
use prpos_core::witness::{auto_select_pq, Witness};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const SAMPLES: usize = 100;

pub fn random_spec(rng: &mut ChaCha8Rng, id: usize) -> RecurrenceSpec {
    let d = rng.gen_range(1..=3usize);
    let k = rng.gen_range(0..=2usize);
    let start = d as i64 + 3;
    let mut numerators = Vec::new();
    let mut denominators = Vec::new();
    for j in 1..=d {
        // roots at most 2, so denominators never vanish from `start` on
        let mut den = Poly::constant(Rational::from(rng.gen_range(1..=5i64)));
        for _ in 0..k {
            den = &den * &Poly::from_ints(&[rng.gen_range(-2..=3i64), 1]);
        }
        let mut coeffs: Vec<i64> = (0..k).map(|_| rng.gen_range(-20..=20i64)).collect();
        coeffs.push(rng.gen_range(1..=9i64));
        let q = Poly::from_ints(&coeffs);
        let sign = if j == 1 { 1 } else { [1, 1, -1, 0][rng.gen_range(0..4usize)] };
        numerators.push(match sign {
            1 => q,
            -1 => -q,
            _ => Poly::zero(),
        });
        denominators.push(den);
    }
    let initial_terms: BTreeMap<i64, Rational> =
        (start - d as i64..start).map(|n| (n, Rational::from(rng.gen_range(1..=10i64)))).collect();
    RecurrenceSpec {
        name: format!("random-{id}"),
        order: d,
        recurrence_start: start,
        claim_start: start - d as i64,
        numerators,
        denominators,
        initial_terms,
    }
}

pub fn build_sample() -> Vec<(NormalizedRecurrence, Witness)> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut out = Vec::new();
    for id in 0..5000 {
        if out.len() == SAMPLES {
            break;
        }
        let spec = random_spec(&mut rng, id);
        let nr = normalize(&spec, false).unwrap();
        let Some(mu) = dominant_root_interval(&char_poly(&nr)) else { continue };
        if let Ok(w) = auto_select_pq(&nr, &mu) {
            out.push((nr, w));
        }
    }
    assert_eq!(out.len(), SAMPLES, "not enough recurrences with a valid witness");
    out
}
