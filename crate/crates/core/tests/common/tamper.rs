//! Single-field mutations of certificates.

use prpos_core::certificate::{check, Certificate};
use prpos_core::exactmath::Rational;
use prpos_core::prover::Verdict;
use prpos_core::recurrence::{normalize, RecurrenceSpec, TermGenerator};
use serde_json::Value;

/// Paths to every number or string leaf.
pub fn leaves(v: &Value, path: &mut Vec<String>, out: &mut Vec<Vec<String>>) {
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                path.push(k.clone());
                leaves(x, path, out);
                path.pop();
            }
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                path.push(i.to_string());
                leaves(x, path, out);
                path.pop();
            }
        }
        Value::Number(_) | Value::String(_) => out.push(path.clone()),
        _ => {}
    }
}

pub fn get_mut<'a>(v: &'a mut Value, path: &[String]) -> &'a mut Value {
    path.iter().fold(v, |v, k| match v {
        Value::Object(m) => m.get_mut(k).unwrap(),
        Value::Array(a) => &mut a[k.parse::<usize>().unwrap()],
        _ => unreachable!(),
    })
}

pub fn mutations(leaf: &Value) -> Vec<Value> {
    match leaf {
        Value::Number(n) => {
            let n = n.as_i64().unwrap();
            vec![Value::from(n + 1), Value::from(n - 1)]
        }
        Value::String(s) => match s.parse::<Rational>() {
            Ok(x) => {
                let one = Rational::from(1);
                [&x + &one, &x - &one, &x * &Rational::from(2), -x.clone(), Rational::from(0)]
                    .into_iter()
                    .map(|y| Value::String(y.to_string()))
                    .collect()
            }
            Err(_) => match s.as_str() {
                "positive-from" => vec![Value::from("ultimately-positive-from")],
                "ultimately-positive-from" => vec![Value::from("positive-from")],
                _ => vec![Value::from(format!("{s}x"))],
            },
        },
        _ => vec![],
    }
}

/// Independent confirmation that an accepted certificate states a true claim:
/// positive terms from the claimed start through u + 300, and the ratio
/// bracket on [u, u + 300].
pub fn claim_holds(cert: &Certificate) {
    let spec = RecurrenceSpec::from_value(cert.spec.clone()).unwrap();
    let nr = normalize(&spec, false).unwrap();
    let from = match cert.claim {
        Verdict::PositiveFrom { from } | Verdict::UltimatelyPositiveFrom { from } => from,
        Verdict::Inconclusive { .. } => panic!("inconclusive claim accepted"),
    };
    let mut gen = TermGenerator::new(&nr);
    let zero = Rational::from(0);
    for n in from..=cert.u + 300 {
        assert!(gen.term(n).unwrap() > zero, "a({n}) not positive");
    }
    for n in cert.u..=cert.u + 300 {
        let (prev, cur) = (gen.term(n - 1).unwrap(), gen.term(n).unwrap());
        assert!(&cert.p * &prev < cur && cur < &cert.q * &prev, "bracket fails at {n}");
    }
}

#[derive(Debug, Default, Clone, Copy)]
pub struct FuzzCount {
    pub total: usize,
    /// Mutations that the checker accepted; each was confirmed sound.
    pub accepted: usize,
}

/// Applies every single-leaf mutation (except the free-text name) and checks
/// that each one is rejected or still states a true claim.
pub fn fuzz(cert: &Certificate) -> FuzzCount {
    let mut count = FuzzCount::default();
    let original: Value = serde_json::from_str(&cert.to_canonical_json()).unwrap();
    let mut paths = Vec::new();
    leaves(&original, &mut Vec::new(), &mut paths);
    for path in paths {
        if path == ["spec", "name"] {
            continue;
        }
        let leaf = get_mut(&mut original.clone(), &path).clone();
        for m in mutations(&leaf) {
            if m == leaf {
                continue;
            }
            count.total += 1;
            let mut doc = original.clone();
            *get_mut(&mut doc, &path) = m;
            let Ok(tampered) = Certificate::from_json(&doc.to_string()) else { continue };
            let Ok(acc) = check(&tampered) else { continue };
            count.accepted += 1;
            assert_eq!(acc.claim, tampered.claim);
            if tampered != *cert {
                claim_holds(&tampered);
            }
        }
    }
    count
}
