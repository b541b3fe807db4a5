//! Acceptance gate: one PASS/FAIL line per criterion.

mod common;
#[path = "../../core/tests/common/mod.rs"]
mod shared;

use std::fs;
use std::panic::{self, AssertUnwindSafe};
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use common::{code, data, json, prpos, stderr};
use prpos_core::certificate::{check, emit, Certificate};
use prpos_core::exactmath::{Poly, Rational};
use prpos_core::prover::{prove, Verdict};
use prpos_core::recurrence::TermGenerator;
use prpos_core::witness::{build_witness, lemma_guard};
use serde_json::Value;
use shared::{fixture, q};
use tempfile::TempDir;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn rat(v: &Value) -> Rational {
    v.as_str().expect("rational string").parse().expect("rational")
}

/// Certifies a reference example through the binary and returns the parsed
/// certificate, the summary and the wall time.
fn certify(dir: &Path, name: &str, p: &str, qq: &str) -> Result<(Value, Value, Duration), String> {
    let spec = data(&format!("{name}.json"));
    let cert_path = dir.join(format!("{name}.poscert.json"));
    let start = Instant::now();
    let out = prpos(
        dir,
        &["certify", spec.to_str().unwrap(), "--p", p, "--q", qq, "--json", "--output", cert_path.to_str().unwrap()],
    );
    let elapsed = start.elapsed();
    ensure(code(&out) == 0, || format!("certify {name} exited {}: {}", code(&out), stderr(&out)))?;
    let cert: Value = serde_json::from_str(&fs::read_to_string(&cert_path).map_err(|e| e.to_string())?)
        .map_err(|e| e.to_string())?;
    Ok((cert, json(&out), elapsed))
}

struct Expect<'a> {
    name: &'a str,
    p: &'a str,
    q: &'a str,
    p0: &'a str,
    q0: &'a str,
    /// Leading coefficients of f, highest first.
    f_top: &'a [&'a str],
    f_const: &'a str,
    g_top: &'a [&'a str],
    g_const: &'a str,
    r: i64,
    u: i64,
    from: i64,
}

fn reference_example(dir: &Path, e: &Expect, limit: Duration) -> Outcome {
    let (cert, summary, elapsed) = certify(dir, e.name, e.p, e.q)?;
    let eq = |key: &str, v: &Value, want: &str| -> Result<(), String> {
        ensure(rat(v) == q(want), || format!("{key} = {v}, expected {want}"))
    };
    eq("p0", &cert["p0"], e.p0)?;
    eq("q0", &cert["q0"], e.q0)?;
    for (poly, top, constant) in [("f", e.f_top, e.f_const), ("g", e.g_top, e.g_const)] {
        let coeffs = cert[poly].as_array().unwrap();
        for (i, want) in top.iter().enumerate() {
            eq(&format!("{poly} coefficient {i} from the top"), &coeffs[coeffs.len() - 1 - i], want)?;
        }
        eq(&format!("{poly} constant"), &coeffs[0], constant)?;
    }
    ensure(cert["r"] == e.r, || format!("r = {}", cert["r"]))?;
    ensure(cert["u"] == e.u, || format!("u = {}", cert["u"]))?;
    let (p, qq) = (q(e.p), q(e.q));
    let ratios = cert["window_ratios"].as_array().unwrap();
    let order = cert["spec"]["order"].as_u64().unwrap() as usize;
    ensure(ratios.len() == order, || format!("{} window ratios for order {order}", ratios.len()))?;
    ensure(ratios.iter().all(|x| rat(x) > p && rat(x) < qq), || "window ratio outside (p, q)".into())?;
    let want = Verdict::PositiveFrom { from: e.from };
    let claim: Verdict = serde_json::from_value(cert["claim"].clone()).map_err(|x| x.to_string())?;
    ensure(claim == want, || format!("claim {claim}, expected {want}"))?;
    ensure(summary["u"] == e.u, || "summary disagrees with certificate".into())?;
    ensure(elapsed < limit, || format!("took {elapsed:?}"))?;
    Ok(format!("r = u = {}, {want}, {:.2}s", e.u, elapsed.as_secs_f64()))
}

fn criterion_1(dir: &Path) -> Outcome {
    reference_example(
        dir,
        &Expect {
            name: "franel5",
            p: "30",
            q: "33",
            p0: "2487760/9",
            q0: "786775/18",
            f_top: &["2487760/9", "-35745094/3"],
            f_const: "-505347584/825",
            g_top: &["786775/18", "90780415/6"],
            g_const: "1230826688/1815",
            r: 27099,
            u: 27099,
            from: 0,
        },
        Duration::from_secs(300),
    )
}

fn criterion_2(dir: &Path) -> Outcome {
    reference_example(
        dir,
        &Expect {
            name: "grz4",
            p: "64",
            q: "226",
            p0: "28557312",
            q0: "124675285843968/1442897",
            f_top: &["28557312", "104103936"],
            f_const: "31375/2",
            g_top: &["124675285843968/1442897", "784776214609920/1442897"],
            g_const: "188783701250/1442897",
            r: 1148,
            u: 1148,
            from: 2,
        },
        Duration::from_secs(60),
    )
}

fn criterion_3(dir: &Path) -> Outcome {
    reference_example(
        dir,
        &Expect {
            name: "a105641",
            p: "3",
            q: "7/2",
            p0: "253504/11907",
            q0: "800384/151263",
            f_top: &["253504/11907", "-158848/3969"],
            f_const: "-96370688/11907",
            g_top: &["800384/151263", "19036928/50421"],
            g_const: "1571422208/151263",
            r: 2645,
            u: 2645,
            from: 3,
        },
        Duration::from_secs(60),
    )
}

fn criterion_4(dir: &Path) -> Outcome {
    let cases: [(&str, &[&str]); 3] = [
        ("franel5", &["32", "-353", "-21", "1"]),
        ("grz4", &["331776", "55296", "3456", "-160", "1"]),
        ("a105641", &["1/2", "1/2", "2", "-1", "1/2", "-7/2", "1"]),
    ];
    for (name, coeffs) in cases {
        let out = prpos(dir, &["analyze", data(&format!("{name}.json")).to_str().unwrap(), "--json"]);
        ensure(code(&out) == 0, || format!("analyze {name}: {}", stderr(&out)))?;
        let doc = json(&out);
        let got: Vec<Rational> = doc["char_poly"].as_array().unwrap().iter().map(rat).collect();
        let want: Vec<Rational> = coeffs.iter().map(|c| q(c)).collect();
        ensure(got == want, || format!("{name}: characteristic polynomial {}", doc["char_poly_text"]))?;
        if name == "franel5" {
            let mu = &doc["mu"];
            ensure(mu["exact"] == Value::Bool(true), || format!("mu not exact: {mu}"))?;
            ensure(rat(&mu["lo"]) == q("32") && rat(&mu["hi"]) == q("32"), || format!("mu = {mu}"))?;
            let cp = Poly::new(want);
            ensure(cp.eval(&q("32")).is_zero(), || "32 is not a root".into())?;
        }
    }
    Ok("three characteristic polynomials exact, mu = 32 exact".into())
}

fn binomial_power_sum(n: i64, power: u32) -> Rational {
    let mut c = Rational::from(1);
    let mut total = Rational::from(1);
    for k in 1..=n {
        c = c * Rational::frac(n - k + 1, k);
        total += &c.pow(power);
    }
    total
}

fn criterion_5() -> Outcome {
    const REFERENCE: [(&str, &str, &str); 3] = [("franel5", "30", "33"), ("grz4", "64", "226"), ("a105641", "3", "7/2")];

    // (a) guards positive on r..r+100, fixtures and random recurrences
    let random = shared::random::build_sample();
    let mut sampled = Vec::new();
    for (name, p, qq) in REFERENCE {
        let (_, nr) = fixture(name);
        sampled.push((nr.clone(), build_witness(&nr, &q(p), &q(qq)).map_err(|e| e.to_string())?));
    }
    sampled.extend(random.iter().cloned());
    for (i, (nr, w)) in sampled.iter().enumerate() {
        ensure(lemma_guard(w, nr), || format!("guard fails for sample {i}"))?;
        let mut guards = vec![&w.f, &w.g];
        guards.extend(nr.q_polys.iter().filter(|h| !h.is_zero()));
        guards.extend(&nr.den_polys);
        for n in w.r..=w.r + 100 {
            let x = Rational::from(n);
            ensure(guards.iter().all(|h| h.eval(&x).is_positive()), || format!("sample {i} at n = {n}"))?;
        }
    }

    // (b) induction oracle on [u, u + 500] with integer cross-multiplication
    for (name, p, qq) in REFERENCE {
        let (_, nr) = fixture(name);
        let w = build_witness(&nr, &q(p), &q(qq)).unwrap();
        let u = prove(&nr, &w, 100).map_err(|e| e.to_string())?.u.ok_or("no u")?;
        let mut gen = TermGenerator::streaming(&nr);
        let mut prev = gen.term(u - 1).unwrap();
        for n in u..=u + 500 {
            let a = gen.term(n).unwrap();
            ensure(a.is_integer() && prev.is_integer(), || format!("{name}: non-integer term"))?;
            let (an, bn) = (a.numer(), prev.numer());
            let lower = w.p.numer() * bn < w.p.denom() * an;
            let upper = w.q.denom() * an < w.q.numer() * bn;
            ensure(lower && upper, || format!("{name}: bracket fails at n = {n}"))?;
            prev = a;
        }
    }

    // (c) L operator: scaling and zero characterization
    let polys: Vec<&Poly> = sampled.iter().flat_map(|(_, w)| [&w.f, &w.g]).collect();
    for h in &polys {
        let l = h.l_bound().unwrap();
        for c in [q("7"), q("1/3")] {
            ensure(h.scale(&c).l_bound().unwrap() == &c * &l, || format!("scaling fails for {h}"))?;
        }
        let deg = h.degree().unwrap();
        let nonneg_tail = (0..deg).all(|i| !h.coeff(i).is_negative());
        ensure(l.is_zero() == nonneg_tail, || format!("zero characterization fails for {h}"))?;
    }
    ensure(Poly::zero().l_bound().is_err(), || "L of zero polynomial defined".into())?;

    // (d) Franel terms are sums of fifth powers of binomials
    let (_, nr) = fixture("franel5");
    let mut gen = TermGenerator::new(&nr);
    for n in 0..=200 {
        ensure(gen.term(n).unwrap() == binomial_power_sum(n, 5), || format!("Franel a({n})"))?;
    }

    // (e) round trip and single-field tamper fuzzing
    let mut fuzzed = 0;
    for (name, p, qq) in [("doubling", "99/50", "101/50"), ("grz4", "64", "226"), ("a105641", "3", "7/2")] {
        let (spec, nr) = fixture(name);
        let w = build_witness(&nr, &q(p), &q(qq)).unwrap();
        let cert = emit(&prove(&nr, &w, 1000).unwrap(), &nr, &spec).map_err(|e| e.to_string())?;
        let back = Certificate::from_json(&cert.to_canonical_json()).map_err(|e| e.to_string())?;
        ensure(back == cert && check(&back).is_ok(), || format!("{name}: round trip"))?;
        let n = shared::tamper::fuzz(&cert);
        ensure(n.accepted * 20 < n.total, || format!("{name}: {} of {} mutations accepted", n.accepted, n.total))?;
        fuzzed += n.total;
    }
    Ok(format!("{} guard samples, 3 induction oracles, {} L checks, 201 Franel terms, {fuzzed} mutations", sampled.len(), polys.len()))
}

fn source(rel: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/src").join(rel);
    fs::read_to_string(path).unwrap()
}

fn criterion_6(dir: &Path) -> Outcome {
    // nothing approximate is stored or consulted by the checker
    for file in ["certificate.rs", "prover.rs"] {
        let text = source(file);
        ensure(!text.contains("dominance") && !text.contains("f64"), || format!("{file} touches approximate data"))?;
    }
    let mut checked = 0;
    for name in ["franel5", "grz4", "a105641"] {
        let cert_path = dir.join(format!("{name}.poscert.json"));
        let text = fs::read_to_string(&cert_path).map_err(|e| format!("{name}: {e}"))?;
        let doc: Value = serde_json::from_str(&text).unwrap();
        for key in ["mu", "dominance", "dominant_root"] {
            ensure(doc.get(key).is_none(), || format!("{name} certificate stores {key}"))?;
        }

        // clean process: empty directory holding only the certificate, empty environment
        let clean = TempDir::new().unwrap();
        let copy: PathBuf = clean.path().join("c.poscert.json");
        fs::write(&copy, &text).unwrap();
        let out = prpos(clean.path(), &["check", "c.poscert.json", "--json"]);
        ensure(code(&out) == 0, || format!("{name}: clean check failed: {}", stderr(&out)))?;
        let verdict = json(&out);
        ensure(verdict["claim"] == doc["claim"], || format!("{name}: claim changed"))?;

        // the heuristic report cannot be fed to the checker: a certificate carrying it is malformed
        let spec = data(&format!("{name}.json"));
        let report = json(&prpos(dir, &["analyze", spec.to_str().unwrap(), "--json"]));
        ensure(report["dominance"].is_object(), || format!("{name}: no dominance report"))?;
        for (key, value) in [("dominance", report["dominance"].clone()), ("mu", report["mu"].clone())] {
            let mut with = doc.clone();
            with[key] = value;
            fs::write(&copy, serde_json::to_string_pretty(&with).unwrap()).unwrap();
            let out = prpos(clean.path(), &["check", "c.poscert.json"]);
            ensure(code(&out) == 1, || format!("{name}: certificate with {key} was not rejected"))?;
        }
        checked += 1;
    }
    Ok(format!("{checked} certificates re-checked in clean processes; no approximate data stored or read"))
}

fn run(n: usize, f: impl FnOnce() -> Outcome) -> bool {
    let result = panic::catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
        let msg = e
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panic".into());
        Err(msg)
    });
    match result {
        Ok(detail) => {
            println!("criterion {n}: PASS ({detail})");
            true
        }
        Err(why) => {
            println!("criterion {n}: FAIL ({why})");
            false
        }
    }
}

fn main() {
    let dir = TempDir::new().unwrap();
    let d = dir.path();
    let results = [
        run(1, || criterion_1(d)),
        run(2, || criterion_2(d)),
        run(3, || criterion_3(d)),
        run(4, || criterion_4(d)),
        run(5, criterion_5),
        run(6, || criterion_6(d)),
    ];
    let passed = results.iter().filter(|ok| **ok).count();
    println!("acceptance: {passed}/{} criteria pass", results.len());
    if passed != results.len() {
        std::process::exit(1);
    }
}
