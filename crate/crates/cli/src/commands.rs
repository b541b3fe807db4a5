use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use prpos_core::certificate::{self, Certificate, EXTENSION};
use prpos_core::exactmath::Rational;
use prpos_core::prover::{default_scan_budget, prove, ProofResult, Verdict};
use prpos_core::recurrence::{normalize, parse_spec, validate_denominators, NormalizedRecurrence, RecurrenceSpec, TermGenerator};
use prpos_core::spectrum::{
    char_poly, dominance_report, isolate_positive_roots, refine, RootInterval, DEFAULT_MARGIN,
};
use prpos_core::witness::{auto_select_pq, build_witness, threshold_breakdown, Witness};
use serde_json::{json, Value};

use crate::render::{digit_count, poly_ends, render_term, term_hash, RATIO_DIGITS};
use crate::{RunConfig, SubcommandKind};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[repr(u8)]
pub enum Outcome {
    Success = 0,
    Reject = 1,
    Inconclusive = 2,
}

type CmdResult = Result<Outcome, String>;

pub fn run(cfg: &RunConfig) -> CmdResult {
    match cfg.subcommand {
        SubcommandKind::Analyze => analyze(cfg),
        SubcommandKind::Certify => certify(cfg),
        SubcommandKind::Check => check(cfg),
        SubcommandKind::Terms => terms(cfg),
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))
}

fn load(cfg: &RunConfig) -> Result<(RecurrenceSpec, NormalizedRecurrence), String> {
    let spec = parse_spec(&read(&cfg.path)?).map_err(|e| format!("{}: {e}", cfg.path.display()))?;
    let nr = normalize(&spec, cfg.strict).map_err(|e| e.to_string())?;
    Ok((spec, nr))
}

fn write_file(path: &Path, text: &str) -> Result<(), String> {
    fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
}

fn pretty(v: &Value) -> String {
    serde_json::to_string_pretty(v).expect("json value serializes")
}

/// Interval width used when reporting the dominant root.
fn mu_width() -> Rational {
    Rational::frac(1, 100_000_000)
}

fn interval_json(iv: &RootInterval) -> Value {
    json!({
        "lo": iv.lo,
        "hi": iv.hi,
        "exact": iv.is_exact(),
        "approx": iv.midpoint().to_decimal(10),
    })
}

fn witness_json(w: &Witness, source: &str) -> Value {
    json!({
        "source": source,
        "p": w.p,
        "q": w.q,
        "p0": w.p0,
        "q0": w.q0,
        "r": w.r,
        "f": poly_ends(&w.f),
        "g": poly_ends(&w.g),
    })
}

/// The witness from explicit `(p, q)` or, failing that, from the dominant root.
fn choose_witness(
    nr: &NormalizedRecurrence,
    cfg: &RunConfig,
    mu: Option<&RootInterval>,
) -> Result<(Witness, &'static str), String> {
    if let Some((p, q)) = &cfg.pq {
        return build_witness(nr, p, q).map(|w| (w, "override")).map_err(|e| e.to_string());
    }
    let mu = mu.ok_or("characteristic polynomial has no positive root; pass --p and --q")?;
    auto_select_pq(nr, mu).map(|w| (w, "auto")).map_err(|e| e.to_string())
}

fn dominant(nr: &NormalizedRecurrence) -> (Vec<RootInterval>, Option<RootInterval>) {
    let cp = char_poly(nr);
    let roots = isolate_positive_roots(&cp);
    let mu = roots.last().map(|iv| refine(&cp, iv.clone(), &mu_width()).expect("positive width"));
    (roots, mu)
}

fn analyze(cfg: &RunConfig) -> CmdResult {
    let (spec, nr) = load(cfg)?;
    let cp = char_poly(&nr);
    let (roots, mu) = dominant(&nr);
    let report = dominance_report(&cp, DEFAULT_MARGIN);
    let vanishing = validate_denominators(&nr);

    let mut doc = json!({
        "name": spec.name,
        "order": nr.order,
        "common_degree": nr.common_degree,
        "signs": nr.signs,
        "relaxations": nr.relaxations,
        "char_poly": cp.poly,
        "char_poly_text": cp.poly.display_in("t"),
        "positive_roots": roots.iter().map(interval_json).collect::<Vec<_>>(),
        "mu": mu.as_ref().map(interval_json),
        "dominance": report,
        "vanishing_denominators": vanishing,
    });
    let mut text = String::new();
    writeln!(text, "sequence: {}", spec.name).unwrap();
    writeln!(text, "order d = {}, common degree k = {}, signs {:?}", nr.order, nr.common_degree, nr.signs).unwrap();
    for rel in &nr.relaxations {
        writeln!(text, "relaxation: {rel}").unwrap();
    }
    writeln!(text, "characteristic polynomial: {}", cp.poly.display_in("t")).unwrap();
    match &mu {
        Some(iv) if iv.is_exact() => writeln!(text, "mu = {} (exact root)", iv.lo).unwrap(),
        Some(iv) => writeln!(text, "mu in [{}, {}] ~ {}", iv.lo.to_decimal(10), iv.hi.to_decimal(10), iv.midpoint().to_decimal(10)).unwrap(),
        None => writeln!(text, "no positive real root").unwrap(),
    }
    writeln!(
        text,
        "dominance (heuristic, not part of any certificate): unique = {}, |mu1| ~ {:.6}, |mu2| ~ {:.6}{}",
        report.unique_dominant,
        report.dominant_modulus,
        report.second_modulus,
        report.diagnostic.as_deref().map(|d| format!(" ({d})")).unwrap_or_default()
    )
    .unwrap();
    if !vanishing.is_empty() {
        writeln!(text, "warning: a denominator vanishes at n = {vanishing:?}").unwrap();
    }

    match choose_witness(&nr, cfg, mu.as_ref()) {
        Ok((w, source)) => {
            doc["witness"] = witness_json(&w, source);
            writeln!(text, "witness ({source}): p = {}, q = {}", w.p, w.q).unwrap();
            writeln!(text, "p0 = {}\nq0 = {}\nr = {}", w.p0, w.q0, w.r).unwrap();
            for (name, poly) in [("f", &w.f), ("g", &w.g)] {
                let ends = poly_ends(poly);
                writeln!(text, "{name}: degree {}, leading {}, trailing {}", ends["degree"], ends["leading"], ends["trailing"]).unwrap();
            }
            if cfg.verbosity > 0 {
                let b = threshold_breakdown(&nr, &w.f, &w.g, &w.p0, &w.q0).map_err(|e| e.to_string())?;
                writeln!(text, "threshold floors: {b}").unwrap();
            }
        }
        Err(e) => {
            doc["witness_error"] = json!(e);
            writeln!(text, "no witness: {e}").unwrap();
        }
    }

    if let Some(out) = &cfg.output {
        write_file(out, &(pretty(&doc) + "\n"))?;
    }
    if cfg.json {
        println!("{}", pretty(&doc));
    } else {
        print!("{text}");
    }
    Ok(Outcome::Success)
}

fn default_output(spec_path: &Path) -> PathBuf {
    let stem = spec_path.file_stem().and_then(|s| s.to_str()).unwrap_or("certificate");
    PathBuf::from(format!("{stem}.{EXTENSION}"))
}

fn window_json(pr: &ProofResult) -> Vec<Value> {
    let Some(u) = pr.u else { return Vec::new() };
    pr.window_ratios
        .iter()
        .enumerate()
        .map(|(i, ratio)| {
            let n = u + i as i64;
            json!({
                "n": n,
                "ratio": ratio,
                "ratio_approx": ratio.to_decimal(RATIO_DIGITS),
                "term_digits": digit_count(&pr.window_terms[i + 1]),
                "term_sha256": term_hash(&pr.window_terms[i + 1]),
            })
        })
        .collect()
}

fn certify(cfg: &RunConfig) -> CmdResult {
    let started = Instant::now();
    let (spec, nr) = load(cfg)?;
    let vanishing = validate_denominators(&nr);
    if let Some(n) = vanishing.first() {
        return Err(format!("a denominator vanishes at n = {n}; the recurrence is not defined there"));
    }
    let mu = if cfg.pq.is_some() { None } else { dominant(&nr).1 };
    let (w, source) = choose_witness(&nr, cfg, mu.as_ref())?;
    let budget = cfg.scan_budget.unwrap_or_else(|| default_scan_budget(w.r));
    let pr = prove(&nr, &w, budget).map_err(|e| e.to_string())?;
    let elapsed = started.elapsed().as_secs_f64();

    let mut doc = json!({
        "name": spec.name,
        "witness": witness_json(&w, source),
        "u": pr.u,
        "verdict": pr.verdict,
        "scanned_through": pr.scanned_through,
        "window": window_json(&pr),
        "seconds": elapsed,
    });
    let mut text = String::new();
    writeln!(text, "p = {}, q = {} ({source})", w.p, w.q).unwrap();
    writeln!(text, "p0 = {}, q0 = {}", w.p0, w.q0).unwrap();
    writeln!(text, "r = {}", w.r).unwrap();

    let outcome = if pr.verdict.is_conclusive() {
        let cert = certificate::emit(&pr, &nr, &spec).map_err(|e| e.to_string())?;
        let path = cfg.output.clone().unwrap_or_else(|| default_output(&cfg.path));
        write_file(&path, &cert.to_canonical_json())?;
        doc["certificate"] = json!(path.display().to_string());
        writeln!(text, "u = {}", pr.u.expect("conclusive verdict has u")).unwrap();
        for entry in window_json(&pr) {
            writeln!(
                text,
                "  a({n})/a({m}) ~ {approx}  [a({n}): {digits} digits, sha256 {hash}]",
                n = entry["n"],
                m = entry["n"].as_i64().unwrap() - 1,
                approx = entry["ratio_approx"].as_str().unwrap(),
                digits = entry["term_digits"],
                hash = &entry["term_sha256"].as_str().unwrap()[..16],
            )
            .unwrap();
        }
        writeln!(text, "verdict: {}", pr.verdict).unwrap();
        writeln!(text, "certificate: {}", path.display()).unwrap();
        Outcome::Success
    } else {
        let Verdict::Inconclusive { reason } = &pr.verdict else { unreachable!() };
        writeln!(text, "verdict: inconclusive: {reason}").unwrap();
        writeln!(text, "largest n scanned: {}", pr.scanned_through).unwrap();
        Outcome::Inconclusive
    };
    writeln!(text, "time: {elapsed:.2}s").unwrap();

    if cfg.json {
        println!("{}", pretty(&doc));
    } else {
        print!("{text}");
    }
    Ok(outcome)
}

fn check(cfg: &RunConfig) -> CmdResult {
    let text = read(&cfg.path)?;
    // a document that is not a well-formed certificate is rejected like any other
    let result = Certificate::from_json(&text)
        .map_err(|e| e.to_string())
        .and_then(|cert| certificate::check(&cert).map_err(|rej| rej.to_string()));
    if cfg.json {
        let doc = match &result {
            Ok(acc) => json!({
                "accepted": true,
                "claim": acc.claim,
                "u": acc.u,
                "recomputed_r": acc.recomputed_r,
                "checked_through": acc.checked_through,
            }),
            Err(reason) => json!({ "accepted": false, "reason": reason }),
        };
        println!("{}", pretty(&doc));
    }
    match result {
        Ok(acc) => {
            if !cfg.json {
                println!("{acc}");
            }
            Ok(Outcome::Success)
        }
        Err(rej) => {
            eprintln!("rejected: {rej}");
            Ok(Outcome::Reject)
        }
    }
}

fn terms(cfg: &RunConfig) -> CmdResult {
    let (_, nr) = load(cfg)?;
    let n = cfg.n.expect("terms takes an index");
    let mut gen = TermGenerator::new(&nr);
    if n < gen.first_index() {
        return Err(format!("n = {n} is below the first index {}", gen.first_index()));
    }
    let mut rows = Vec::new();
    while gen.next_index() <= n {
        let (i, a) = gen.next_term().map_err(|e| e.to_string())?;
        rows.push((i, a.clone()));
    }
    if cfg.json {
        let doc: Vec<Value> = rows
            .iter()
            .map(|(i, a)| json!({ "n": i, "value": render_term(a, cfg.full), "digits": digit_count(a) }))
            .collect();
        println!("{}", pretty(&json!({ "terms": doc })));
    } else {
        for (i, a) in &rows {
            println!("{i}: {}", render_term(a, cfg.full));
        }
    }
    Ok(Outcome::Success)
}
