#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use jsonschema::{Draft, JSONSchema};
use serde_json::Value;

pub fn data(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Runs the binary in `dir` with a clean environment.
pub fn prpos(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_prpos"))
        .args(args)
        .current_dir(dir)
        .env_clear()
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

pub fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", stdout(out)))
}

pub fn schema(name: &str) -> JSONSchema {
    let text = std::fs::read_to_string(data(&format!("schema/{name}.schema.json"))).unwrap();
    let doc: Value = serde_json::from_str(&text).unwrap();
    JSONSchema::options().with_draft(Draft::Draft7).compile(&doc).expect("schema compiles")
}

/// Panics with every validation message when `doc` does not match.
pub fn assert_valid(schema_name: &str, doc: &Value) {
    let s = schema(schema_name);
    if let Err(errors) = s.validate(doc) {
        let msgs: Vec<String> = errors.map(|e| format!("{} at {}", e, e.instance_path)).collect();
        panic!("{schema_name}: {}", msgs.join("; "));
    };
}

/// Spec that only enters its ratio bracket one step after the threshold:
/// `a(n) = (3n + 30)/n * a(n-1)` with `(p, q) = (2, 4)` has `r = 30`, `u = 31`.
pub const LATE_ENTRY: &str = r#"{
  "name": "late entry",
  "order": 1,
  "recurrence_start": 1,
  "claim_start": 0,
  "numerators": [["30", "3"]],
  "denominators": [["0", "1"]],
  "initial_terms": {"0": "1"}
}"#;
