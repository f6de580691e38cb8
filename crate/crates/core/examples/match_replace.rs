//! Reads a match-and-replace sidecar against its source and applies one
//! mutant without touching the file on disk.

use std::collections::BTreeMap;

use mutforge::matchreplace::{apply_mr, parse_mr_files, parse_sidecar};

const CALC: &str = "fn add(a: i32, b: i32) -> i32 {\n    a + b\n}\n";
const SIDECAR: &str = r#"{
  "name": "add",
  "scope": "calc.rs:2",
  "match": "a + b",
  "variants": [
    { "name": "add_1", "replacement": "a - b" },
    { "name": "add_2", "replacement": "a * b" }
  ]
}"#;

fn main() -> mutforge::Result<()> {
    let blocks = parse_sidecar(SIDECAR)?;
    print!("{}", apply_mr(CALC, &blocks[0], Some("add_2"))?);
    let sources = BTreeMap::from([("calc.rs".to_string(), CALC.to_string())]);
    let docs = parse_mr_files(SIDECAR, &sources)?;
    println!("{} block(s) in {}", docs[0].blocks().count(), docs[0].path);
    Ok(())
}
