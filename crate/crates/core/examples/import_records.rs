//! Imports tool-generated mutant records as a match-and-replace project.

use mutforge::import::{cmd_import, parse_records};

const RECORDS: &str = r#"[
  { "file": "calc.rs", "line": 2, "original": "a + b", "replacement": "a - b", "name": "add_1" },
  { "file": "calc.rs", "line": 2, "original": "a + b", "replacement": "a * b", "name": "add_2" },
  { "file": "calc.rs", "line": 1, "original": "i32", "replacement": "i64" }
]"#;

fn main() -> mutforge::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    std::fs::write(dir.path().join("calc.rs"), "fn add(a: i32, b: i32) -> i32 {\n    a + b\n}\n").expect("write calc.rs");
    let project = cmd_import(&parse_records(RECORDS)?, dir.path())?;
    for entry in project.list()? {
        let names: Vec<&str> = entry.variants.iter().map(|v| v.name.as_str()).collect();
        println!("{} at {}:{} -> {names:?}", entry.name, entry.file, entry.line);
    }
    print!("{}", std::fs::read_to_string(dir.path().join("mutations.json")).expect("sidecar"));
    Ok(())
}
