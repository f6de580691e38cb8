mod common;

use std::path::Path;
use std::process::Command;

use common::{fixture, tree_hashes};
use mutforge::import::{cmd_import, parse_records};
use mutforge::matchreplace::{parse_sidecar, SIDECAR};
use mutforge::project::Project;
use mutforge::repr::{parse_files, render_files, Representation, Settings};
use mutforge::runner::{cmd_test, RunOptions, RunStatus};
use mutforge::Error;

fn sh(script: &str) -> Vec<String> {
    vec!["sh".into(), "-c".into(), script.into()]
}

fn bst_tree() -> tempfile::TempDir {
    let root = tempfile::tempdir().unwrap();
    std::fs::write(root.path().join("bst.rs"), fixture("bst/bst.rs")).unwrap();
    root
}

fn quiet() -> RunOptions {
    RunOptions { report: None, quiet: true }
}

/// Hashes of everything but the run report.
fn hashes_without_report(root: &Path) -> std::collections::BTreeMap<String, String> {
    let mut h = tree_hashes(root);
    h.remove(".mutforge/last-run.json");
    h
}

#[test]
fn crashing_command_leaves_a_reset_tree() {
    let root = bst_tree();
    let mut p = Project::open(root.path()).unwrap();
    p.set_active("insert_3").unwrap();
    let mut reference = Project::open(root.path()).unwrap();
    reference.reset().unwrap();
    let clean = hashes_without_report(root.path());

    let report = cmd_test(&mut p, "insert + *easy", &sh("kill -SEGV $$"), &quiet()).unwrap();
    assert_eq!(hashes_without_report(root.path()), clean);
    let sets: Vec<Vec<&str>> = report.records.iter().map(|r| r.set.iter().map(String::as_str).collect()).collect();
    assert_eq!(sets, [vec!["insert_1"], vec!["insert_2"], vec!["insert_3"], vec!["find_1", "insert_1"]]);
    assert!(report.records.iter().all(|r| r.status == RunStatus::Failed && r.exit_code.is_none()));
    assert_eq!(report.exit_code(true), 0);
    assert!(root.path().join(".mutforge/last-run.json").exists());
}

#[test]
fn command_sees_each_set_applied() {
    let root = bst_tree();
    let mut p = Project::open(root.path()).unwrap();
    let script = "grep -q 'insert_2' .mutforge/state && test \"$MUTFORGE_ACTIVE\" = insert_2";
    let report = cmd_test(&mut p, "insert", &sh(script), &quiet()).unwrap();
    let passed: Vec<&str> = report.survivors().map(|r| r.set[0].as_str()).collect();
    assert_eq!(passed, ["insert_2"]);
    assert_eq!(report.exit_code(true), 1);
    assert_eq!(report.exit_code(false), 0);
}

#[test]
fn bad_expression_spawns_nothing() {
    let root = bst_tree();
    let mut p = Project::open(root.path()).unwrap();
    let marker = root.path().join("ran");
    let cmd = sh(&format!("touch {}", marker.display()));
    assert!(matches!(cmd_test(&mut p, "nonexistent", &cmd, &quiet()), Err(Error::UnknownName(_))));
    assert!(matches!(cmd_test(&mut p, "insert_1 * insert_2", &cmd, &quiet()), Err(Error::MutualExclusion { .. })));
    assert!(!marker.exists());
}

#[test]
fn missing_program_aborts_after_one_record() {
    let root = bst_tree();
    let mut p = Project::open(root.path()).unwrap();
    let before = tree_hashes(root.path());
    let err = cmd_test(&mut p, "insert", &["/nonexistent/program".to_string()], &quiet()).unwrap_err();
    assert!(matches!(err, Error::Spawn { .. }));
    assert_eq!(err.exit_code(), 2);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(root.path().join(".mutforge/last-run.json")).unwrap()).unwrap();
    assert_eq!(report["records"].as_array().unwrap().len(), 1);
    assert_eq!(report["records"][0]["status"], "spawn-error");
    assert!(report["aborted"].is_string());
    let after = hashes_without_report(root.path());
    assert_eq!(after.get("bst.rs"), before.get("bst.rs"));
}

fn calc_tree() -> tempfile::TempDir {
    let root = tempfile::tempdir().unwrap();
    std::fs::write(root.path().join("calc.rs"), fixture("calc/calc.rs")).unwrap();
    root
}

#[test]
fn import_reproduces_the_add_block() {
    let root = calc_tree();
    let records = parse_records(&fixture("import/records.json")).unwrap();
    let p = cmd_import(&records, root.path()).unwrap();
    assert_eq!(p.representation(), Representation::Matchreplace);
    let written = std::fs::read_to_string(root.path().join(SIDECAR)).unwrap();
    assert_eq!(parse_sidecar(&written).unwrap(), parse_sidecar(&fixture("listings/add.json")).unwrap());

    let settings = Settings::default();
    let files = render_files(Representation::Matchreplace, &p.docs, &settings).unwrap();
    assert_eq!(files["mutations.json"], written);
    assert_eq!(parse_files(Representation::Matchreplace, &files, &settings).unwrap(), p.docs);
}

#[test]
fn import_names_unnamed_records() {
    let root = calc_tree();
    let records = parse_records(r#"[{"file": "calc.rs", "line": 2, "original": "+", "replacement": "-"}]"#).unwrap();
    let p = cmd_import(&records, root.path()).unwrap();
    let b = p.docs[0].blocks().next().unwrap();
    assert_eq!(b.name, "calc_l2");
    assert_eq!(b.variants[0].name, "calc_l2_1");
}

#[test]
fn import_rejects_bad_records_without_writing() {
    let root = calc_tree();
    let before = tree_hashes(root.path());
    assert!(matches!(parse_records("{}"), Err(Error::Record { .. })));
    assert!(matches!(parse_records(r#"[{"file": "calc.rs"}]"#), Err(Error::Record { index: 0, .. })));
    for bad in [
        r#"[{"file": "calc.rs", "line": 2, "original": "a / b", "replacement": "a"}]"#,
        r#"[{"file": "calc.rs", "line": 0, "original": "a", "replacement": "b"}]"#,
        r#"[{"file": "nope.rs", "line": 1, "original": "a", "replacement": "b"}]"#,
        r#"[{"file": "calc.rs", "line": 2, "original": "a", "replacement": "b", "name": "not a name"}]"#,
    ] {
        let records = parse_records(bad).unwrap();
        assert!(cmd_import(&records, root.path()).is_err(), "{bad}");
        assert_eq!(tree_hashes(root.path()), before, "{bad}");
    }
}

#[test]
fn import_twice_collides() {
    let root = calc_tree();
    let records = parse_records(&fixture("import/records.json")).unwrap();
    cmd_import(&records, root.path()).unwrap();
    assert!(matches!(cmd_import(&records, root.path()), Err(Error::NameCollision(_))));
}

fn mutforge(root: &Path, args: &[&str]) -> std::process::Output {
    Command::new(env!("CARGO_BIN_EXE_mutforge"))
        .arg("--root")
        .arg(root)
        .args(args)
        .output()
        .unwrap()
}

#[test]
fn binary_end_to_end() {
    let root = bst_tree();
    let clean = std::fs::read_to_string(root.path().join("bst.rs")).unwrap();
    let out = mutforge(root.path(), &["list", "--json"]);
    assert!(out.status.success());
    let listed: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(listed.as_array().unwrap().len(), 2);

    assert!(mutforge(root.path(), &["set", "insert_2"]).status.success());
    assert_ne!(std::fs::read_to_string(root.path().join("bst.rs")).unwrap(), clean);
    assert!(mutforge(root.path(), &["reset"]).status.success());
    assert_eq!(std::fs::read_to_string(root.path().join("bst.rs")).unwrap(), clean);

    let out = mutforge(root.path(), &["set", "nope"]);
    assert_eq!(out.status.code(), Some(2));

    let out = mutforge(root.path(), &["test", "insert", "--expect-fail", "--", "true"]);
    assert_eq!(out.status.code(), Some(1));
    let out = mutforge(root.path(), &["test", "insert", "--expect-fail", "--", "false"]);
    assert_eq!(out.status.code(), Some(0));

    assert!(mutforge(root.path(), &["convert", "--to", "preprocessor"]).status.success());
    let out = mutforge(root.path(), &["set", "insert_1"]);
    assert!(out.status.success());
    assert!(std::fs::read_to_string(root.path().join(".mutforge/state")).unwrap().contains("insert_1"));
    assert!(mutforge(root.path(), &["convert", "--to", "comment"]).status.success());
    assert!(mutforge(root.path(), &["reset"]).status.success());
    assert_eq!(std::fs::read_to_string(root.path().join("bst.rs")).unwrap(), clean);

    let out = mutforge(root.path(), &["model"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stdout).contains("1.42x"));
}
