//! Running a command once per mutant set of a plan.
//!
//! The run report (`.mutforge/last-run.json` unless redirected) is JSON:
//!
//! ```json
//! {
//!   "expression": "insert + *easy",
//!   "plan": [["insert_1"], ["a", "b"]],
//!   "records": [
//!     { "set": ["insert_1"], "command": ["cargo", "test"],
//!       "status": "failed", "exit_code": 101, "duration_secs": 1.52 }
//!   ],
//!   "aborted": null
//! }
//! ```
//!
//! `status` is `passed` (exit 0), `failed` (nonzero exit or signal) or
//! `spawn-error`; an aborted run names the reason in `aborted`.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::process::{Command, Stdio};
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::algebra::{self, MutantSet};
use crate::error::{Error, Result};
use crate::preprocessor::emit_defines;
use crate::project::{write_file, Project, STATE_DIR};

pub const ACTIVE_ENV: &str = "MUTFORGE_ACTIVE";
pub const DEFINES_ENV: &str = "MUTFORGE_DEFINES";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RunStatus {
    Passed,
    Failed,
    SpawnError,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub set: Vec<String>,
    pub command: Vec<String>,
    pub status: RunStatus,
    pub exit_code: Option<i32>,
    pub duration_secs: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub expression: String,
    pub plan: Vec<Vec<String>>,
    pub records: Vec<RunRecord>,
    pub aborted: Option<String>,
}

impl RunReport {
    /// Mutant sets whose command exited successfully.
    pub fn survivors(&self) -> impl Iterator<Item = &RunRecord> {
        self.records.iter().filter(|r| r.status == RunStatus::Passed)
    }

    pub fn exit_code(&self, expect_fail: bool) -> i32 {
        if expect_fail && self.survivors().next().is_some() {
            1
        } else {
            0
        }
    }

    pub fn table(&self) -> String {
        let mut out = format!("{:<40} {:<12} {:>6} {:>9}\n", "mutants", "status", "code", "seconds");
        for r in &self.records {
            let status = match r.status {
                RunStatus::Passed => "passed",
                RunStatus::Failed => "failed",
                RunStatus::SpawnError => "spawn-error",
            };
            let code = r.exit_code.map_or_else(|| "-".to_string(), |c| c.to_string());
            out.push_str(&format!("{:<40} {:<12} {:>6} {:>9.3}\n", r.set.join(","), status, code, r.duration_secs));
        }
        if let Some(reason) = &self.aborted {
            out.push_str(&format!("aborted: {reason}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    /// Where to write the report, relative to the project root; defaults to
    /// `.mutforge/last-run.json`.
    pub report: Option<PathBuf>,
    /// Discard the command's output instead of inheriting it.
    pub quiet: bool,
}

/// Expands `{defines}` and `{active}` in a command template. An argument
/// that is exactly `{defines}` becomes one argument per flag.
pub fn expand_command(template: &[String], set: &MutantSet) -> Vec<String> {
    let defines: Vec<String> = emit_defines(set.iter().map(String::as_str))
        .into_iter()
        .map(|f| format!("-D{f}"))
        .collect();
    let active = set.iter().cloned().collect::<Vec<_>>().join(",");
    let mut out = Vec::new();
    for arg in template {
        if arg == "{defines}" {
            out.extend(defines.iter().cloned());
        } else {
            out.push(arg.replace("{defines}", &defines.join(" ")).replace("{active}", &active));
        }
    }
    out
}

/// Runs `command` once per mutant set of `expression`, strictly in plan
/// order. The project is fully reset before the first set and after the
/// last, on success and on every error path.
pub fn cmd_test(project: &mut Project, expression: &str, command: &[String], options: &RunOptions) -> Result<RunReport> {
    if command.is_empty() {
        return Err(Error::Domain("no command given".into()));
    }
    let plan = algebra::plan(expression, &project.catalog())?;
    let mut report = RunReport {
        expression: expression.to_string(),
        plan: plan.iter().map(|s| s.iter().cloned().collect()).collect(),
        records: Vec::new(),
        aborted: None,
    };
    let outcome = run_plan(project, &plan, command, options, &mut report);
    if let Err(e) = &outcome {
        report.aborted = Some(e.to_string());
    }
    let restored = project.reset();
    let written = write_report(project, &report, options);
    outcome?;
    restored?;
    written?;
    Ok(report)
}

fn run_plan(
    project: &mut Project,
    plan: &[MutantSet],
    command: &[String],
    options: &RunOptions,
    report: &mut RunReport,
) -> Result<()> {
    project.reset()?;
    for set in plan {
        project.activate_only(set)?;
        let argv = expand_command(command, set);
        let defines = expand_command(&["{defines}".to_string()], set);
        let mut cmd = Command::new(&argv[0]);
        cmd.args(&argv[1..])
            .current_dir(&project.root)
            .env(ACTIVE_ENV, active_list(set))
            .env(DEFINES_ENV, defines.join(" "));
        if options.quiet {
            cmd.stdout(Stdio::null()).stderr(Stdio::null());
        }
        let start = Instant::now();
        let status = cmd.status();
        let duration_secs = start.elapsed().as_secs_f64();
        let mut record = RunRecord {
            set: set.iter().cloned().collect(),
            command: argv.clone(),
            status: RunStatus::SpawnError,
            exit_code: None,
            duration_secs,
        };
        match status {
            Ok(status) => {
                record.status = if status.success() { RunStatus::Passed } else { RunStatus::Failed };
                record.exit_code = status.code();
                report.records.push(record);
            }
            Err(source) => {
                report.records.push(record);
                return Err(Error::Spawn {
                    command: argv.join(" "),
                    source,
                });
            }
        }
    }
    Ok(())
}

fn write_report(project: &Project, report: &RunReport, options: &RunOptions) -> Result<()> {
    let rel = options
        .report
        .clone()
        .unwrap_or_else(|| PathBuf::from(STATE_DIR).join("last-run.json"));
    let text = serde_json::to_string_pretty(report).expect("report serializes") + "\n";
    if rel.is_absolute() {
        if let Some(dir) = rel.parent() {
            std::fs::create_dir_all(dir).map_err(|e| Error::io(dir.display().to_string(), e))?;
        }
        std::fs::write(&rel, text).map_err(|e| Error::io(rel.display().to_string(), e))
    } else {
        write_file(&project.root, &rel.to_string_lossy(), &text)
    }
}

/// Active set of a project as the comma list passed in `MUTFORGE_ACTIVE`.
pub fn active_list(active: &BTreeSet<String>) -> String {
    active.iter().cloned().collect::<Vec<_>>().join(",")
}
