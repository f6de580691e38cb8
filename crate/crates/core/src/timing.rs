//! Build-and-run cost of testing n mutants with source-rewriting versus
//! in-AST mutations.
//!
//! A comment (or any source-rewriting) campaign compiles once cold, then
//! once warm per further mutant; an in-AST campaign compiles once and picks
//! mutants at run time.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorkloadTiming {
    pub n: u32,
    pub cold: f64,
    #[serde(default)]
    pub warm: f64,
    pub exec: f64,
}

impl WorkloadTiming {
    pub fn validate(&self) -> Result<()> {
        if self.n < 1 {
            return Err(Error::Domain("mutant count must be at least 1".into()));
        }
        check_times(&[self.cold, self.warm, self.exec])
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    match times.iter().find(|t| !(t.is_finite() && **t >= 0.0)) {
        Some(t) => Err(Error::Domain(format!("time {t} is not a nonnegative number of seconds"))),
        None => Ok(()),
    }
}

/// cold + (n − 1)·warm + exec
pub fn predict_comment(cold: f64, warm: f64, n: u32, exec: f64) -> Result<f64> {
    if n < 1 {
        return Err(Error::Domain("mutant count must be at least 1".into()));
    }
    check_times(&[cold, warm, exec])?;
    Ok(cold + f64::from(n - 1) * warm + exec)
}

/// cold + exec
pub fn predict_inast(cold: f64, exec: f64) -> Result<f64> {
    check_times(&[cold, exec])?;
    Ok(cold + exec)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Comparison {
    pub compile_speedup: f64,
    pub exec_slowdown: f64,
    pub total_speedup: f64,
}

fn ratio(num: f64, den: f64, what: &str) -> Result<f64> {
    if den <= 0.0 {
        return Err(Error::Domain(format!("{what} must be positive")));
    }
    Ok(num / den)
}

pub fn compare(comment: &WorkloadTiming, inast: &WorkloadTiming) -> Result<Comparison> {
    comment.validate()?;
    inast.validate()?;
    let compile_c = comment.cold + f64::from(comment.n - 1) * comment.warm;
    let total_c = predict_comment(comment.cold, comment.warm, comment.n, comment.exec)?;
    let total_i = predict_inast(inast.cold, inast.exec)?;
    Ok(Comparison {
        compile_speedup: ratio(compile_c, inast.cold, "in-AST compile time")?,
        exec_slowdown: ratio(inast.exec, comment.exec, "comment execution time")?,
        total_speedup: ratio(total_c, total_i, "in-AST total time")?,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Workload {
    pub name: String,
    pub comment: WorkloadTiming,
    pub inast: WorkloadTiming,
}

/// Contents of a timing file for the `model` command:
///
/// ```toml
/// [[workload]]
/// name = "BST"
/// comment = { n = 8, cold = 20.17, warm = 2.47, exec = 0.04 }
/// inast = { n = 8, cold = 20.35, exec = 0.05 }
/// ```
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingFile {
    #[serde(rename = "workload")]
    pub workloads: Vec<Workload>,
}

impl TimingFile {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Domain(format!("timing file: {e}")))
    }

    /// The three workloads measured for the binary search tree, red-black
    /// tree and simply-typed lambda calculus benchmarks.
    pub fn reference() -> Self {
        let row = |name: &str, n, cc, cw, ce, ic, ie| Workload {
            name: name.into(),
            comment: WorkloadTiming { n, cold: cc, warm: cw, exec: ce },
            inast: WorkloadTiming { n, cold: ic, warm: 0.0, exec: ie },
        };
        TimingFile {
            workloads: vec![
                row("BST", 8, 20.17, 2.47, 0.04, 20.35, 0.05),
                row("RBT", 13, 18.34, 1.70, 2.67, 19.75, 2.99),
                row("STLC", 10, 19.81, 1.19, 36.64, 20.28, 39.29),
            ],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SummaryRow {
    pub name: String,
    pub n: u32,
    pub comment_total: f64,
    pub inast_total: f64,
    pub comparison: Comparison,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub rows: Vec<SummaryRow>,
    pub comment_total: f64,
    pub inast_total: f64,
    /// Ratio of the summed totals.
    pub total_speedup: f64,
}

pub fn summarize(file: &TimingFile) -> Result<Summary> {
    let mut rows = Vec::new();
    for w in &file.workloads {
        rows.push(SummaryRow {
            name: w.name.clone(),
            n: w.comment.n,
            comment_total: predict_comment(w.comment.cold, w.comment.warm, w.comment.n, w.comment.exec)?,
            inast_total: predict_inast(w.inast.cold, w.inast.exec)?,
            comparison: compare(&w.comment, &w.inast)?,
        });
    }
    let comment_total: f64 = rows.iter().map(|r| r.comment_total).sum();
    let inast_total: f64 = rows.iter().map(|r| r.inast_total).sum();
    Ok(Summary {
        total_speedup: ratio(comment_total, inast_total, "summed in-AST time")?,
        rows,
        comment_total,
        inast_total,
    })
}

impl Summary {
    pub fn table(&self) -> String {
        let mut out = format!(
            "{:<10} {:>4} {:>14} {:>13} {:>15} {:>13} {:>13}\n",
            "workload", "n", "comment total", "in-AST total", "compile speedup", "exec slowdown", "total speedup"
        );
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{:<10} {:>4} {:>14.2} {:>13.2} {:>14.2}x {:>12.2}x {:>12.2}x",
                r.name,
                r.n,
                r.comment_total,
                r.inast_total,
                r.comparison.compile_speedup,
                r.comparison.exec_slowdown,
                r.comparison.total_speedup
            );
        }
        let n: u32 = self.rows.iter().map(|r| r.n).sum();
        let _ = writeln!(
            out,
            "{:<10} {:>4} {:>14.2} {:>13.2} {:>15} {:>13} {:>12.2}x",
            "total", n, self.comment_total, self.inast_total, "", "", self.total_speedup
        );
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_mutant_costs_one_cold_build() {
        assert_eq!(predict_comment(12.5, 3.0, 1, 0.0).unwrap(), 12.5);
        assert_eq!(predict_inast(0.0, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(predict_comment(1.0, 1.0, 0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(predict_inast(-1.0, 0.0), Err(Error::Domain(_))));
        let zero = WorkloadTiming { n: 1, cold: 0.0, warm: 0.0, exec: 0.0 };
        assert!(matches!(compare(&zero, &zero), Err(Error::Domain(_))));
    }

    #[test]
    fn equal_strategies_tie() {
        let t = WorkloadTiming { n: 1, cold: 10.0, warm: 2.0, exec: 3.0 };
        let c = compare(&t, &t).unwrap();
        assert_eq!(c.total_speedup, 1.0);
        assert_eq!(c.exec_slowdown, 1.0);
        assert_eq!(c.compile_speedup, 1.0);
    }

    #[test]
    fn timing_file_round_trips() {
        let text = toml::to_string(&TimingFile::reference()).unwrap();
        assert_eq!(TimingFile::parse(&text).unwrap(), TimingFile::reference());
        let short = "[[workload]]\nname = \"x\"\ncomment = { n = 2, cold = 1.0, warm = 0.5, exec = 0.0 }\ninast = { n = 2, cold = 1.0, exec = 0.0 }\n";
        assert!(matches!(
            summarize(&TimingFile::parse(short).unwrap()),
            Err(Error::Domain(_))
        ));
    }
}
