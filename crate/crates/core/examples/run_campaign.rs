//! Runs a shell check once per planned mutant set and prints the report.

use mutforge::project::Project;
use mutforge::runner::{cmd_test, RunOptions};

const CALC: &str = "\
fn add(a: i32, b: i32) -> i32 {
    /*| add */
    a + b
    /*|| add_1 */
    /*| a - b */
    /*|| add_2 */
    /*| a + b + 0 */
    /* |*/
}
";

fn main() -> mutforge::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    std::fs::write(dir.path().join("calc.rs"), CALC).expect("write calc.rs");
    let mut project = Project::open(dir.path())?;
    // The "test suite" only notices subtraction.
    let check = ["sh".to_string(), "-c".into(), "! grep -qx '    a - b' calc.rs".into()];
    let report = cmd_test(&mut project, "add", &check, &RunOptions { report: None, quiet: true })?;
    print!("{}", report.table());
    println!("surviving: {:?}", report.survivors().map(|r| r.set.join(",")).collect::<Vec<_>>());
    Ok(())
}
