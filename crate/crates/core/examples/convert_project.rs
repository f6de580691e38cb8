//! Converts an on-disk project through every representation and back,
//! keeping the active mutant.

use mutforge::convert::convert;
use mutforge::project::Project;
use mutforge::repr::{Representation, Settings};

const CALC: &str = "\
fn add(a: i32, b: i32) -> i32 {
    /*| add */
    a + b
    /*|| add_1 */
    /*| a - b */
    /* |*/
}
";

fn main() -> mutforge::Result<()> {
    let dir = tempfile::tempdir().expect("temporary directory");
    std::fs::write(dir.path().join("calc.rs"), CALC).expect("write calc.rs");
    let mut project = Project::open(dir.path())?;
    project.set_active("add_1")?;
    for to in [
        Representation::Preprocessor,
        Representation::Patch,
        Representation::Matchreplace,
        Representation::Inast,
        Representation::Comment,
    ] {
        convert(&mut project, to, Settings::default())?;
        let files: Vec<&String> = project.files().keys().filter(|p| !p.starts_with(".mutforge")).collect();
        println!("{:<13} active {:?} files {files:?}", to.to_string(), project.active_set());
    }
    project.reset()?;
    assert_eq!(std::fs::read_to_string(dir.path().join("calc.rs")).expect("read calc.rs"), CALC);
    Ok(())
}
