//! Predicts campaign cost for source rewriting versus in-AST mutants.

use mutforge::timing::{predict_comment, predict_inast, summarize, TimingFile};

fn main() -> mutforge::Result<()> {
    print!("{}", summarize(&TimingFile::reference())?.table());
    println!();
    let (cold, warm, exec) = (20.0, 2.0, 1.0);
    for n in [1, 5, 10, 50] {
        println!(
            "n = {n:>3}: rewriting {:>7.2} s, in-AST {:>6.2} s",
            predict_comment(cold, warm, n, exec)?,
            predict_inast(cold + 1.0, exec * 1.1)?
        );
    }
    Ok(())
}
