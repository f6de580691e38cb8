//! Widens a block that splits a call to the smallest whole expression and
//! renders the runtime dispatch form.

use mutforge::comment::parse_comment;
use mutforge::inast::{normalize_document, render_inast, MiniOracle};
use mutforge::SyntaxProfile;

const SOURCE: &str = "foo(\n/*| foo */\n  0)\n/*|| foo_1 */\n/*|   1) */\n/* |*/\n";

fn main() -> mutforge::Result<()> {
    let doc = parse_comment("foo.mini", SOURCE, &SyntaxProfile::rust())?;
    let norm = normalize_document(&doc, &MiniOracle)?;
    let b = norm.blocks().next().unwrap();
    println!("base {:?}, foo_1 {:?}", b.base.trim(), b.variants[0].body.trim());
    print!("{}", render_inast(&norm, &MiniOracle)?);
    Ok(())
}
