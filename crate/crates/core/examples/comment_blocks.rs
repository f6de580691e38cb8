//! Parses a comment-annotated function, switches on a mutant and prints
//! the rewritten source.

use mutforge::comment::{parse_comment, render_comment};
use mutforge::SyntaxProfile;

const SOURCE: &str = "\
fn insert(k: K, v: V, t: Tree) -> Tree {
    match t {
        /*| insert */
        E => T(E, k, v, E),
        /*|| insert_1 */
        /*| E => E, */
        /* |*/
        T(l, k2, v2, r) => join(l, k2, v2, r, k, v),
    }
}
";

fn main() -> mutforge::Result<()> {
    let profile = SyntaxProfile::rust();
    let mut doc = parse_comment("bst.rs", SOURCE, &profile)?;
    for b in doc.blocks() {
        let names: Vec<&str> = b.variants.iter().map(|v| v.name.as_str()).collect();
        println!("block {} with variants {names:?}", b.name);
    }
    assert_eq!(render_comment(&doc, &profile)?, SOURCE);

    doc.blocks_mut().next().unwrap().active = Some("insert_1".into());
    println!("{}", render_comment(&doc, &profile)?);
    Ok(())
}
