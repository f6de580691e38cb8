//! Turns a block into one unified diff per mutant plus a manifest.

use mutforge::patch::{parse_patch_files, render_patch_bundle};
use mutforge::{MutationBlock, MutationDocument, Segment, Variant};

fn main() -> mutforge::Result<()> {
    let doc = MutationDocument::new(
        "calc.rs",
        vec![
            Segment::Code("fn add(a: i32, b: i32) -> i32 {\n".into()),
            Segment::Block(MutationBlock::new("add", "    a + b\n", vec![Variant::new("add_1", "    a - b\n")])),
            Segment::Code("}\n".into()),
        ],
    );
    let files = render_patch_bundle(std::slice::from_ref(&doc))?;
    for (path, text) in &files {
        println!("==> {path}\n{text}");
    }
    assert_eq!(parse_patch_files(&files)?, vec![doc]);
    Ok(())
}
