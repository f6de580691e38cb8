//! Renders a block as conditional compilation and shows the compiler flags
//! that select each mutant.

use mutforge::preprocessor::{emit_defines, parse_preprocessor, render_preprocessor};
use mutforge::{MutationBlock, MutationDocument, Segment, Variant};

fn main() -> mutforge::Result<()> {
    let doc = MutationDocument::new(
        "calc.c",
        vec![
            Segment::Code("int add(int a, int b) {\n".into()),
            Segment::Block(MutationBlock::new(
                "add",
                "  return a + b;\n",
                vec![Variant::new("add_1", "  return a - b;\n"), Variant::new("add_2", "  return a * b;\n")],
            )),
            Segment::Code("}\n".into()),
        ],
    );
    let text = render_preprocessor(&doc)?;
    print!("{text}");
    assert_eq!(parse_preprocessor("calc.c", &text)?, doc);
    for v in ["add_1", "add_2"] {
        println!("{v}: cc {}", emit_defines([v]).iter().map(|f| format!("-D{f}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
