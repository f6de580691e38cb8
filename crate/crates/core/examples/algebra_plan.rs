//! Plans mutation expressions over a small catalog.

use mutforge::algebra::{plan, Catalog};

fn main() {
    let mut cat = Catalog::default();
    cat.add_block("insert", [("insert_1", vec!["easy".into()]), ("insert_2", vec![]), ("insert_3", vec![])]);
    cat.add_block("find", [("find_1", vec!["easy".into()])]);
    for expr in ["insert", "insert + *easy", "(insert_2 + insert_3) * find_1", "insert_1 * insert_2"] {
        match plan(expr, &cat) {
            Ok(p) => println!("{expr:<32} => {p:?}"),
            Err(e) => println!("{expr:<32} => error: {e}"),
        }
    }
}
