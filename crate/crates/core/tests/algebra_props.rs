mod common;

use common::{algebra_case, planner_agrees};
use mutforge::algebra::{parse_expr, plan, Catalog};
use mutforge::Error;
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn planner_matches_brute_force(case in algebra_case(6, 12)) {
        prop_assert!(case.expr.nodes() <= 12);
        if let Err(e) = planner_agrees(&case) {
            return Err(TestCaseError::fail(e));
        }
    }

    #[test]
    fn printing_reparses_to_the_same_tree(case in algebra_case(6, 12)) {
        let e = parse_expr(&case.expr.text()).unwrap();
        prop_assert_eq!(parse_expr(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn self_product_squares_the_plan(case in algebra_case(4, 7)) {
        let cat = common::catalog_of(&case);
        let text = case.expr.text();
        if let Ok(p) = plan(&format!("({text}) * ({text})"), &cat) {
            let single = plan(&text, &cat).unwrap();
            prop_assert_eq!(p.len(), single.len() * single.len());
        }
    }
}

fn bst() -> Catalog {
    let mut c = Catalog::default();
    c.add_block("insert", [("insert_1", vec!["easy".into()]), ("insert_2", vec![]), ("insert_3", vec![])]);
    c.add_block("find", [("find_1", vec!["easy".into()])]);
    c
}

#[test]
fn mutation_name_expands_in_order() {
    let p = plan("insert", &bst()).unwrap();
    let names: Vec<Vec<&str>> = p.iter().map(|s| s.iter().map(String::as_str).collect()).collect();
    assert_eq!(names, [["insert_1"], ["insert_2"], ["insert_3"]]);
}

#[test]
fn sibling_variants_exclude_each_other() {
    match plan("insert_1 * insert_2", &bst()) {
        Err(Error::MutualExclusion { block, .. }) => assert_eq!(block, "insert"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn tag_product_joins_tagged_mutants() {
    let p = plan("insert + *easy", &bst()).unwrap();
    assert_eq!(p.len(), 4);
    assert_eq!(p[3], ["find_1", "insert_1"].iter().map(|s| s.to_string()).collect());
}
