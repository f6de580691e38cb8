use mutforge::timing::{compare, predict_comment, predict_inast, summarize, TimingFile, WorkloadTiming};
use proptest::prelude::*;

fn secs() -> impl Strategy<Value = f64> {
    0.0f64..100.0
}

proptest! {
    #[test]
    fn comment_cost_grows_with_mutants(cold in secs(), warm in secs(), exec in secs(), n in 1u32..500) {
        let a = predict_comment(cold, warm, n, exec).unwrap();
        let b = predict_comment(cold, warm, n + 1, exec).unwrap();
        prop_assert!(b >= a);
        prop_assert!((b - a - warm).abs() < 1e-9 * (1.0 + b.abs()));
    }

    #[test]
    fn inast_cost_ignores_mutant_count(cold in secs(), exec in secs(), n in 1u32..500, m in 1u32..500) {
        let t = |n| WorkloadTiming { n, cold, warm: 0.0, exec };
        let c = WorkloadTiming { n: 1, cold: cold + 1.0, warm: 1.0, exec: exec + 1.0 };
        prop_assert_eq!(compare(&c, &t(n)).unwrap().exec_slowdown, compare(&c, &t(m)).unwrap().exec_slowdown);
        prop_assert_eq!(predict_inast(cold, exec).unwrap(), cold + exec);
    }

    #[test]
    fn break_even_count(cold in 1.0f64..50.0, warm in 0.1f64..10.0, extra in 0.0f64..100.0) {
        // In-AST pays `extra` seconds more per campaign; it wins once the
        // warm rebuilds it saves exceed that.
        let inast = predict_inast(cold + extra, 0.0).unwrap();
        let n_star = (extra / warm).ceil() as u32 + 1;
        prop_assert!(predict_comment(cold, warm, n_star, 0.0).unwrap() >= inast - 1e-9);
        if n_star > 1 {
            prop_assert!(predict_comment(cold, warm, n_star - 1, 0.0).unwrap() < inast + 1e-9);
        }
    }
}

fn close(got: f64, want: f64, tol: f64) -> bool {
    (got - want).abs() <= tol
}

#[test]
fn reference_rows_reproduce_reported_totals() {
    let s = summarize(&TimingFile::reference()).unwrap();
    let want = [("BST", 37.51, 20.40), ("RBT", 41.39, 22.74), ("STLC", 67.17, 59.57)];
    for (row, (name, comment, inast)) in s.rows.iter().zip(want) {
        assert_eq!(row.name, name);
        assert!(close(row.comment_total, comment, 0.05), "{name}: {}", row.comment_total);
        assert!(close(row.inast_total, inast, 0.05), "{name}: {}", row.inast_total);
    }
    assert!(close(s.rows[0].comparison.exec_slowdown, 1.30, 0.06));
    assert!(close(s.rows[1].comparison.exec_slowdown, 1.12, 0.02));
    assert!(close(s.rows[2].comparison.exec_slowdown, 1.07, 0.02));
    assert!(close(s.total_speedup, 1.42, 0.02));
}

#[test]
fn reference_totals_by_hand() {
    // 20.17 + 7·2.47 + 0.04 and 20.35 + 0.05, written out independently.
    let bst = predict_comment(20.17, 2.47, 8, 0.04).unwrap();
    assert!(close(bst, 20.17 + 17.29 + 0.04, 1e-9));
    assert!(close(predict_inast(20.35, 0.05).unwrap(), 20.40, 1e-9));
    let comment: f64 = 37.50 + (18.34 + 12.0 * 1.70 + 2.67) + (19.81 + 9.0 * 1.19 + 36.64);
    let inast: f64 = 20.40 + (19.75 + 2.99) + (20.28 + 39.29);
    let s = summarize(&TimingFile::reference()).unwrap();
    assert!(close(s.comment_total, comment, 1e-9));
    assert!(close(s.inast_total, inast, 1e-9));
}
