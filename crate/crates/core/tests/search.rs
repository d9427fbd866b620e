mod common;

use hashswap::oracle::{max_diagonal_weight, OracleConfig};
use hashswap::search::*;
use hashswap::{parse_array, CellState, PartialLatinArray};
use rand::SeedableRng;

const ORDER_EIGHT_FAILURE: &str = "\
8 8
0 x x x x x . .
. 0 . . 1 2 . .
2 . 1 3 . . . .
3 2 . 1 0 . . .
. 3 0 . 2 . . .
1 . . 0 . 3 . .
. . . . . . 4 .
. . . . . . . 5
";

fn opts() -> SearchOptions {
    SearchOptions::default()
}

#[test]
fn order_six_worked_example_branches_on_two_symbols() {
    // after the swaps (0,2) and (0,4) from the order-6 seed, with (2,0) = 2
    let a = parse_array(
        "6 6 4\n\
         0 . x x x .\n\
         . 0 x x . .\n\
         2 x 1 . . .\n\
         x x . 1 . .\n\
         . . . . 2 .\n\
         . . . . . 3\n",
    )
    .unwrap();
    assert_eq!(branch_symbols(&a, 4, 2).unwrap(), vec![0, 3]);
}

#[test]
fn first_steps_from_the_order_eight_seed() {
    let mut f = SearchFrame::seed(8).unwrap();
    // the duplicate of row 3's symbol 1 sits in row 2
    hash_swap(&mut f, 2).unwrap();
    assert_eq!(f.sigma.columns(), &[2, 1, 0, 3, 4, 5, 6, 7]);
    assert_eq!(f.array.get(0, 2), CellState::Marker);
    // 0 and 1 are doubled, so the pool is capped at 2; column 0 holds 0 and
    // row 2 holds 1
    assert_eq!(branch_symbols(&f.array, 2, 0).unwrap(), vec![2]);
    f.array.set(2, 0, CellState::Symbol(2));
    hash_swap(&mut f, 4).unwrap();
    assert_eq!(f.array.get(0, 4), CellState::Marker);
    assert_eq!(branch_symbols(&f.array, 4, 2).unwrap(), vec![0, 3]);
}

#[test]
fn instrumented_runs_hold_every_invariant() {
    let o = SearchOptions {
        instrumented: true,
        ..opts()
    };
    for n in 4..=8 {
        let plain = verify_order(n, Algorithm::Naive, &opts()).unwrap();
        let checked = verify_order(n, Algorithm::Naive, &o).unwrap();
        assert_eq!(plain.stats, checked.stats, "naive {n}");
        assert_eq!(plain.verdict, checked.verdict);
        let plain = verify_order(n, Algorithm::Advanced, &opts()).unwrap();
        let checked = verify_order(n, Algorithm::Advanced, &o).unwrap();
        assert_eq!(plain.stats, checked.stats, "advanced {n}");
        assert!(checked.verdict.proved);
    }
    let swap_only = SearchOptions { swap_only: true, ..o };
    for n in 4..=8 {
        assert!(verify_order(n, Algorithm::Advanced, &swap_only).unwrap().verdict.proved);
    }
}

#[test]
fn parallel_runs_are_deterministic() {
    let seq = verify_order(9, Algorithm::Naive, &opts()).unwrap();
    let par = verify_order(9, Algorithm::Naive, &SearchOptions { threads: 3, ..opts() }).unwrap();
    assert_eq!(seq.stats, par.stats);
    assert_eq!(seq.verdict, par.verdict);
    let seq = verify_order(8, Algorithm::Advanced, &opts()).unwrap();
    let par = verify_order(8, Algorithm::Advanced, &SearchOptions { threads: 2, ..opts() }).unwrap();
    assert_eq!(seq.stats, par.stats);
    assert_eq!(seq.verdict, par.verdict);
}

#[test]
fn published_order_eight_failure_is_found() {
    let r = verify_order(8, Algorithm::Naive, &opts()).unwrap();
    assert_eq!(r.failure_count(), 14);
    let fig = parse_array(ORDER_EIGHT_FAILURE).unwrap();
    let hit = r.verdict.failures.iter().find(|f| f.array == fig).expect("figure among failures");
    assert!(hit.diagonal.is_identity());
    // canonical order is sorted grid text, without duplicates
    let texts: Vec<String> = r.verdict.failures.iter().map(|f| f.array.to_grid_string()).collect();
    let mut sorted = texts.clone();
    sorted.sort();
    sorted.dedup();
    assert_eq!(texts, sorted);
}

#[test]
fn order_nine_failures_extend_order_eight_failures() {
    let eight = verify_order(8, Algorithm::Naive, &opts()).unwrap();
    let nine = verify_order(9, Algorithm::Naive, &opts()).unwrap();
    assert_eq!(nine.failure_count(), 14);
    let restrict = |a: &PartialLatinArray| -> Vec<CellState> {
        (0..8).flat_map(|r| (0..8).map(move |c| (r, c))).map(|(r, c)| a.get(r, c)).collect()
    };
    let mut small: Vec<_> = eight.verdict.failures.iter().map(|f| restrict(&f.array)).collect();
    let mut big: Vec<_> = nine.verdict.failures.iter().map(|f| restrict(&f.array)).collect();
    small.sort_by_key(|v| format!("{v:?}"));
    big.sort_by_key(|v| format!("{v:?}"));
    assert_eq!(small, big);
    for f in &nine.verdict.failures {
        // the added row and column only carry the new diagonal symbol
        let a = &f.array;
        assert_eq!(a.get(8, 8), CellState::Symbol(6));
        assert!((0..8).all(|i| a.get(8, i) == CellState::Empty && a.get(i, 8) == CellState::Empty));
    }
}

#[test]
fn failures_are_inconclusive_not_counterexamples() {
    let r = verify_order(8, Algorithm::Naive, &opts()).unwrap();
    let cfg = OracleConfig::default();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
    let mut completable = 0;
    let mut relaxed = 0;
    for f in &r.verdict.failures {
        // markers hold duplicate symbols 0..=5; the completion search is
        // exhaustive, so None means no Latin completion exists
        if let Some(c) = common::complete_latin::<rand_chacha::ChaCha8Rng>(&f.array, 8, 6, None) {
            assert!(max_diagonal_weight(&c, &cfg).unwrap().value >= 7);
            completable += 1;
        }
        // with markers unconstrained the array does complete, and every
        // completion still has a near transversal
        for _ in 0..3 {
            let c = common::complete_latin(&f.array, 8, 8, Some(&mut rng)).expect("relaxed completion");
            assert!(c.check_latin().is_latin() && c.is_fully_filled());
            assert!(max_diagonal_weight(&c, &cfg).unwrap().value >= 7);
            relaxed += 1;
        }
    }
    assert_eq!(relaxed, 42);
    // none of the inconclusive arrays is realizable as a Latin square
    assert_eq!(completable, 0);
}

#[test]
fn report_round_trips_through_json() {
    let r = verify_order(8, Algorithm::Naive, &opts()).unwrap();
    let text = serde_json::to_string(&r).unwrap();
    let back: SearchReport = serde_json::from_str(&text).unwrap();
    assert_eq!(back, r);
    assert_eq!(r.assumes_order_below, Some(7));
    assert!(matches!(verify_order(3, Algorithm::Naive, &opts()), Err(hashswap::Error::OrderTooSmall(3))));
}
