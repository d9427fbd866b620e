//! Acceptance criteria, one PASS/FAIL line each. Every tolerance is exact.
//!
//! Runs that take hours are skipped unless `HASHSWAP_EXTENDED=1` is set.

mod common;

use std::time::Instant;

use hashswap::bounds::{
    brute_force_min_nk, brute_force_min_nk_with_prefix, check_sequence, guarantee_length, minimize_nk,
    GuaranteeRule, NkSolver,
};
use hashswap::construction::{certify_no_transversal, drisko};
use hashswap::oracle::{self, max_diagonal_weight, max_partial_transversal_length, OracleConfig};
use hashswap::search::{verify_order, Algorithm, SearchOptions, SearchReport};
use hashswap::{CellState, DiagonalPerm};
use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};

const TABLE: [u64; 20] = [
    11, 17, 28, 41, 58, 78, 107, 140, 177, 226, 283, 346, 436, 525, 626, 736, 887, 1043, 1234, 1449,
];

enum Outcome {
    Pass(String),
    Fail(String),
}

struct Suite {
    extended: bool,
    failed: usize,
}

impl Suite {
    fn run(&mut self, id: &str, title: &str, f: impl FnOnce(bool) -> Outcome) {
        let start = Instant::now();
        let outcome = f(self.extended);
        let secs = start.elapsed().as_secs_f64();
        let (tag, detail) = match outcome {
            Outcome::Pass(d) => ("PASS", d),
            Outcome::Fail(d) => {
                self.failed += 1;
                ("FAIL", d)
            }
        };
        println!("[{tag}] {id} {title}: {detail} ({secs:.1}s)");
    }
}

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Outcome::Pass(detail)
    } else {
        Outcome::Fail(detail)
    }
}

fn run(n: usize, alg: Algorithm, opts: &SearchOptions) -> SearchReport {
    verify_order(n, alg, opts).expect("valid order")
}

fn opts() -> SearchOptions {
    SearchOptions::default()
}

fn main() {
    let extended = std::env::var("HASHSWAP_EXTENDED").is_ok_and(|v| v == "1");
    let mut suite = Suite { extended, failed: 0 };
    println!("acceptance suite (tolerance: exact for every count; extended runs {})",
        if extended { "enabled" } else { "skipped" });

    suite.run("1", "naive verdicts", |_| {
        let mut notes = Vec::new();
        let mut ok = true;
        for n in 4..=7 {
            let r = run(n, Algorithm::Naive, &opts());
            ok &= r.verdict.proved && r.stats.false_leaves == 0;
            notes.push(format!("n={n} {}", if r.verdict.proved { "proved" } else { "inconclusive" }));
        }
        for n in [8, 9] {
            let r = run(n, Algorithm::Naive, &opts());
            ok &= r.stats.false_leaves == 14 && r.failure_count() == 14;
            notes.push(format!("n={n} false leaves {} (expected 14)", r.stats.false_leaves));
        }
        check(ok, notes.join(", "))
    });

    suite.run("2", "naive true-leaf counts", |extended| {
        let a = run(8, Algorithm::Naive, &opts()).stats.true_leaves;
        let b = run(9, Algorithm::Naive, &opts()).stats.true_leaves;
        let mut ok = a == 2_657 && b == 377_452;
        let mut detail = format!("n=8 {a} (expected 2657), n=9 {b} (expected 377452)");
        if extended {
            let r = run(10, Algorithm::Naive, &SearchOptions { capture_failures: false, ..opts() });
            ok &= r.stats.false_leaves == 82_140 && r.stats.true_leaves == 696_808_457;
            detail += &format!(
                ", n=10 false {} (expected 82140) true {} (expected 696808457)",
                r.stats.false_leaves, r.stats.true_leaves
            );
        } else {
            detail += ", n=10 skipped (extended)";
        }
        check(ok, detail)
    });

    suite.run("3", "advanced search", |extended| {
        let mut ok = true;
        let mut notes = Vec::new();
        for n in 4..=9 {
            ok &= run(n, Algorithm::Advanced, &opts()).verdict.proved;
        }
        notes.push("n=4..9 proved".to_string());
        let r = run(10, Algorithm::Advanced, &opts());
        let esc = r.stats.cycle_backs_at;
        ok &= r.verdict.proved && esc == [53, 0, 0, 0];
        notes.push(format!(
            "n=10 {} with escalations {esc:?} (expected [53, 0, 0, 0])",
            if r.verdict.proved { "proved" } else { "inconclusive" }
        ));
        if extended {
            let r = run(11, Algorithm::Advanced, &opts());
            let esc = r.stats.cycle_backs_at;
            ok &= r.verdict.proved && esc[0] == 105_287 && esc[1..] == [0, 0, 0];
            notes.push(format!("n=11 escalations {esc:?} (expected 105287 from pivot row 0)"));
        } else {
            notes.push("n=11 skipped (extended)".to_string());
        }
        check(ok, notes.join(", "))
    });

    suite.run("4", "swap-only search", |_| {
        // Pure #-swap reachability: no marker resolution, no corner marking.
        let so = SearchOptions { swap_only: true, capture_failures: false, ..opts() };
        let mut ok = true;
        let mut notes = Vec::new();
        for n in 4..=10 {
            let r = run(n, Algorithm::Advanced, &so);
            ok &= r.verdict.proved;
            if !r.verdict.proved {
                notes.push(format!("n={n} inconclusive with {} stuck leaves", r.stats.false_leaves));
            }
        }
        if notes.is_empty() {
            notes.push("n=4..10 proved".to_string());
        }
        check(ok, notes.join(", "))
    });

    suite.run("5", "transversal-free arrays", |_| {
        let cfg = OracleConfig::default();
        let mut cases = 0;
        for m in 3..=7 {
            for n in m + 1..=2 * m - 2 {
                let a = drisko(m, n).unwrap();
                let cert_ok = certify_no_transversal(&a).is_ok_and(|c| c.pattern_ok);
                let best = max_partial_transversal_length(&a, &cfg).unwrap().value;
                if !cert_ok || best != m - 1 {
                    return Outcome::Fail(format!("({m}, {n}): certificate {cert_ok}, max partial {best}"));
                }
                cases += 1;
            }
        }
        Outcome::Pass(format!("{cases} shapes, certificate valid and max partial = m-1 for each"))
    });

    suite.run("6", "n_k table", |extended| {
        let solved: Vec<u64> = minimize_nk(12).unwrap().iter().map(|r| r.n_k).collect();
        let brute = brute_force_min_nk(6).unwrap();
        let mut ok = solved == TABLE[..11] && brute == solved[..5];
        let mut detail = format!("k=2..12 {solved:?}, brute force k<=6 {brute:?}");
        if extended {
            let all: Vec<_> = NkSolver::new(&Default::default()).unwrap().take(20).collect();
            let values: Vec<u64> = all.iter().map(|r| r.n_k).collect();
            let witnesses_ok = all.iter().all(|r| check_sequence(&r.witness).is_ok());
            ok &= values == TABLE && witnesses_ok;
            detail += &format!(", k=21 gives {}", values[19]);
        } else {
            detail += ", k=13..21 skipped (extended)";
        }
        check(ok, detail)
    });

    suite.run("7", "forced prefix", |_| {
        let with28 = brute_force_min_nk_with_prefix(5, &[11, 17, 28]).unwrap()[3];
        let with31 = brute_force_min_nk_with_prefix(5, &[11, 17, 31]).unwrap()[3];
        let free = brute_force_min_nk(5).unwrap()[3];
        check(
            with28 > 41 && with31 == 41 && free == 41,
            format!("n_4=28 gives n_5={with28}, n_4=31 gives {with31}, unconstrained {free}"),
        )
    });

    suite.run("8", "guaranteed lengths", |_| {
        let got: Vec<(u64, u64)> = [11, 100, 1448].iter().map(|&n| (n, guarantee_length(n).length)).collect();
        let rules_ok = guarantee_length(11).rule == GuaranteeRule::SmallOrder
            && guarantee_length(100).rule == GuaranteeRule::Table { k: 8 }
            && guarantee_length(1448).rule == GuaranteeRule::Table { k: 21 };
        check(got == [(11, 10), (100, 93), (1448, 1428)] && rules_ok, format!("{got:?}"))
    });

    suite.run("9", "property suites", |_| {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2024);
        // normalization on random fully filled arrays
        for i in 0..1000 {
            let n = rng.gen_range(1..=5);
            let a = common::random_latin(n, &mut rng);
            let mut cols: Vec<usize> = (0..n).collect();
            cols.shuffle(&mut rng);
            let d = DiagonalPerm::new(cols).unwrap();
            let keep = rng.gen_range(0..n);
            let Ok((out, swaps)) = oracle::normalize_diagonal_traced(&a, &d, keep) else {
                return Outcome::Fail(format!("normalization failed on instance {i}"));
            };
            let mut mult = vec![0; n];
            for (r, &c) in out.columns().iter().enumerate() {
                if let CellState::Symbol(s) = a.get(r, c) {
                    mult[s as usize] += 1;
                }
            }
            let ok = a.diagonal_weight(&out).unwrap() >= a.diagonal_weight(&d).unwrap()
                && mult.iter().all(|&k| k <= 2)
                && out.column(keep) == d.column(keep)
                && swaps <= n;
            if !ok {
                return Outcome::Fail(format!("normalization postcondition broken on instance {i}"));
            }
        }
        // instrumented searches assert the phase invariant, pigeonhole
        // soundness and exact state restoration at every node
        let inst = SearchOptions { instrumented: true, ..opts() };
        for n in 4..=8 {
            for alg in [Algorithm::Naive, Algorithm::Advanced] {
                let plain = run(n, alg, &opts());
                let checked = run(n, alg, &inst);
                if plain.stats != checked.stats {
                    return Outcome::Fail(format!("instrumented {alg} run at n={n} diverged"));
                }
            }
        }
        // branch and bound against plain enumeration
        let cfg = OracleConfig::default();
        for i in 0..300 {
            let n = rng.gen_range(1..=5);
            let mut a = common::random_latin(n, &mut rng);
            for _ in 0..rng.gen_range(0..n * n / 2 + 1) {
                a.set(rng.gen_range(0..n), rng.gen_range(0..n), CellState::Empty);
            }
            let brute = (0..n)
                .permutations(n)
                .map(|p| a.diagonal_weight(&DiagonalPerm::new(p).unwrap()).unwrap())
                .max()
                .unwrap();
            if max_diagonal_weight(&a, &cfg).unwrap().value != brute {
                return Outcome::Fail(format!("branch and bound disagrees on instance {i}"));
            }
        }
        Outcome::Pass("1000 normalizations, instrumented runs n=4..8, 300 oracle comparisons".into())
    });

    if suite.failed > 0 {
        println!("{} criteria failed", suite.failed);
        std::process::exit(1);
    }
}
