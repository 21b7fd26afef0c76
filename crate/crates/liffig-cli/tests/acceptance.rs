//! Acceptance suite: one test per criterion, named `criterion_NN_*` so the
//! harness output reads as a per-criterion pass/fail list. Run with
//! `--nocapture` for the detail lines.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use liffig::cgen::{self, CgenOptions};
use liffig::interp::{self, check_variant, run_with_observer, VariantVerdict};
use liffig::vc::{check_vcs, extract_vcs, vcs_to_liffig, VcVerdict};
use liffig::vcfile::{parse_vc_file, write_vc_file, VcFile};
use liffig::{
    parse_program, parse_term, DomainWindow, Ident, Program, RunConfig, RunResult,
};

const LIF_FILES: [&str; 7] = [
    "gcd_stein.lif",
    "gcd_growth_1.lif",
    "gcd_growth_2.lif",
    "gcd_growth_3.lif",
    "mult_double.lif",
    "primes_trial.lif",
    "primes_sieve.lif",
];

fn corpus_path(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

fn corpus_text(name: &str) -> String {
    fs::read_to_string(corpus_path(name)).unwrap_or_else(|e| panic!("read {name}: {e}"))
}

fn parse_corpus(name: &str) -> Program {
    parse_program(&corpus_text(name))
        .unwrap_or_else(|d| panic!("{name} does not parse: {d:?}"))
        .program
}

fn id(name: &str) -> Ident {
    Ident::new(name).unwrap()
}

fn inputs(pairs: &[(&str, i64)]) -> BTreeMap<Ident, i64> {
    pairs.iter().map(|(n, v)| (id(n), *v)).collect()
}

fn gcd_inputs(x: i64, y: i64) -> BTreeMap<Ident, i64> {
    inputs(&[("x", x), ("x0", x), ("y", y), ("y0", y)])
}

/// Oracle: remainder-form Euclid, independent of the interpreter.
fn euclid(mut a: i64, mut b: i64) -> i64 {
    assert!(a > 0 && b > 0);
    while b != 0 {
        (a, b) = (b, a.rem_euclid(b));
    }
    a
}

/// Oracle: the first `n` primes by trial division with `%`.
fn first_primes(n: usize) -> Vec<i64> {
    let mut primes: Vec<i64> = Vec::with_capacity(n);
    let mut cand = 2i64;
    while primes.len() < n {
        if primes.iter().take_while(|p| *p * *p <= cand).all(|p| cand % p != 0) {
            primes.push(cand);
        }
        cand += if cand == 2 { 1 } else { 2 };
    }
    primes
}

#[test]
fn criterion_01_corpus_parses_with_the_published_shape() {
    let t0 = Instant::now();
    for name in LIF_FILES {
        parse_corpus(name);
    }
    parse_vc_file(&corpus_text("gcd.vc")).expect("gcd.vc parses");

    let p = parse_corpus("gcd_stein.lif");
    let labels: Vec<String> = p.blocks.iter().map(|b| b.label.to_string()).collect();
    assert_eq!(labels, ["S", "A", "B", "E", "C", "D", "H"]);
    let arms: usize = p
        .blocks
        .iter()
        .map(|b| match &b.body {
            liffig::BlockBody::IfFi(arms) => arms.len(),
            _ => 0,
        })
        .sum();
    assert_eq!(arms, 12, "guarded commands");

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(1), "took {elapsed:?}");
    println!("criterion 01: 8 corpus files parse; 7 labels, 12 guarded commands ({elapsed:?})");
}

#[test]
fn criterion_02_every_small_gcd_run_matches_the_oracle() {
    let t0 = Instant::now();
    let p = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig::default();
    for x in 1..=200 {
        for y in 1..=200 {
            let summary = run_with_observer(&p, &gcd_inputs(x, y), &cfg, |_, _| {});
            assert_eq!(summary.result, RunResult::Halted(euclid(x, y)), "gcd({x}, {y})");
        }
    }
    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(10), "took {elapsed:?}");
    println!("criterion 02: 40000 runs agree with the Euclid oracle ({elapsed:?})");
}

#[test]
fn criterion_03_visit_counts_stay_logarithmic() {
    let t0 = Instant::now();
    let p = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig { check_assertions: false, ..RunConfig::default() };
    let mut worst = 0u64;
    for x in 1..=1024i64 {
        for y in 1..=1024i64 {
            let summary = run_with_observer(&p, &gcd_inputs(x, y), &cfg, |_, _| {});
            assert!(matches!(summary.result, RunResult::Halted(_)), "gcd({x}, {y})");
            let bound = 4 * (x.ilog2() as u64 + y.ilog2() as u64) + 16;
            assert!(
                summary.visit_count <= bound,
                "gcd({x}, {y}): {} visits > bound {bound}",
                summary.visit_count
            );
            worst = worst.max(summary.visit_count);
        }
    }
    println!(
        "criterion 03: 1048576 runs within 4(lg x + lg y) + 16 visits; worst {worst} ({:?})",
        t0.elapsed()
    );
}

#[test]
fn criterion_04_conditions_verify_and_a_mutation_is_caught() {
    let t0 = Instant::now();
    let window = DomainWindow::uniform(1, 12);

    let p = parse_corpus("gcd_stein.lif");
    let vcs = extract_vcs(&p).expect("extraction");
    let (_, tally) = check_vcs(&vcs, &window).expect("windowed check");
    assert_eq!(tally.valid, 12);
    assert_eq!(tally.counter_examples, 0);
    assert_eq!(tally.not_checkable, 0);

    let mutated_src = corpus_text("gcd_stein.lif").replace("z := z*x; ", "");
    assert_ne!(mutated_src, corpus_text("gcd_stein.lif"), "mutation applied");
    let mutated = parse_program(&mutated_src).unwrap().program;
    let vcs = extract_vcs(&mutated).expect("extraction");
    let (verdicts, tally) = check_vcs(&vcs, &window).expect("windowed check");
    assert_eq!(tally.counter_examples, 1, "exactly one condition breaks");
    let broken: Vec<(String, String)> = vcs
        .iter()
        .zip(&verdicts)
        .filter(|(_, v)| matches!(v, VcVerdict::CounterExample { .. }))
        .map(|(vc, _)| (vc.pre_label.to_string(), vc.post_label.to_string()))
        .collect();
    assert_eq!(broken, [("A".to_string(), "H".to_string())]);

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(60), "took {elapsed:?}");
    println!(
        "criterion 04: 12/12 VALID on 1..12; dropped update breaks only (A -> H) ({elapsed:?})"
    );
}

#[test]
fn criterion_05_doubling_multiplication_is_exact() {
    let p = parse_corpus("mult_double.lif");
    let cfg = RunConfig::default();
    for n in 0..=64 {
        for a in 0..=64 {
            let ins = inputs(&[("n", n), ("n0", n), ("a", a), ("a0", a)]);
            let summary = run_with_observer(&p, &ins, &cfg, |_, _| {});
            assert_eq!(summary.result, RunResult::Halted(n * a), "{n}*{a}");
        }
    }
    println!("criterion 05: 65x65 products match, including n = 0");
}

#[test]
fn criterion_06_both_prime_programs_fill_the_same_table() {
    let t0 = Instant::now();
    let cfg = RunConfig { fuel: 200_000_000, ..RunConfig::default() };
    let none = BTreeMap::new();

    let trial = parse_corpus("primes_trial.lif");
    let summary = run_with_observer(&trial, &none, &cfg, |_, _| {});
    assert_eq!(summary.result, RunResult::Halted(1000));
    let trial_table = summary.final_state.array(&id("p")).expect("p").to_vec();

    let sieve = parse_corpus("primes_sieve.lif");
    let mut max_j = 0i64;
    let summary = run_with_observer(&sieve, &none, &cfg, |_, state| {
        if let Some(j) = state.get(&id("j")) {
            max_j = max_j.max(j);
        }
    });
    assert_eq!(summary.result, RunResult::Halted(1000));
    let sieve_table = summary.final_state.array(&id("p")).expect("p").to_vec();

    assert_eq!(trial_table, sieve_table);
    assert_eq!(trial_table, first_primes(1000));
    assert_eq!(trial_table.last(), Some(&7919));
    assert!(max_j <= 29, "sieve index reached {max_j}");

    let elapsed = t0.elapsed();
    assert!(elapsed < Duration::from_secs(120), "took {elapsed:?}");
    println!(
        "criterion 06: both tables list the first 1000 primes up to 7919; sieve j peaks at {max_j} ({elapsed:?})"
    );
}

#[test]
fn criterion_07_the_sum_variant_proves_termination_where_distance_fails() {
    let p = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig::default();
    let sum = parse_term("x + y").unwrap();
    for x in 1..=64 {
        for y in 1..=64 {
            let trace = interp::run(&p, &gcd_inputs(x, y), &cfg);
            assert!(
                matches!(check_variant(&trace, &sum), Ok(VariantVerdict::Ok)),
                "x + y fails on ({x}, {y})"
            );
        }
    }

    let dist = parse_term("(x - y)^2").unwrap();
    let trace = interp::run(&p, &gcd_inputs(6, 5), &cfg);
    let verdict = check_variant(&trace, &dist);
    let Ok(VariantVerdict::ViolationAt(i)) = verdict else {
        panic!("(x - y)^2 got {verdict:?} on (6, 5)");
    };
    println!(
        "criterion 07: x + y decreases on all 4096 traces; (x - y)^2 grows again at visit {i} of (6, 5)"
    );
}

#[test]
fn criterion_08_synthesis_round_trips_the_condition_list() {
    let src = corpus_text("gcd.vc");
    let vcfile = parse_vc_file(&src).expect("gcd.vc parses");
    let vcs = vcfile.to_vcs().expect("conditions");
    let synthesized = vcs_to_liffig(
        &vcs,
        &vcfile.assertion_map(),
        &vcfile.start,
        &vcfile.halt,
        &vcfile.return_term,
    )
    .expect("synthesis");

    let back = write_vc_file(&VcFile::from_program(&synthesized).expect("re-extraction"));
    assert_eq!(back, src, "condition list is reproduced byte for byte");

    let published = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig::default();
    for x in 1..=32 {
        for y in 1..=32 {
            let a = run_with_observer(&synthesized, &gcd_inputs(x, y), &cfg, |_, _| {});
            let b = run_with_observer(&published, &gcd_inputs(x, y), &cfg, |_, _| {});
            assert_eq!(a.result, b.result, "({x}, {y})");
        }
    }
    println!("criterion 08: list -> program -> list is exact; behavior agrees on 1..32 squared");
}

fn find_c_compiler() -> Option<&'static str> {
    ["cc", "gcc", "clang"].into_iter().find(|cc| {
        Command::new(cc)
            .arg("--version")
            .output()
            .is_ok_and(|o| o.status.success())
    })
}

#[test]
fn criterion_09_the_c_translation_matches_the_golden_file() {
    let p = parse_corpus("gcd_stein.lif");
    let opts = CgenOptions {
        name: "gcd".to_string(),
        params: vec![id("x"), id("y")],
        return_var: Some(id("z")),
        ..CgenOptions::default()
    };
    let c = cgen::to_c(&p, &opts).expect("translation");
    let golden = corpus_text("gcd_stein.c");
    let norm = |s: &str| s.split_whitespace().collect::<Vec<_>>().join(" ");
    assert_eq!(norm(&c), norm(&golden), "golden match modulo whitespace");
    for needle in ["S:", "A:", "B:", "E:", "C:", "D:", "H:", "swap(&x, &y)", "assert(0);"] {
        assert!(c.contains(needle), "missing {needle}");
    }

    let Some(cc) = find_c_compiler() else {
        println!("criterion 09: golden C matches; compile smoke skipped (no C compiler)");
        return;
    };
    let dir = tempfile::tempdir().unwrap();
    let driver = "#include <stdio.h>\n\
                  int gcd(int x, int y);\n\
                  int main(void) {\n\
                      for (int x = 1; x <= 50; x++)\n\
                          for (int y = 1; y <= 50; y++)\n\
                              printf(\"%d\\n\", gcd(x, y));\n\
                      return 0;\n\
                  }\n";
    fs::write(dir.path().join("gcd.c"), &golden).unwrap();
    fs::write(dir.path().join("main.c"), driver).unwrap();
    let bin = dir.path().join("smoke");
    let status = Command::new(cc)
        .current_dir(dir.path())
        .args(["gcd.c", "main.c", "-o"])
        .arg(&bin)
        .status()
        .expect("compiler runs");
    assert!(status.success(), "golden C compiles");

    let out = Command::new(&bin).output().expect("smoke binary runs");
    assert!(out.status.success());
    let got: Vec<i64> = String::from_utf8(out.stdout)
        .unwrap()
        .lines()
        .map(|l| l.parse().unwrap())
        .collect();
    let want: Vec<i64> = (1..=50)
        .flat_map(|x| (1..=50).map(move |y| euclid(x, y)))
        .collect();
    assert_eq!(got, want);
    println!("criterion 09: golden C matches and compiles; 2500 compiled runs agree with the oracle");
}

#[test]
fn criterion_10_valid_conditions_imply_no_in_window_violations() {
    let p = parse_corpus("gcd_stein.lif");
    let window = DomainWindow::uniform(1, 12);
    let vcs = extract_vcs(&p).expect("extraction");
    let (_, tally) = check_vcs(&vcs, &window).expect("windowed check");
    assert_eq!((tally.valid, tally.counter_examples), (12, 0), "precondition: 12/12 VALID");

    // Exhaustively run every start state in the window that satisfies the
    // entry assertion. Whenever the whole trajectory stays inside the
    // window, the validated conditions must carry every assertion along.
    let cfg = RunConfig::default();
    let mut covered = 0u32;
    for x in 1..=12 {
        for y in 1..=12 {
            for z in 1..=12 {
                let mut ins = gcd_inputs(x, y);
                ins.insert(id("z"), z);
                let mut in_window = true;
                let summary = run_with_observer(&p, &ins, &cfg, |_, state| {
                    if state.scalars.values().any(|v| !(1..=12).contains(v)) {
                        in_window = false;
                    }
                });
                if in_window {
                    covered += 1;
                    assert!(
                        !matches!(summary.result, RunResult::AssertionViolation(..)),
                        "in-window run x={x} y={y} z={z} ended {}",
                        summary.result
                    );
                }
            }
        }
    }
    assert!(covered > 0, "the check must not be vacuous");
    println!("criterion 10: {covered} of 1728 runs stayed in-window; none violated an assertion");
}
