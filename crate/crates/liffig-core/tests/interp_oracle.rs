//! Interpreter behavior against independent oracles, plus the semantic
//! properties runs are expected to keep.

mod common;

use common::{corpus_text, euclid, first_primes, id, inputs, parse_corpus, run, run_gcd};
use liffig::interp::{check_variant, run_with_observer};
use liffig::state::FaultKind;
use liffig::{parse_program, parse_term, Ident, RunConfig, RunResult, VariantVerdict};

#[test]
fn gcd_agrees_with_euclid_and_leaves_ghosts_alone() {
    let program = parse_corpus("gcd_stein.lif");
    for x0 in 1..=48 {
        for y0 in 1..=48 {
            let summary = run_gcd(&program, x0, y0);
            assert_eq!(
                summary.result,
                RunResult::Halted(euclid(x0, y0)),
                "inputs {x0}, {y0}"
            );
            // Frame: the ghosts are read, never written.
            assert_eq!(summary.final_state.get(&id("x0")), Some(x0));
            assert_eq!(summary.final_state.get(&id("y0")), Some(y0));
        }
    }
}

#[test]
fn gcd_spot_values_from_the_figure() {
    let program = parse_corpus("gcd_stein.lif");
    assert_eq!(run_gcd(&program, 12, 8).result, RunResult::Halted(4));
    assert_eq!(run_gcd(&program, 1, 1).result, RunResult::Halted(1));
    assert_eq!(run_gcd(&program, 9, 100).result, RunResult::Halted(1));
}

#[test]
fn a_wrong_seed_trips_the_first_assertion_that_sees_it() {
    // Seeding z with 2 falsifies `gcd(x0,y0) = z*gcd(x,y)` on arrival at A.
    let source = corpus_text("gcd_stein.lif").replace("z := 1", "z := 2");
    let program = parse_program(&source).unwrap().program;
    let summary = run(&program, &[("x", 3), ("x0", 3), ("y", 3), ("y0", 3)]);
    match summary.result {
        RunResult::AssertionViolation(label, _) => assert_eq!(label, id("A")),
        other => panic!("expected a violation at A, got {other}"),
    }
}

#[test]
fn growth_stages_halt_or_abort_exactly_as_their_coverage_allows() {
    let g1 = parse_corpus("gcd_growth_1.lif");
    assert_eq!(run_gcd(&g1, 7, 7).result, RunResult::Halted(7));
    // Unequal arguments reach no guard at A.
    assert_eq!(run_gcd(&g1, 8, 6).result, RunResult::Aborted(id("A")));

    let g2 = parse_corpus("gcd_growth_2.lif");
    assert_eq!(run_gcd(&g2, 7, 7).result, RunResult::Halted(7));
    assert_eq!(run_gcd(&g2, 8, 6).result, RunResult::Aborted(id("B")));

    let g3 = parse_corpus("gcd_growth_3.lif");
    assert_eq!(run_gcd(&g3, 6, 3).result, RunResult::Aborted(id("E")));
    assert_eq!(run_gcd(&g3, 5, 1).result, RunResult::Halted(1));
}

#[test]
fn multiplication_matches_the_product() {
    let program = parse_corpus("mult_double.lif");
    for n0 in 0..=32 {
        for a0 in 0..=32 {
            let summary =
                run(&program, &[("n", n0), ("n0", n0), ("a", a0), ("a0", a0), ("z", 0)]);
            assert_eq!(summary.result, RunResult::Halted(n0 * a0), "inputs {n0}, {a0}");
        }
    }
}

#[test]
fn trial_division_fills_the_table_of_primes() {
    let program = parse_corpus("primes_trial.lif");
    let summary = run(&program, &[]);
    assert_eq!(summary.result, RunResult::Halted(1000));
    let table = summary.final_state.array(&id("p")).unwrap();
    assert_eq!(table, first_primes(1000).as_slice());
}

#[test]
fn runs_are_deterministic() {
    let program = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig::default();
    let ins = inputs(&[("x", 36), ("x0", 36), ("y", 20), ("y0", 20)]);
    let a = liffig::interp::run(&program, &ins, &cfg);
    let b = liffig::interp::run(&program, &ins, &cfg);
    assert_eq!(a, b);
    // The trace-free runner sees the same outcome and the same visit count.
    let c = run_with_observer(&program, &ins, &cfg, |_, _| {});
    assert_eq!((c.result, c.visit_count), (a.result, a.visit_count));
}

#[test]
fn parallel_assignment_is_insensitive_to_pair_order() {
    // The C block's three-way assignment, written in reversed pair order,
    // must produce the same behavior on every input.
    let original = parse_corpus("gcd_stein.lif");
    let reordered = parse_program(
        &corpus_text("gcd_stein.lif")
            .replace("x, y, z := x/2, y/2, 2*z", "z, y, x := 2*z, y/2, x/2"),
    )
    .unwrap()
    .program;
    for x0 in 1..=32 {
        for y0 in 1..=32 {
            assert_eq!(
                run_gcd(&original, x0, y0).result,
                run_gcd(&reordered, x0, y0).result,
                "inputs {x0}, {y0}"
            );
        }
    }
}

#[test]
fn assertion_checking_can_be_switched_off() {
    let source = corpus_text("gcd_stein.lif").replace("z := 1", "z := 2");
    let program = parse_program(&source).unwrap().program;
    let cfg = RunConfig { check_assertions: false, ..RunConfig::default() };
    let ins = inputs(&[("x", 3), ("x0", 3), ("y", 3), ("y0", 3)]);
    let summary = run_with_observer(&program, &ins, &cfg, |_, _| {});
    // The broken seed now flows through to a wrong halt value; the run
    // itself completes.
    assert_eq!(summary.result, RunResult::Halted(6));
}

#[test]
fn fuel_cuts_off_unbounded_runs() {
    let program = parse_program("L: true\n  if true -> goto L fi\nH: true\n  return 0\n")
        .unwrap()
        .program;
    let cfg = RunConfig { fuel: 100, ..RunConfig::default() };
    let summary = run_with_observer(&program, &inputs(&[]), &cfg, |_, _| {});
    assert_eq!(summary.result, RunResult::Fault(FaultKind::FuelExhausted, id("L")));
    assert_eq!(summary.visit_count, 100);
}

#[test]
fn the_sum_variant_passes_where_the_distance_variant_fails() {
    let program = parse_corpus("gcd_stein.lif");
    let sum = parse_term("x+y").unwrap();
    let distance_sq = parse_term("(x-y)^2").unwrap();
    let cfg = RunConfig::default();

    for (x0, y0) in [(6, 5), (17, 4), (32, 32), (1, 9)] {
        let ins = inputs(&[("x", x0), ("x0", x0), ("y", y0), ("y0", y0)]);
        let trace = liffig::interp::run(&program, &ins, &cfg);
        assert_eq!(check_variant(&trace, &sum), Ok(VariantVerdict::Ok), "x+y on {x0},{y0}");
    }

    let ins = inputs(&[("x", 6), ("x0", 6), ("y", 5), ("y0", 5)]);
    let trace = liffig::interp::run(&program, &ins, &cfg);
    let verdict = check_variant(&trace, &distance_sq).unwrap();
    // The second visit to A carries x=3, y=5: the squared distance grew
    // from 1 to 4 over the circuit, so that visit is the violation.
    assert_eq!(verdict, VariantVerdict::ViolationAt(5));
    assert_eq!(trace.visits[5].0, id("A"));
}

#[test]
fn visit_counts_stay_logarithmic_on_a_sample() {
    let program = parse_corpus("gcd_stein.lif");
    let cfg = RunConfig { check_assertions: false, ..RunConfig::default() };
    for (x0, y0) in [(1, 1), (1, 1024), (513, 511), (1000, 999), (729, 243)] {
        let ins = inputs(&[("x", x0), ("x0", x0), ("y", y0), ("y0", y0)]);
        let summary = run_with_observer(&program, &ins, &cfg, |_, _| {});
        let bound = 4 * (ilog2(x0) + ilog2(y0)) + 16;
        assert!(
            summary.visit_count <= bound,
            "{x0},{y0}: {} visits > {bound}",
            summary.visit_count
        );
    }
}

fn ilog2(v: i64) -> u64 {
    (v as u64).ilog2() as u64
}

#[test]
fn undeclared_inputs_are_reported_not_applied() {
    let program = parse_corpus("mult_double.lif");
    let mut warnings = Vec::new();
    let state = liffig::interp::initial_state(
        &program,
        &inputs(&[("n", 3), ("nope", 9)]),
        &mut warnings,
    );
    assert_eq!(state.get(&id("n")), Some(3));
    assert_eq!(state.get(&Ident::new("nope").unwrap()), None);
    assert!(warnings.iter().any(|w| w.contains("nope")));
}
