//! Verification conditions: extraction shape, window checking, the two
//! synthesis round trips, and snippet merging across the growth stages.

mod common;

use std::collections::BTreeMap;

use common::{corpus_text, id, parse_corpus, run_gcd};
use liffig::ast::BlockBody;
use liffig::vc::{
    check_vc, check_vcs, extract_vcs, merge_snippet, vcs_to_liffig, NotCheckableReason,
    VcError,
};
use liffig::vcfile::{parse_vc_file, write_vc_file, VcFile};
use liffig::{parse_program, DomainWindow, GuardedCommand, Ident, Program, VcVerdict};

fn gcd_program() -> Program {
    parse_corpus("gcd_stein.lif")
}

#[test]
fn extraction_lists_conditions_in_figure_order() {
    let vcs = extract_vcs(&gcd_program()).unwrap();
    let pairs: Vec<(String, String)> = vcs
        .iter()
        .map(|vc| (vc.pre_label.to_string(), vc.post_label.to_string()))
        .collect();
    let expected = [
        ("S", "A"),
        ("A", "H"),
        ("A", "B"),
        ("A", "B"),
        ("B", "H"),
        ("B", "E"),
        ("E", "C"),
        ("E", "D"),
        ("C", "B"),
        ("C", "A"),
        ("D", "B"),
        ("D", "A"),
    ];
    let expected: Vec<(String, String)> =
        expected.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect();
    assert_eq!(pairs, expected);
}

#[test]
fn every_gcd_condition_is_window_valid() {
    let vcs = extract_vcs(&gcd_program()).unwrap();
    let (verdicts, tally) = check_vcs(&vcs, &DomainWindow::uniform(1, 8)).unwrap();
    assert!(verdicts.iter().all(|v| *v == VcVerdict::Valid));
    assert_eq!((tally.valid, tally.counter_examples, tally.not_checkable), (12, 0, 0));
}

#[test]
fn losing_an_update_shows_up_as_one_counterexample() {
    let source = corpus_text("gcd_stein.lif").replace("z := z*x; ", "");
    let program = parse_program(&source).unwrap().program;
    let vcs = extract_vcs(&program).unwrap();
    let (verdicts, tally) = check_vcs(&vcs, &DomainWindow::uniform(1, 12)).unwrap();
    assert_eq!((tally.valid, tally.counter_examples), (11, 1));

    let offending = vcs
        .iter()
        .zip(&verdicts)
        .find(|(_, v)| matches!(v, VcVerdict::CounterExample { .. }))
        .unwrap();
    assert_eq!(
        (offending.0.pre_label.as_str(), offending.0.post_label.as_str()),
        ("A", "H")
    );
    // The witness enumeration is smallest-first in variable-name order.
    let VcVerdict::CounterExample { state, post_state } = offending.1 else { unreachable!() };
    let values: Vec<i64> =
        ["x", "x0", "y", "y0", "z"].iter().map(|v| state.get(&id(v)).unwrap()).collect();
    assert_eq!(values, [2, 2, 2, 2, 1]);
    assert!(post_state.is_some());

    // Window monotonicity: the witness sits inside 1..4, so a smaller
    // window already finds a counterexample.
    let small = check_vcs(&vcs, &DomainWindow::uniform(1, 4)).unwrap().1;
    assert_eq!(small.counter_examples, 1);
}

#[test]
fn faulting_commands_are_counterexamples_without_a_post_state() {
    let source = "S: true\n  if true -> z := 1/0; goto H fi\nH: true\n  return z\n";
    let program = parse_program(source).unwrap().program;
    let vcs = extract_vcs(&program).unwrap();
    let verdict = check_vc(&vcs[0], &DomainWindow::uniform(1, 2)).unwrap();
    match verdict {
        VcVerdict::CounterExample { post_state, .. } => assert!(post_state.is_none()),
        other => panic!("expected a faulting counterexample, got {other:?}"),
    }
}

#[test]
fn prose_and_holes_are_not_checkable() {
    let trial = parse_corpus("primes_trial.lif");
    let vcs = extract_vcs(&trial).unwrap();
    assert_eq!(vcs.len(), 7);
    let (verdicts, tally) = check_vcs(&vcs, &DomainWindow::default()).unwrap();
    assert!(verdicts
        .iter()
        .all(|v| *v == VcVerdict::NotCheckable(NotCheckableReason::Opaque)));
    assert_eq!(tally.not_checkable, 7);

    let holed = parse_program(
        "S: true\n  if true -> \"todo\"; goto H fi\nH: true\n  return 0\n",
    )
    .unwrap()
    .program;
    let vcs = extract_vcs(&holed).unwrap();
    assert_eq!(
        check_vc(&vcs[0], &DomainWindow::default()).unwrap(),
        VcVerdict::NotCheckable(NotCheckableReason::Hole)
    );
}

#[test]
fn oversized_windows_are_refused_not_attempted() {
    let vcs = extract_vcs(&gcd_program()).unwrap();
    let window = DomainWindow::uniform(-1000, 1000);
    match check_vc(&vcs[1], &window) {
        Err(VcError::StateSpaceTooLarge { needed, cap }) => assert!(needed > cap as u128),
        other => panic!("expected a state-space refusal, got {other:?}"),
    }
}

#[test]
fn conditions_rebuild_the_program_they_came_from() {
    // Round trip A, exact: .vc text -> program -> .vc text.
    let source = corpus_text("gcd.vc");
    let file = parse_vc_file(&source).unwrap();
    let program = vcs_to_liffig(
        &file.to_vcs().unwrap(),
        &file.assertion_map(),
        &file.start,
        &file.halt,
        &file.return_term,
    )
    .unwrap();
    let back = VcFile::from_program(&program).unwrap();
    assert_eq!(write_vc_file(&back), source);

    // Round trip B, behavioral: the synthesized program computes the
    // same results as the hand-written corpus program.
    let original = gcd_program();
    for x0 in 1..=24 {
        for y0 in 1..=24 {
            assert_eq!(
                run_gcd(&original, x0, y0).result,
                run_gcd(&program, x0, y0).result,
                "inputs {x0}, {y0}"
            );
        }
    }
}

#[test]
fn synthesized_conditions_match_extracted_ones() {
    let program = gcd_program();
    let vcs = extract_vcs(&program).unwrap();
    let assertions: BTreeMap<Ident, liffig::Formula> =
        program.blocks.iter().map(|b| (b.label.clone(), b.assertion.clone())).collect();
    let rebuilt =
        vcs_to_liffig(&vcs, &assertions, &id("S"), &id("H"), &liffig::Term::Var(id("z")))
            .unwrap();
    let again = extract_vcs(&rebuilt).unwrap();
    let normal = |list: &[liffig::VerificationCondition]| -> Vec<_> {
        list.iter().map(|vc| vc.normalized()).collect::<Vec<_>>()
    };
    assert_eq!(normal(&vcs), normal(&again));
}

fn arms_of(program: &Program, label: &str) -> Vec<GuardedCommand> {
    match &program.block(&id(label)).unwrap().body {
        BlockBody::IfFi(arms) => arms.clone(),
        other => panic!("{label} is not if..fi: {other:?}"),
    }
}

#[test]
fn merging_snippets_replays_the_growth_stages() {
    let g1 = parse_corpus("gcd_growth_1.lif");
    let g2 = parse_corpus("gcd_growth_2.lif");
    let g3 = parse_corpus("gcd_growth_3.lif");
    let full = gcd_program();

    // Stage 1 to stage 2: two more arms for A, no new blocks.
    let a_extra = arms_of(&g2, "A")[1..].to_vec();
    let merged = merge_snippet(&g1, &[], &BTreeMap::from([(id("A"), a_extra)])).unwrap();
    assert_eq!(merged, g2);

    // Stage 2 to stage 3: B gains its arms, E arrives as a stub.
    let merged = merge_snippet(
        &g2,
        &[g3.block(&id("E")).unwrap().clone()],
        &BTreeMap::from([(id("B"), arms_of(&g3, "B"))]),
    )
    .unwrap();
    assert_eq!(merged, g3);

    // Stage 3 to the finished program: E gains its arms, C and D arrive.
    let merged = merge_snippet(
        &g3,
        &[
            full.block(&id("C")).unwrap().clone(),
            full.block(&id("D")).unwrap().clone(),
        ],
        &BTreeMap::from([(id("E"), arms_of(&full, "E"))]),
    )
    .unwrap();
    assert_eq!(merged, full);
}

#[test]
fn merging_preserves_every_existing_condition() {
    let g2 = parse_corpus("gcd_growth_2.lif");
    let g3 = parse_corpus("gcd_growth_3.lif");
    let before: Vec<_> = extract_vcs(&g2).unwrap().iter().map(|v| v.normalized()).collect();
    let after: Vec<_> = extract_vcs(&g3).unwrap().iter().map(|v| v.normalized()).collect();
    for vc in &before {
        assert!(
            after.contains(vc),
            "condition ({} -> {}) was lost",
            vc.pre_label,
            vc.post_label
        );
    }
    assert!(after.len() > before.len());
}

#[test]
fn growth_stage_conditions_are_already_valid() {
    // Partial programs carry fewer conditions, but each one holds.
    for name in ["gcd_growth_1.lif", "gcd_growth_2.lif", "gcd_growth_3.lif"] {
        let vcs = extract_vcs(&parse_corpus(name)).unwrap();
        let (_, tally) = check_vcs(&vcs, &DomainWindow::uniform(1, 8)).unwrap();
        assert_eq!(tally.counter_examples, 0, "{name}");
        assert_eq!(tally.valid, vcs.len(), "{name}");
    }
}
