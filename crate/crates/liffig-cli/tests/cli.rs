//! End-to-end checks of the `liffig` binary: output lines and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::Command;

fn corpus(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name)
}

struct Run {
    code: i32,
    stdout: String,
    stderr: String,
}

fn liffig(args: &[&str]) -> Run {
    let out = Command::new(env!("CARGO_BIN_EXE_liffig"))
        .args(args)
        .output()
        .expect("binary runs");
    Run {
        code: out.status.code().expect("no signal"),
        stdout: String::from_utf8(out.stdout).expect("utf8 stdout"),
        stderr: String::from_utf8(out.stderr).expect("utf8 stderr"),
    }
}

fn corpus_arg(name: &str) -> String {
    corpus(name).to_str().unwrap().to_string()
}

fn write_temp(dir: &tempfile::TempDir, name: &str, text: &str) -> String {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn help_succeeds_and_missing_arguments_fail() {
    assert_eq!(liffig(&["--help"]).code, 0);
    assert_eq!(liffig(&[]).code, 1);
    assert_eq!(liffig(&["run"]).code, 1);
    assert_eq!(liffig(&["frobnicate"]).code, 1);
}

#[test]
fn check_counts_blocks_and_flags_implicit_declarations() {
    let r = liffig(&["check", &corpus_arg("gcd_stein.lif")]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("ok: 5 declaration(s), 7 block(s)"), "{}", r.stdout);
    let warned = r.stdout.lines().filter(|l| l.contains("is not declared")).count();
    assert_eq!(warned, 5);

    let dir = tempfile::tempdir().unwrap();
    let bad = write_temp(
        &dir,
        "bad.lif",
        "S: true\n  if true -> goto NOWHERE fi\nH: true\n  return 0\n",
    );
    let r = liffig(&["check", &bad]);
    assert_eq!(r.code, 1);
    assert!(r.stdout.contains("NOWHERE"), "{}", r.stdout);
}

#[test]
fn unreadable_files_are_usage_errors() {
    let r = liffig(&["run", "no/such/file.lif"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("cannot read"), "{}", r.stderr);
}

#[test]
fn runs_report_their_result_and_exit_code() {
    let r = liffig(&["run", &corpus_arg("gcd_stein.lif"), "--set", "x=12,x0=12,y=8,y0=8"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("RESULT Halted(4)"), "{}", r.stdout);

    // The first growth stage only covers x = y, so (8, 6) stops at A.
    let r = liffig(&["run", &corpus_arg("gcd_growth_1.lif"), "--set", "x=8,y=6", "--bind-ghosts"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("RESULT Aborted(A)"), "{}", r.stdout);
}

#[test]
fn ghost_binding_is_opt_in() {
    let file = corpus_arg("gcd_stein.lif");
    // Without the flag the ghosts stay 0 and the start assertion fails.
    let r = liffig(&["run", &file, "--set", "x=12,y=8"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("RESULT AssertionViolation(S)"), "{}", r.stdout);

    let r = liffig(&["run", &file, "--set", "x=12,y=8", "--bind-ghosts"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("RESULT Halted(4)"), "{}", r.stdout);
}

#[test]
fn bad_set_bindings_are_usage_errors() {
    let file = corpus_arg("gcd_stein.lif");
    let r = liffig(&["run", &file, "--set", "nope=3"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("unknown variable `nope` in --set"), "{}", r.stderr);

    let r = liffig(&["run", &corpus_arg("primes_trial.lif"), "--set", "p=1"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("`p` is an array"), "{}", r.stderr);

    let r = liffig(&["run", &file, "--set", "x"]);
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("not of the form var=value"), "{}", r.stderr);
}

#[test]
fn holes_faults_and_fuel_have_distinct_exit_codes() {
    let dir = tempfile::tempdir().unwrap();

    let hole = write_temp(
        &dir,
        "hole.lif",
        "S: true\n  if true -> \"do something\"\n  fi\nH: true\n  return 0\n",
    );
    let r = liffig(&["run", &hole]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("RESULT HoleReached(S, \"do something\")"), "{}", r.stdout);

    let fault = write_temp(
        &dir,
        "fault.lif",
        "int z;\n\nS: true\n  z := 1/0; goto H\nH: true\n  return z\n",
    );
    let r = liffig(&["run", &fault]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("RESULT Fault(div_by_zero, S)"), "{}", r.stdout);

    let spin = write_temp(
        &dir,
        "spin.lif",
        "L: true\n  if true -> goto L fi\nH: true\n  return 0\n",
    );
    let r = liffig(&["run", &spin, "--fuel", "50"]);
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("RESULT Fault(fuel_exhausted, L)"), "{}", r.stdout);
}

#[test]
fn variant_verdicts_set_the_exit_code() {
    let file = corpus_arg("gcd_stein.lif");
    let base = ["run", &file, "--set", "x=6,y=5", "--bind-ghosts", "--variant"];

    let r = liffig(&[&base[..], &["x + y"]].concat());
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("VARIANT ok"), "{}", r.stdout);

    // (x - y)^2 grows from 1 to 4 at the sixth visit of this trace.
    let r = liffig(&[&base[..], &["(x - y)^2"]].concat());
    assert_eq!(r.code, 2);
    assert!(
        r.stdout.contains("VARIANT violated at visit 5 (label A, value 4)"),
        "{}",
        r.stdout
    );

    let r = liffig(&[&base[..], &["1/0"]].concat());
    assert_eq!(r.code, 3);
    assert!(r.stdout.contains("VARIANT fault: div_by_zero"), "{}", r.stdout);

    let r = liffig(&[&base[..], &["not a term"]].concat());
    assert_eq!(r.code, 1);
    assert!(r.stderr.contains("bad --variant"), "{}", r.stderr);
}

#[test]
fn trace_files_list_every_visit() {
    let dir = tempfile::tempdir().unwrap();
    let trace = dir.path().join("run.trace");
    let r = liffig(&[
        "run",
        &corpus_arg("gcd_stein.lif"),
        "--set",
        "x=12,y=8",
        "--bind-ghosts",
        "--trace",
        trace.to_str().unwrap(),
    ]);
    assert_eq!(r.code, 0);
    let text = fs::read_to_string(&trace).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("S\t"), "{}", lines[0]);
    assert!(lines[0].contains("x=12"));
    assert_eq!(*lines.last().unwrap(), "RESULT Halted(4)");
    // Every line but the last is a visit; H is visited once at the end.
    assert!(lines[lines.len() - 2].starts_with("H\t"));
}

#[test]
fn verify_reports_verdicts_and_a_summary() {
    let r = liffig(&["verify", &corpus_arg("gcd_stein.lif"), "--window", "1..8"]);
    assert_eq!(r.code, 0);
    let valid_lines = r.stdout.lines().filter(|l| l.ends_with(" VALID")).count();
    assert_eq!(valid_lines, 12, "{}", r.stdout);
    assert!(r.stdout.contains("12 VALID, 0 COUNTEREXAMPLE, 0 NOTCHECKABLE"), "{}", r.stdout);

    // Drop the z update: exactly one condition breaks, between A and H.
    let dir = tempfile::tempdir().unwrap();
    let source = fs::read_to_string(corpus("gcd_stein.lif")).unwrap();
    let mutated = write_temp(&dir, "mutant.lif", &source.replace("z := z*x; ", ""));
    let r = liffig(&["verify", &mutated, "--window", "1..6"]);
    assert_eq!(r.code, 2);
    assert!(r.stdout.contains("(A -> H) COUNTEREXAMPLE"), "{}", r.stdout);
    assert!(r.stdout.contains("11 VALID, 1 COUNTEREXAMPLE, 0 NOTCHECKABLE"), "{}", r.stdout);
}

#[test]
fn verify_accepts_condition_lists_and_rejects_bad_windows() {
    let vc = corpus_arg("gcd.vc");
    let r = liffig(&["verify", &vc, "--window", "1..8"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("12 VALID, 0 COUNTEREXAMPLE, 0 NOTCHECKABLE"), "{}", r.stdout);

    for bad in ["5..1", "abc", "1..x"] {
        let r = liffig(&["verify", &vc, "--window", bad]);
        assert_eq!(r.code, 1, "window {bad}");
        assert!(r.stderr.contains("error:"), "{}", r.stderr);
    }
}

#[test]
fn prose_assertions_verify_as_not_checkable() {
    let r = liffig(&["verify", &corpus_arg("primes_trial.lif"), "--window", "1..2"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("NOTCHECKABLE (prose)"), "{}", r.stdout);
    assert!(r.stdout.contains("0 VALID, 0 COUNTEREXAMPLE, 7 NOTCHECKABLE"), "{}", r.stdout);
}

#[test]
fn vcs_output_matches_the_committed_list() {
    let r = liffig(&["vcs", &corpus_arg("gcd_stein.lif")]);
    assert_eq!(r.code, 0);
    let committed = fs::read_to_string(corpus("gcd.vc")).unwrap();
    assert_eq!(r.stdout, committed);
}

#[test]
fn synthesized_programs_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("synth.lif");
    let r = liffig(&["synth", &corpus_arg("gcd.vc"), "--out", out.to_str().unwrap()]);
    assert_eq!(r.code, 0);

    let r = liffig(&["run", out.to_str().unwrap(), "--set", "x=12,y=8", "--bind-ghosts"]);
    assert_eq!(r.code, 0);
    assert!(r.stdout.contains("RESULT Halted(4)"), "{}", r.stdout);
}

#[test]
fn transpile_matches_the_committed_c() {
    let r = liffig(&[
        "transpile",
        &corpus_arg("gcd_stein.lif"),
        "--name",
        "gcd",
        "--params",
        "x,y",
        "--return-var",
        "z",
    ]);
    assert_eq!(r.code, 0);
    let committed = fs::read_to_string(corpus("gcd_stein.c")).unwrap();
    assert_eq!(r.stdout, committed);
}
