//! Shared fixtures: reference oracles (independent of the crate under
//! test) and corpus plumbing.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use liffig::interp::{run_with_observer, RunSummary};
use liffig::{parse_program, Ident, Program, RunConfig};

/// Reference gcd by the classic remainder loop; the corpus programs use
/// a different (binary) method, so agreement is meaningful.
pub fn euclid(mut a: i64, mut b: i64) -> i64 {
    assert!(a > 0 && b > 0);
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// First `n` primes by straightforward remainder-based trial division.
pub fn first_primes(n: usize) -> Vec<i64> {
    let mut primes: Vec<i64> = Vec::with_capacity(n);
    let mut cand = 2i64;
    while primes.len() < n {
        if primes.iter().all(|p| cand % p != 0) {
            primes.push(cand);
        }
        cand += 1;
    }
    primes
}

#[test]
fn oracles_are_sane() {
    assert_eq!(euclid(12, 8), 4);
    assert_eq!(euclid(7, 7), 7);
    assert_eq!(euclid(1, 9), 1);
    assert_eq!(first_primes(5), [2, 3, 5, 7, 11]);
}

pub fn corpus_text(name: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus").join(name);
    fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

pub fn parse_corpus(name: &str) -> Program {
    match parse_program(&corpus_text(name)) {
        Ok(parsed) => parsed.program,
        Err(diags) => {
            for d in &diags {
                eprintln!("{d}");
            }
            panic!("{name} failed to parse");
        }
    }
}

pub fn id(name: &str) -> Ident {
    Ident::new(name).unwrap()
}

pub fn inputs(pairs: &[(&str, i64)]) -> BTreeMap<Ident, i64> {
    pairs.iter().map(|(n, v)| (id(n), *v)).collect()
}

/// Run with the default configuration (assertions and annotations on).
pub fn run(program: &Program, pairs: &[(&str, i64)]) -> RunSummary {
    run_with_observer(program, &inputs(pairs), &RunConfig::default(), |_, _| {})
}

/// Run a GCD corpus program on `x0, y0` with ghosts bound.
pub fn run_gcd(program: &Program, x0: i64, y0: i64) -> RunSummary {
    run(program, &[("x", x0), ("x0", x0), ("y", y0), ("y0", y0)])
}
