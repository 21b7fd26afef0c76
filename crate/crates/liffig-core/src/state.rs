//! Program states and run outcomes.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::ast::{Formula, Ident};

/// A total valuation: every declared scalar has a 64-bit value, every
/// declared array a fixed-length sequence of them.
///
/// Arrays are shared copy-on-write so that keeping a long trace of states
/// costs one array copy per write, not one per step.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct State {
    pub scalars: BTreeMap<Ident, i64>,
    pub arrays: BTreeMap<Ident, Arc<Vec<i64>>>,
}

impl State {
    pub fn new() -> Self {
        State::default()
    }

    pub fn get(&self, name: &Ident) -> Option<i64> {
        self.scalars.get(name).copied()
    }

    pub fn set(&mut self, name: &Ident, value: i64) {
        if let Some(slot) = self.scalars.get_mut(name) {
            *slot = value;
        } else {
            self.scalars.insert(name.clone(), value);
        }
    }

    pub fn array(&self, name: &Ident) -> Option<&[i64]> {
        self.arrays.get(name).map(|a| a.as_slice())
    }

    pub fn set_array(&mut self, name: &Ident, values: Vec<i64>) {
        self.arrays.insert(name.clone(), Arc::new(values));
    }

    /// Write one array cell; the bounds must already have been checked.
    pub(crate) fn set_array_elem(&mut self, name: &Ident, index: usize, value: i64) {
        if let Some(arr) = self.arrays.get_mut(name) {
            Arc::make_mut(arr)[index] = value;
        }
    }
}

impl fmt::Display for State {
    /// `x=1,y=2,p=[2,3,5]` with names in sorted order.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.scalars {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        for (k, arr) in &self.arrays {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{k}=[")?;
            for (i, v) in arr.iter().enumerate() {
                if i > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{v}")?;
            }
            f.write_str("]")?;
        }
        Ok(())
    }
}

/// Why evaluation or a run stopped abnormally.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FaultKind {
    Overflow,
    DivByZero,
    IndexOutOfBounds,
    FuelExhausted,
    /// A built-in applied outside its domain (`gcd` needs positive
    /// arguments, `^` a nonnegative exponent).
    DomainError,
    /// Two parallel-assignment targets named the same location.
    WriteConflict,
}

impl fmt::Display for FaultKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            FaultKind::Overflow => "overflow",
            FaultKind::DivByZero => "div_by_zero",
            FaultKind::IndexOutOfBounds => "index_out_of_bounds",
            FaultKind::FuelExhausted => "fuel_exhausted",
            FaultKind::DomainError => "domain_error",
            FaultKind::WriteConflict => "write_conflict",
        };
        f.write_str(s)
    }
}

/// How a run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum RunResult {
    /// The halt block returned this value.
    Halted(i64),
    /// No guard of an `if .. fi` (or an `abort` body) held at this label.
    Aborted(Ident),
    /// The label's assertion did not hold on arrival.
    AssertionViolation(Ident, Formula),
    /// Execution reached a hole; its prose says what is still to do.
    HoleReached(Ident, String),
    Fault(FaultKind, Ident),
    /// Under the overlap-checking guard policy: more than one guard held.
    /// The indices are the positions of the overlapping arms.
    GuardOverlap(Ident, Vec<usize>),
    /// A guard fell outside the formal fragment and cannot be evaluated.
    OpaqueGuard(Ident),
}

impl RunResult {
    pub fn is_halted(&self) -> bool {
        matches!(self, RunResult::Halted(_))
    }
}

impl fmt::Display for RunResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RunResult::Halted(v) => write!(f, "Halted({v})"),
            RunResult::Aborted(l) => write!(f, "Aborted({l})"),
            RunResult::AssertionViolation(l, _) => write!(f, "AssertionViolation({l})"),
            RunResult::HoleReached(l, text) => write!(f, "HoleReached({l}, \"{text}\")"),
            RunResult::Fault(kind, l) => write!(f, "Fault({kind}, {l})"),
            RunResult::GuardOverlap(l, arms) => {
                write!(f, "GuardOverlap({l}, arms ")?;
                for (i, a) in arms.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
            RunResult::OpaqueGuard(l) => write!(f, "OpaqueGuard({l})"),
        }
    }
}

/// The record of one run: every label arrival with the state on arrival,
/// and how the run ended.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Trace {
    pub visits: Vec<(Ident, State)>,
    pub result: RunResult,
    /// Number of label arrivals, counted even by observers that do not
    /// keep the visit list.
    pub visit_count: u64,
    /// One note per label whose assertion was only partially checkable
    /// (opaque prose is skipped), plus any overlap reports.
    pub warnings: Vec<String>,
}

/// `label<TAB>state` per visit, then a `RESULT` line.
pub fn trace_to_text(trace: &Trace) -> String {
    use core::fmt::Write;
    let mut out = String::new();
    for (label, state) in &trace.visits {
        let _ = writeln!(out, "{label}\t{state}");
    }
    let _ = writeln!(out, "RESULT {}", trace.result);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn id(s: &str) -> Ident {
        Ident::new(s).unwrap()
    }

    #[test]
    fn state_displays_sorted_and_bracketed() {
        let mut s = State::new();
        s.set(&id("y"), 8);
        s.set(&id("x"), 12);
        s.set_array(&id("p"), vec![2, 3, 5]);
        assert_eq!(s.to_string(), "x=12,y=8,p=[2,3,5]");
    }

    #[test]
    fn copy_on_write_does_not_touch_other_states() {
        let mut a = State::new();
        a.set_array(&id("p"), vec![1, 2, 3]);
        let b = a.clone();
        a.set_array_elem(&id("p"), 0, 99);
        assert_eq!(a.array(&id("p")).unwrap(), &[99, 2, 3]);
        assert_eq!(b.array(&id("p")).unwrap(), &[1, 2, 3]);
    }

    #[test]
    fn trace_text_has_result_line() {
        let mut s = State::new();
        s.set(&id("x"), 4);
        let t = Trace {
            visits: vec![(id("S"), s)],
            result: RunResult::Halted(4),
            visit_count: 1,
            warnings: vec![],
        };
        assert_eq!(trace_to_text(&t), "S\tx=4\nRESULT Halted(4)\n");
    }
}
