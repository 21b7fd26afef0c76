//! Program execution: a state machine stepping from label to label,
//! checking each label's assertion on arrival.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{Block, BlockBody, DeclKind, Formula, Ident, Program, Term, Terminal};
use crate::eval::{apply_command, eval_formula, eval_term, CmdStep, Truth};
use crate::state::{FaultKind, RunResult, State, Trace};

/// How to pick among guards whose disjointness is the programmer's claim.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum GuardPolicy {
    /// Take the textually first true guard.
    #[default]
    FirstTrue,
    /// Evaluate all guards and stop if more than one is true.
    FailOnOverlap,
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    /// Maximum number of label visits before the run is cut off.
    pub fuel: u64,
    pub check_assertions: bool,
    pub check_annotations: bool,
    pub guard_policy: GuardPolicy,
    /// Termination measure, if any; evaluated over the finished trace by
    /// [`check_variant`].
    pub variant: Option<Term>,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            fuel: 10_000_000,
            check_assertions: true,
            check_annotations: true,
            guard_policy: GuardPolicy::FirstTrue,
            variant: None,
        }
    }
}

/// Result of executing one block from its label.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Goto(Ident),
    Returned(i64),
    /// No guard was true.
    Aborted,
    /// More than one guard was true under [`GuardPolicy::FailOnOverlap`];
    /// carries the indices of the true guards.
    Overlap(Vec<usize>),
    /// A guard contains prose and cannot be decided.
    OpaqueGuard,
    /// An embedded guard command was false mid-body.
    Blocked,
    HoleReached(String),
    AnnotFailed(Formula),
}

/// Execute the body of `block` against `state`.
pub fn step(
    block: &Block,
    state: &mut State,
    cfg: &RunConfig,
) -> Result<StepOutcome, FaultKind> {
    match &block.body {
        BlockBody::Abort => Ok(StepOutcome::Aborted),
        BlockBody::Return(t) => Ok(StepOutcome::Returned(eval_term(t, state)?)),
        BlockBody::Straight(cmd, terminal) => {
            match apply_command(cmd, state, cfg.check_annotations)? {
                CmdStep::Continue => take_terminal(terminal, state),
                other => Ok(lift_cmd_step(other)),
            }
        }
        BlockBody::IfFi(arms) => {
            let chosen = match cfg.guard_policy {
                GuardPolicy::FirstTrue => {
                    let mut chosen = None;
                    for (i, gc) in arms.iter().enumerate() {
                        match eval_formula(&gc.guard, state)? {
                            Truth::True => {
                                chosen = Some(i);
                                break;
                            }
                            Truth::False => {}
                            Truth::Unknown => return Ok(StepOutcome::OpaqueGuard),
                        }
                    }
                    chosen
                }
                GuardPolicy::FailOnOverlap => {
                    let mut truthy = Vec::new();
                    for (i, gc) in arms.iter().enumerate() {
                        match eval_formula(&gc.guard, state)? {
                            Truth::True => truthy.push(i),
                            Truth::False => {}
                            Truth::Unknown => return Ok(StepOutcome::OpaqueGuard),
                        }
                    }
                    match truthy.len() {
                        0 => None,
                        1 => Some(truthy[0]),
                        _ => return Ok(StepOutcome::Overlap(truthy)),
                    }
                }
            };
            let Some(i) = chosen else {
                return Ok(StepOutcome::Aborted);
            };
            let gc = &arms[i];
            match apply_command(&gc.body, state, cfg.check_annotations)? {
                CmdStep::Continue => take_terminal(&gc.terminal, state),
                other => Ok(lift_cmd_step(other)),
            }
        }
    }
}

fn take_terminal(t: &Terminal, state: &State) -> Result<StepOutcome, FaultKind> {
    match t {
        Terminal::Goto(l) => Ok(StepOutcome::Goto(l.clone())),
        Terminal::Return(term) => Ok(StepOutcome::Returned(eval_term(term, state)?)),
    }
}

fn lift_cmd_step(s: CmdStep) -> StepOutcome {
    match s {
        CmdStep::Continue => unreachable!("handled by the caller"),
        CmdStep::Blocked => StepOutcome::Blocked,
        CmdStep::GuardUnknown => StepOutcome::OpaqueGuard,
        CmdStep::AnnotFailed(f) => StepOutcome::AnnotFailed(f),
        CmdStep::HoleReached(text) => StepOutcome::HoleReached(text),
    }
}

/// Everything a run produces except the per-visit snapshots.
#[derive(Clone, Debug)]
pub struct RunSummary {
    pub result: RunResult,
    pub visit_count: u64,
    pub warnings: Vec<String>,
    pub final_state: State,
}

/// The initial state: declarations (with initializers) first, then inputs.
/// Unset scalars are 0; arrays are zero-filled unless initialized.
pub fn initial_state(
    program: &Program,
    inputs: &BTreeMap<Ident, i64>,
    warnings: &mut Vec<String>,
) -> State {
    let mut state = State::new();
    for d in &program.decls {
        match d.kind {
            DeclKind::Scalar => state.set(&d.name, d.init.unwrap_or(0)),
            DeclKind::Array(n) => {
                state.set_array(&d.name, alloc::vec![d.init.unwrap_or(0); n as usize])
            }
        }
    }
    for (name, value) in inputs {
        match program.decl(name).map(|d| d.kind) {
            Some(DeclKind::Scalar) => state.set(name, *value),
            Some(DeclKind::Array(_)) => {
                warnings.push(format!("input `{name}` names an array; ignored"))
            }
            None => warnings.push(format!("input `{name}` is not declared; ignored")),
        }
    }
    state
}

/// Run without recording snapshots; `observer` sees every visit.
pub fn run_with_observer(
    program: &Program,
    inputs: &BTreeMap<Ident, i64>,
    cfg: &RunConfig,
    mut observer: impl FnMut(&Ident, &State),
) -> RunSummary {
    let mut warnings = Vec::new();
    let mut state = initial_state(program, inputs, &mut warnings);

    // Resolve every label's assertion once up front.
    let mut resolved: BTreeMap<Ident, Formula> = BTreeMap::new();
    for b in &program.blocks {
        match program.resolve_assertion(&b.label) {
            Ok(f) => {
                resolved.insert(b.label.clone(), f);
            }
            Err(e) => {
                warnings.push(format!("cannot resolve assertion of `{}`: {e}", b.label));
                return RunSummary {
                    result: RunResult::Fault(FaultKind::DomainError, b.label.clone()),
                    visit_count: 0,
                    warnings,
                    final_state: state,
                };
            }
        }
    }

    let mut prose_warned: alloc::collections::BTreeSet<Ident> =
        alloc::collections::BTreeSet::new();
    let mut visit_count: u64 = 0;
    let mut current = program.start.clone();

    // Visit a label: record it and check its assertion. Returns a result
    // only when the assertion check ends the run.
    macro_rules! visit {
        ($label:expr) => {{
            visit_count += 1;
            observer($label, &state);
            let mut stop = None;
            if cfg.check_assertions {
                let assertion = resolved.get($label).expect("resolved above");
                match eval_formula(assertion, &state) {
                    Ok(Truth::True) => {}
                    Ok(Truth::Unknown) => {
                        if prose_warned.insert($label.clone()) {
                            warnings.push(format!(
                                "assertion of `{}` contains prose; not checked",
                                $label
                            ));
                        }
                    }
                    Ok(Truth::False) => {
                        stop = Some(RunResult::AssertionViolation(
                            $label.clone(),
                            assertion.clone(),
                        ));
                    }
                    Err(kind) => stop = Some(RunResult::Fault(kind, $label.clone())),
                }
            }
            stop
        }};
    }

    let result = loop {
        if visit_count >= cfg.fuel {
            break RunResult::Fault(FaultKind::FuelExhausted, current.clone());
        }
        if let Some(stop) = visit!(&current) {
            break stop;
        }
        let Some(block) = program.block(&current) else {
            break RunResult::Fault(FaultKind::DomainError, current.clone());
        };
        match step(block, &mut state, cfg) {
            Ok(StepOutcome::Goto(next)) => current = next,
            Ok(StepOutcome::Returned(v)) => {
                // A return from a guarded command is a jump to the halt
                // label; give the halt assertion its say.
                if current != program.halt {
                    let halt = program.halt.clone();
                    if visit_count >= cfg.fuel {
                        break RunResult::Fault(FaultKind::FuelExhausted, halt);
                    }
                    if let Some(stop) = visit!(&halt) {
                        break stop;
                    }
                }
                break RunResult::Halted(v);
            }
            Ok(StepOutcome::Aborted) => break RunResult::Aborted(current.clone()),
            Ok(StepOutcome::Blocked) => break RunResult::Aborted(current.clone()),
            Ok(StepOutcome::Overlap(indices)) => {
                break RunResult::GuardOverlap(current.clone(), indices)
            }
            Ok(StepOutcome::OpaqueGuard) => break RunResult::OpaqueGuard(current.clone()),
            Ok(StepOutcome::HoleReached(text)) => {
                break RunResult::HoleReached(current.clone(), text)
            }
            Ok(StepOutcome::AnnotFailed(f)) => {
                break RunResult::AssertionViolation(current.clone(), f)
            }
            Err(kind) => break RunResult::Fault(kind, current.clone()),
        }
    };

    RunSummary { result, visit_count, warnings, final_state: state }
}

/// Run and record a full trace: one `(label, state)` snapshot per visit.
pub fn run(program: &Program, inputs: &BTreeMap<Ident, i64>, cfg: &RunConfig) -> Trace {
    let mut visits = Vec::new();
    let summary = run_with_observer(program, inputs, cfg, |label, state| {
        visits.push((label.clone(), state.clone()));
    });
    Trace {
        visits,
        result: summary.result,
        visit_count: summary.visit_count,
        warnings: summary.warnings,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum VariantVerdict {
    Ok,
    /// Index into the trace's visits of the first violation.
    ViolationAt(usize),
}

/// Check a termination measure over a finished trace: its value must be
/// nonnegative at every visit and strictly decrease between consecutive
/// visits to the same label (every completed circuit).
pub fn check_variant(trace: &Trace, variant: &Term) -> Result<VariantVerdict, FaultKind> {
    let mut last: BTreeMap<Ident, i64> = BTreeMap::new();
    for (i, (label, state)) in trace.visits.iter().enumerate() {
        let v = eval_term(variant, state)?;
        if v < 0 {
            return Ok(VariantVerdict::ViolationAt(i));
        }
        if let Some(prev) = last.get(label) {
            if v >= *prev {
                return Ok(VariantVerdict::ViolationAt(i));
            }
        }
        last.insert(label.clone(), v);
    }
    Ok(VariantVerdict::Ok)
}

/// Inputs helper: parse `x=12` pairs the way the CLI's `--set` does.
pub fn parse_binding(text: &str) -> Result<(Ident, i64), String> {
    let (name, value) = text
        .split_once('=')
        .ok_or_else(|| format!("`{text}` is not of the form var=value"))?;
    let ident = Ident::new(name.trim()).map_err(|e| e.to_string())?;
    let value: i64 = value
        .trim()
        .parse()
        .map_err(|_| format!("`{}` is not a 64-bit integer", value.trim()))?;
    Ok((ident, value))
}
