//! Evaluation of terms, formulas and commands over a state.
//!
//! All arithmetic is checked 64-bit: overflow, division by zero, negative
//! exponents and nonpositive gcd arguments stop evaluation with a fault
//! instead of wrapping.
//!
//! Formulas evaluate in three-valued logic: prose kept as [`Formula::Opaque`]
//! is `Unknown`, and `Unknown` propagates through the connectives. Callers
//! that must not skip anything check for opaque parts up front.

use alloc::string::String;
use alloc::vec::Vec;

use crate::ast::{BinOp, CmpOp, Command, Formula, Func, Lhs, Pred, Term};
use crate::state::{FaultKind, State};

/// Truth value of a formula that may contain prose.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Truth {
    True,
    False,
    /// Some opaque part decided the outcome.
    Unknown,
}

impl Truth {
    fn and(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::False, _) | (_, Truth::False) => Truth::False,
            (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
            _ => Truth::True,
        }
    }

    fn or(self, other: Truth) -> Truth {
        match (self, other) {
            (Truth::True, _) | (_, Truth::True) => Truth::True,
            (Truth::Unknown, _) | (_, Truth::Unknown) => Truth::Unknown,
            _ => Truth::False,
        }
    }

    fn not(self) -> Truth {
        match self {
            Truth::True => Truth::False,
            Truth::False => Truth::True,
            Truth::Unknown => Truth::Unknown,
        }
    }

    fn of(b: bool) -> Truth {
        if b {
            Truth::True
        } else {
            Truth::False
        }
    }
}

/// Bindings for quantified variables, innermost last.
type Bound = Vec<(crate::ast::Ident, i64)>;

pub fn eval_term(t: &Term, state: &State) -> Result<i64, FaultKind> {
    eval_term_in(t, state, &mut Vec::new())
}

fn eval_term_in(t: &Term, state: &State, bound: &mut Bound) -> Result<i64, FaultKind> {
    match t {
        Term::IntLit(v) => Ok(*v),
        Term::Var(x) => {
            if let Some((_, v)) = bound.iter().rev().find(|(b, _)| b == x) {
                return Ok(*v);
            }
            state.get(x).ok_or(FaultKind::DomainError)
        }
        Term::ArrayRef(a, idx) => {
            let i = eval_term_in(idx, state, bound)?;
            let arr = state.array(a).ok_or(FaultKind::DomainError)?;
            if i < 0 || i as usize >= arr.len() {
                return Err(FaultKind::IndexOutOfBounds);
            }
            Ok(arr[i as usize])
        }
        Term::BinOp(op, a, b) => {
            let a = eval_term_in(a, state, bound)?;
            let b = eval_term_in(b, state, bound)?;
            apply_binop(*op, a, b)
        }
        Term::Apply(Func::Gcd, args) => {
            let a = eval_term_in(&args[0], state, bound)?;
            let b = eval_term_in(&args[1], state, bound)?;
            gcd_op(a, b)
        }
    }
}

fn apply_binop(op: BinOp, a: i64, b: i64) -> Result<i64, FaultKind> {
    match op {
        BinOp::Add => a.checked_add(b).ok_or(FaultKind::Overflow),
        BinOp::Sub => a.checked_sub(b).ok_or(FaultKind::Overflow),
        BinOp::Mul => a.checked_mul(b).ok_or(FaultKind::Overflow),
        BinOp::Div => floor_div(a, b),
        BinOp::Mod => mod_op(a, b),
        BinOp::Pow => pow_op(a, b),
    }
}

/// Division rounding toward negative infinity.
pub fn floor_div(a: i64, b: i64) -> Result<i64, FaultKind> {
    if b == 0 {
        return Err(FaultKind::DivByZero);
    }
    if a == i64::MIN && b == -1 {
        return Err(FaultKind::Overflow);
    }
    let q = a / b;
    let r = a % b;
    Ok(if r != 0 && (r < 0) != (b < 0) { q - 1 } else { q })
}

/// Remainder in `0..|b|`.
pub fn mod_op(a: i64, b: i64) -> Result<i64, FaultKind> {
    match b {
        0 => Err(FaultKind::DivByZero),
        -1 => Ok(0),
        _ => Ok(a.rem_euclid(b)),
    }
}

/// `a^e` for `e >= 0`, faulting on overflow.
pub fn pow_op(a: i64, e: i64) -> Result<i64, FaultKind> {
    if e < 0 {
        return Err(FaultKind::DomainError);
    }
    let mut result: i64 = 1;
    let mut base = a;
    let mut exp = e as u64;
    while exp > 0 {
        if exp & 1 == 1 {
            result = result.checked_mul(base).ok_or(FaultKind::Overflow)?;
        }
        exp >>= 1;
        if exp > 0 {
            base = base.checked_mul(base).ok_or(FaultKind::Overflow)?;
        }
    }
    Ok(result)
}

/// Greatest common divisor of two positive numbers.
pub fn gcd_op(a: i64, b: i64) -> Result<i64, FaultKind> {
    if a <= 0 || b <= 0 {
        return Err(FaultKind::DomainError);
    }
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    Ok(a)
}

/// Three-valued evaluation; opaque parts yield [`Truth::Unknown`].
pub fn eval_formula(f: &Formula, state: &State) -> Result<Truth, FaultKind> {
    eval_formula_in(f, state, &mut Vec::new())
}

/// Two-valued evaluation for formulas already known to be fully formal.
/// An opaque part or unresolved label reference is a domain fault.
pub fn eval_formula_strict(f: &Formula, state: &State) -> Result<bool, FaultKind> {
    match eval_formula(f, state)? {
        Truth::True => Ok(true),
        Truth::False => Ok(false),
        Truth::Unknown => Err(FaultKind::DomainError),
    }
}

fn eval_formula_in(f: &Formula, state: &State, bound: &mut Bound) -> Result<Truth, FaultKind> {
    match f {
        Formula::TrueF => Ok(Truth::True),
        Formula::FalseF => Ok(Truth::False),
        Formula::Compare(op, a, b) => {
            let a = eval_term_in(a, state, bound)?;
            let b = eval_term_in(b, state, bound)?;
            Ok(Truth::of(match op {
                CmpOp::Eq => a == b,
                CmpOp::Ne => a != b,
                CmpOp::Lt => a < b,
                CmpOp::Le => a <= b,
                CmpOp::Gt => a > b,
                CmpOp::Ge => a >= b,
            }))
        }
        Formula::Pred(p, args) => {
            let a = eval_term_in(&args[0], state, bound)?;
            Ok(Truth::of(match p {
                Pred::Even => a & 1 == 0,
                Pred::Odd => a & 1 == 1,
                Pred::Div => {
                    let b = eval_term_in(&args[1], state, bound)?;
                    if b == 0 {
                        return Err(FaultKind::DivByZero);
                    }
                    a % b == 0
                }
            }))
        }
        Formula::Not(a) => Ok(eval_formula_in(a, state, bound)?.not()),
        Formula::And(a, b) => {
            let a = eval_formula_in(a, state, bound)?;
            if a == Truth::False {
                return Ok(Truth::False);
            }
            Ok(a.and(eval_formula_in(b, state, bound)?))
        }
        Formula::Or(a, b) => {
            let a = eval_formula_in(a, state, bound)?;
            if a == Truth::True {
                return Ok(Truth::True);
            }
            Ok(a.or(eval_formula_in(b, state, bound)?))
        }
        Formula::Implies(a, b) => {
            let a = eval_formula_in(a, state, bound)?;
            if a == Truth::False {
                return Ok(Truth::True);
            }
            Ok(a.not().or(eval_formula_in(b, state, bound)?))
        }
        Formula::BoundedAll(v, lo, hi, body) => {
            let lo = eval_term_in(lo, state, bound)?;
            let hi = eval_term_in(hi, state, bound)?;
            let mut acc = Truth::True;
            for i in lo..=hi {
                bound.push((v.clone(), i));
                let r = eval_formula_in(body, state, bound);
                bound.pop();
                acc = acc.and(r?);
                if acc == Truth::False {
                    break;
                }
            }
            Ok(acc)
        }
        Formula::BoundedSome(v, lo, hi, body) => {
            let lo = eval_term_in(lo, state, bound)?;
            let hi = eval_term_in(hi, state, bound)?;
            let mut acc = Truth::False;
            for i in lo..=hi {
                bound.push((v.clone(), i));
                let r = eval_formula_in(body, state, bound);
                bound.pop();
                acc = acc.or(r?);
                if acc == Truth::True {
                    break;
                }
            }
            Ok(acc)
        }
        Formula::LabelRef(_) => Ok(Truth::Unknown),
        Formula::Opaque(_) => Ok(Truth::Unknown),
    }
}

/// What applying a command did. Anything but `Continue` leaves the state
/// partially updated (the prefix of a sequence may already have run).
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CmdStep {
    Continue,
    /// An embedded guard evaluated to false: no transition from here.
    Blocked,
    /// An embedded guard contains prose and cannot decide.
    GuardUnknown,
    /// An annotation evaluated to false.
    AnnotFailed(Formula),
    /// Execution reached a hole; the text names the missing work.
    HoleReached(String),
}

/// Run a command against the state in place.
///
/// Parallel assignment evaluates every source and every target index in
/// the pre-state; two writes to the same cell are a [`FaultKind::WriteConflict`].
pub fn apply_command(
    cmd: &Command,
    state: &mut State,
    check_annotations: bool,
) -> Result<CmdStep, FaultKind> {
    match cmd {
        Command::ParAssign(targets, sources) => {
            let mut values = Vec::with_capacity(sources.len());
            for s in sources {
                values.push(eval_term(s, state)?);
            }
            // Resolve target cells against the pre-state as well.
            let mut writes: Vec<(Lhs, Option<i64>)> = Vec::with_capacity(targets.len());
            for t in targets {
                match t {
                    Lhs::Var(_) => writes.push((t.clone(), None)),
                    Lhs::ArrayElem(a, idx) => {
                        let i = eval_term(idx, state)?;
                        let arr = state.array(a).ok_or(FaultKind::DomainError)?;
                        if i < 0 || i as usize >= arr.len() {
                            return Err(FaultKind::IndexOutOfBounds);
                        }
                        writes.push((Lhs::ArrayElem(a.clone(), Term::IntLit(i)), Some(i)));
                    }
                }
            }
            for (i, (a, _)) in writes.iter().enumerate() {
                for (b, _) in &writes[i + 1..] {
                    if a == b {
                        return Err(FaultKind::WriteConflict);
                    }
                }
            }
            for ((target, cell), value) in writes.into_iter().zip(values) {
                match (target, cell) {
                    (Lhs::Var(x), _) => state.set(&x, value),
                    (Lhs::ArrayElem(a, _), Some(i)) => {
                        state.set_array_elem(&a, i as usize, value)
                    }
                    _ => unreachable!(),
                }
            }
            Ok(CmdStep::Continue)
        }
        Command::Swap(a, b) => {
            let va = state.get(a).ok_or(FaultKind::DomainError)?;
            let vb = state.get(b).ok_or(FaultKind::DomainError)?;
            state.set(a, vb);
            state.set(b, va);
            Ok(CmdStep::Continue)
        }
        Command::Guard(f) => match eval_formula(f, state)? {
            Truth::True => Ok(CmdStep::Continue),
            Truth::False => Ok(CmdStep::Blocked),
            Truth::Unknown => Ok(CmdStep::GuardUnknown),
        },
        Command::Annot(f) => {
            if !check_annotations {
                return Ok(CmdStep::Continue);
            }
            match eval_formula(f, state)? {
                Truth::False => Ok(CmdStep::AnnotFailed(f.clone())),
                // Prose annotations are not checkable; let them pass.
                Truth::True | Truth::Unknown => Ok(CmdStep::Continue),
            }
        }
        Command::Hole(text) => Ok(CmdStep::HoleReached(text.clone())),
        Command::Seq(cmds) => {
            for c in cmds {
                match apply_command(c, state, check_annotations)? {
                    CmdStep::Continue => {}
                    stop => return Ok(stop),
                }
            }
            Ok(CmdStep::Continue)
        }
    }
}
