//! Syntax trees for Liffig programs.
//!
//! A program is a list of integer declarations followed by labeled blocks.
//! Each block carries an assertion (a [`Formula`], possibly opaque prose)
//! and a body: a set of guarded commands, a straight-line command list, a
//! bare `abort`, or a `return`. Control only ever moves by `goto` between
//! labels or by returning, so the whole program is a flat label graph.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::sync::Arc;
use alloc::vec::Vec;
use core::fmt;

use crate::diag::SourceSpan;

/// Words that cannot be used as identifiers.
pub const RESERVED_WORDS: &[&str] = &[
    "if", "fi", "goto", "return", "abort", "int", "all", "some", "in", "or", "swap", "true",
    "false",
];

/// An identifier: `[A-Za-z][A-Za-z0-9_]*`, not a reserved word.
///
/// Identifiers compare, order and hash by name alone; the span is carried
/// for diagnostics and ignored by comparisons.
#[derive(Clone)]
pub struct Ident {
    name: Arc<str>,
    pub span: SourceSpan,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BadIdent(pub String);

impl fmt::Display for BadIdent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "invalid identifier `{}`", self.0)
    }
}

impl core::error::Error for BadIdent {}

impl Ident {
    pub fn new(name: &str) -> Result<Self, BadIdent> {
        Self::with_span(name, SourceSpan::synthetic())
    }

    pub fn with_span(name: &str, span: SourceSpan) -> Result<Self, BadIdent> {
        if !Self::is_valid(name) {
            return Err(BadIdent(name.into()));
        }
        Ok(Ident { name: Arc::from(name), span })
    }

    pub fn is_valid(name: &str) -> bool {
        let mut chars = name.chars();
        let head_ok = chars.next().is_some_and(|c| c.is_ascii_alphabetic());
        head_ok
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
            && !RESERVED_WORDS.contains(&name)
    }

    pub fn as_str(&self) -> &str {
        &self.name
    }
}

impl PartialEq for Ident {
    fn eq(&self, other: &Self) -> bool {
        self.name == other.name
    }
}

impl Eq for Ident {}

impl PartialOrd for Ident {
    fn partial_cmp(&self, other: &Self) -> Option<core::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Ident {
    fn cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.name.cmp(&other.name)
    }
}

impl core::hash::Hash for Ident {
    fn hash<H: core::hash::Hasher>(&self, state: &mut H) {
        self.name.hash(state)
    }
}

impl fmt::Debug for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Ident({})", self.name)
    }
}

impl fmt::Display for Ident {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}

/// Integer-valued expressions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Term {
    IntLit(i64),
    Var(Ident),
    /// `a[i]`
    ArrayRef(Ident, Box<Term>),
    BinOp(BinOp, Box<Term>, Box<Term>),
    /// Built-in function application, e.g. `gcd(x, y)`.
    Apply(Func, Vec<Term>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    /// Floor division.
    Div,
    /// Nonnegative integer power.
    Pow,
    /// Remainder in `0 .. |divisor|`, written `mod(a, b)`.
    Mod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    /// Greatest common divisor of two positive arguments.
    Gcd,
}

impl Func {
    pub fn name(self) -> &'static str {
        match self {
            Func::Gcd => "gcd",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Gcd => 2,
        }
    }
}

/// Truth-valued expressions. Assertions that are not in the formal
/// fragment are kept verbatim as [`Formula::Opaque`] prose.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Formula {
    TrueF,
    FalseF,
    Compare(CmpOp, Term, Term),
    /// Built-in predicate, e.g. `even(x)` or `div(cand, p[j])`.
    Pred(Pred, Vec<Term>),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Implies(Box<Formula>, Box<Formula>),
    /// `all i in lo..hi : body`: body holds for every `lo <= i <= hi`.
    BoundedAll(Ident, Box<Term>, Box<Term>, Box<Formula>),
    /// `some i in lo..hi : body`: body holds for at least one such `i`.
    BoundedSome(Ident, Box<Term>, Box<Term>, Box<Formula>),
    /// The assertion of another label, included by name (`B: A & x>y`).
    LabelRef(Ident),
    /// Prose that the formal fragment cannot express, kept as written.
    Opaque(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CmpOp {
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Pred {
    Even,
    Odd,
    /// `div(a, b)`: b divides a.
    Div,
}

impl Pred {
    pub fn name(self) -> &'static str {
        match self {
            Pred::Even => "even",
            Pred::Odd => "odd",
            Pred::Div => "div",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Pred::Even | Pred::Odd => 1,
            Pred::Div => 2,
        }
    }
}

/// An assignment target: a scalar or one array cell.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Lhs {
    Var(Ident),
    ArrayElem(Ident, Term),
}

/// State-transforming commands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Command {
    /// `x, a[i] := e1, e2`: all sources evaluated in the pre-state.
    ParAssign(Vec<Lhs>, Vec<Term>),
    /// `swap(x, y)` on two scalars.
    Swap(Ident, Ident),
    /// Pass only the states satisfying the formula.
    Guard(Formula),
    /// `"prose"`: a placeholder for code not yet written.
    Hole(String),
    Seq(Vec<Command>),
    /// `{ formula }`: an inline claim; checked only on request.
    Annot(Formula),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    Goto(Ident),
    Return(Term),
}

/// One arm of an `if .. fi`: guard, body, and a mandatory jump or return.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GuardedCommand {
    pub guard: Formula,
    pub body: Command,
    pub terminal: Terminal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum BlockBody {
    /// `if g1 -> .. | g2 -> .. fi`; aborts when no guard holds.
    IfFi(Vec<GuardedCommand>),
    /// Unguarded statements followed by a jump or return.
    Straight(Command, Terminal),
    /// Always aborts; stands for arms not yet written.
    Abort,
    /// The halt block: `return t`.
    Return(Term),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Block {
    pub label: Ident,
    pub assertion: Formula,
    pub body: BlockBody,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DeclKind {
    Scalar,
    /// Fixed length, known at declaration.
    Array(u64),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decl {
    pub name: Ident,
    pub kind: DeclKind,
    pub init: Option<i64>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Program {
    pub decls: Vec<Decl>,
    pub blocks: Vec<Block>,
    pub start: Ident,
    pub halt: Ident,
}

impl Program {
    pub fn block(&self, label: &Ident) -> Option<&Block> {
        self.blocks.iter().find(|b| &b.label == label)
    }

    pub fn decl(&self, name: &Ident) -> Option<&Decl> {
        self.decls.iter().find(|d| &d.name == name)
    }

    /// Assertion of `label` with every label reference replaced by the
    /// referenced block's own (recursively resolved) assertion.
    pub fn resolve_assertion(&self, label: &Ident) -> Result<Formula, ResolveError> {
        let map: BTreeMap<Ident, Formula> = self
            .blocks
            .iter()
            .map(|b| (b.label.clone(), b.assertion.clone()))
            .collect();
        resolve_in_map(&map, label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolveError {
    UnknownLabel(Ident),
    CyclicReference(Ident),
}

impl fmt::Display for ResolveError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ResolveError::UnknownLabel(l) => write!(f, "assertion refers to unknown label `{l}`"),
            ResolveError::CyclicReference(l) => {
                write!(f, "assertion references form a cycle through `{l}`")
            }
        }
    }
}

impl core::error::Error for ResolveError {}

/// Resolve the assertion named `label` against a label-to-assertion map.
pub fn resolve_in_map(
    map: &BTreeMap<Ident, Formula>,
    label: &Ident,
) -> Result<Formula, ResolveError> {
    let mut on_path = Vec::new();
    resolve_rec(map, label, &mut on_path)
}

fn resolve_rec(
    map: &BTreeMap<Ident, Formula>,
    label: &Ident,
    on_path: &mut Vec<Ident>,
) -> Result<Formula, ResolveError> {
    if on_path.contains(label) {
        return Err(ResolveError::CyclicReference(label.clone()));
    }
    let formula = map
        .get(label)
        .ok_or_else(|| ResolveError::UnknownLabel(label.clone()))?;
    on_path.push(label.clone());
    let out = substitute_refs(formula, map, on_path);
    on_path.pop();
    out
}

fn substitute_refs(
    f: &Formula,
    map: &BTreeMap<Ident, Formula>,
    on_path: &mut Vec<Ident>,
) -> Result<Formula, ResolveError> {
    Ok(match f {
        Formula::LabelRef(l) => resolve_rec(map, l, on_path)?,
        Formula::Not(a) => Formula::Not(Box::new(substitute_refs(a, map, on_path)?)),
        Formula::And(a, b) => Formula::And(
            Box::new(substitute_refs(a, map, on_path)?),
            Box::new(substitute_refs(b, map, on_path)?),
        ),
        Formula::Or(a, b) => Formula::Or(
            Box::new(substitute_refs(a, map, on_path)?),
            Box::new(substitute_refs(b, map, on_path)?),
        ),
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(substitute_refs(a, map, on_path)?),
            Box::new(substitute_refs(b, map, on_path)?),
        ),
        Formula::BoundedAll(v, lo, hi, body) => Formula::BoundedAll(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(substitute_refs(body, map, on_path)?),
        ),
        Formula::BoundedSome(v, lo, hi, body) => Formula::BoundedSome(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(substitute_refs(body, map, on_path)?),
        ),
        other => other.clone(),
    })
}

/// Scalar and array names a term reads.
pub fn term_vars(t: &Term, scalars: &mut BTreeSet<Ident>, arrays: &mut BTreeSet<Ident>) {
    match t {
        Term::IntLit(_) => {}
        Term::Var(v) => {
            scalars.insert(v.clone());
        }
        Term::ArrayRef(a, idx) => {
            arrays.insert(a.clone());
            term_vars(idx, scalars, arrays);
        }
        Term::BinOp(_, l, r) => {
            term_vars(l, scalars, arrays);
            term_vars(r, scalars, arrays);
        }
        Term::Apply(_, args) => {
            for a in args {
                term_vars(a, scalars, arrays);
            }
        }
    }
}

/// Free scalar and array names of a formula. Quantifier-bound variables
/// are not free within their body.
pub fn formula_vars(f: &Formula, scalars: &mut BTreeSet<Ident>, arrays: &mut BTreeSet<Ident>) {
    match f {
        Formula::TrueF | Formula::FalseF | Formula::Opaque(_) | Formula::LabelRef(_) => {}
        Formula::Compare(_, l, r) => {
            term_vars(l, scalars, arrays);
            term_vars(r, scalars, arrays);
        }
        Formula::Pred(_, args) => {
            for a in args {
                term_vars(a, scalars, arrays);
            }
        }
        Formula::Not(a) => formula_vars(a, scalars, arrays),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            formula_vars(a, scalars, arrays);
            formula_vars(b, scalars, arrays);
        }
        Formula::BoundedAll(v, lo, hi, body) | Formula::BoundedSome(v, lo, hi, body) => {
            term_vars(lo, scalars, arrays);
            term_vars(hi, scalars, arrays);
            let mut inner_s = BTreeSet::new();
            let mut inner_a = BTreeSet::new();
            formula_vars(body, &mut inner_s, &mut inner_a);
            inner_s.remove(v);
            scalars.extend(inner_s);
            arrays.extend(inner_a);
        }
    }
}

/// Scalar and array names a command mentions, reads and writes alike.
pub fn command_vars(c: &Command, scalars: &mut BTreeSet<Ident>, arrays: &mut BTreeSet<Ident>) {
    match c {
        Command::ParAssign(lhs, rhs) => {
            for l in lhs {
                match l {
                    Lhs::Var(v) => {
                        scalars.insert(v.clone());
                    }
                    Lhs::ArrayElem(a, idx) => {
                        arrays.insert(a.clone());
                        term_vars(idx, scalars, arrays);
                    }
                }
            }
            for t in rhs {
                term_vars(t, scalars, arrays);
            }
        }
        Command::Swap(a, b) => {
            scalars.insert(a.clone());
            scalars.insert(b.clone());
        }
        Command::Guard(f) | Command::Annot(f) => formula_vars(f, scalars, arrays),
        Command::Hole(_) => {}
        Command::Seq(cs) => {
            for c in cs {
                command_vars(c, scalars, arrays);
            }
        }
    }
}

/// Does any part of the formula fall outside the formal fragment?
pub fn formula_has_opaque(f: &Formula) -> bool {
    match f {
        Formula::Opaque(_) => true,
        Formula::TrueF
        | Formula::FalseF
        | Formula::Compare(..)
        | Formula::Pred(..)
        | Formula::LabelRef(_) => false,
        Formula::Not(a) => formula_has_opaque(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            formula_has_opaque(a) || formula_has_opaque(b)
        }
        Formula::BoundedAll(_, _, _, b) | Formula::BoundedSome(_, _, _, b) => {
            formula_has_opaque(b)
        }
    }
}

/// Does the formula reference any label's assertion by name?
pub fn formula_has_labelref(f: &Formula) -> bool {
    match f {
        Formula::LabelRef(_) => true,
        Formula::TrueF
        | Formula::FalseF
        | Formula::Compare(..)
        | Formula::Pred(..)
        | Formula::Opaque(_) => false,
        Formula::Not(a) => formula_has_labelref(a),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            formula_has_labelref(a) || formula_has_labelref(b)
        }
        Formula::BoundedAll(_, _, _, b) | Formula::BoundedSome(_, _, _, b) => {
            formula_has_labelref(b)
        }
    }
}

/// Does the command contain a hole?
pub fn command_has_hole(c: &Command) -> bool {
    match c {
        Command::Hole(_) => true,
        Command::Seq(cs) => cs.iter().any(command_has_hole),
        _ => false,
    }
}

impl Block {
    /// Guarded commands of the body, if it has any.
    pub fn arms(&self) -> &[GuardedCommand] {
        match &self.body {
            BlockBody::IfFi(gcs) => gcs,
            _ => &[],
        }
    }
}
