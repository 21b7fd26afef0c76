//! Translation to plain C: one function, labels and gotos kept one-to-one.
//!
//! Each block becomes a C label whose assertion rides along as a comment,
//! guarded commands become an `if (guard) { ... }` chain ending in
//! `assert(0);`, and a lone `true` guard is elided. With `checked` set,
//! every label also asserts its (formal) assertion at runtime.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{
    formula_vars, BinOp, Block, BlockBody, CmpOp, Command, DeclKind, Formula, Func, Ident,
    Lhs, Pred, Program, Term, Terminal,
};
use crate::pretty::formula_to_string;

#[derive(Clone, Debug)]
pub struct CgenOptions {
    /// Name of the emitted function.
    pub name: String,
    /// Parameters, in order; each must be a declared scalar.
    pub params: Vec<Ident>,
    /// The variable whose value the function returns, when one is named;
    /// it must be a declared scalar.
    pub return_var: Option<Ident>,
    /// Assert every label's assertion at runtime.
    pub checked: bool,
    /// Use `long long` instead of `int`.
    pub wide: bool,
}

impl Default for CgenOptions {
    fn default() -> Self {
        CgenOptions {
            name: "f".to_string(),
            params: Vec::new(),
            return_var: None,
            checked: false,
            wide: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CgenError {
    /// Holes cannot be translated; fill them first.
    HolePresent(Ident),
    /// With `checked`, every assertion must be formal.
    OpaqueAssertion(Ident),
    /// Guards must always be formal.
    OpaqueGuard(Ident),
    /// A parameter or return variable that is not a declared scalar.
    BadVariable(Ident),
    /// An assertion references a label without one.
    Unresolvable(Ident),
}

impl core::fmt::Display for CgenError {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            CgenError::HolePresent(l) => write!(f, "block `{l}` contains a hole"),
            CgenError::OpaqueAssertion(l) => {
                write!(f, "assertion of `{l}` is prose; cannot be checked at runtime")
            }
            CgenError::OpaqueGuard(l) => write!(f, "a guard in `{l}` is not formal"),
            CgenError::BadVariable(v) => write!(f, "`{v}` is not a declared scalar"),
            CgenError::Unresolvable(l) => {
                write!(f, "assertion of `{l}` references an unknown label")
            }
        }
    }
}

/// Translate a program to C text.
pub fn to_c(program: &Program, opts: &CgenOptions) -> Result<String, CgenError> {
    Emitter::new(program, opts)?.emit()
}

/// `to_c` with runtime assertion checking switched on.
pub fn emit_runtime_checked(
    program: &Program,
    opts: &CgenOptions,
) -> Result<String, CgenError> {
    let opts = CgenOptions { checked: true, ..opts.clone() };
    to_c(program, &opts)
}

struct Emitter<'a> {
    program: &'a Program,
    opts: &'a CgenOptions,
    /// `int` or `long long`.
    t: &'static str,
    resolved: BTreeMap<Ident, Formula>,
    /// Generated comparison helpers for quantified assertions.
    quant_helpers: Vec<String>,
    use_swap: bool,
    use_gcd: bool,
    use_pow: bool,
    use_mod: bool,
}

impl<'a> Emitter<'a> {
    fn new(program: &'a Program, opts: &'a CgenOptions) -> Result<Self, CgenError> {
        let t = if opts.wide { "long long" } else { "int" };
        let mut resolved = BTreeMap::new();
        for b in &program.blocks {
            match program.resolve_assertion(&b.label) {
                Ok(f) => {
                    if opts.checked && crate::ast::formula_has_opaque(&f) {
                        return Err(CgenError::OpaqueAssertion(b.label.clone()));
                    }
                    resolved.insert(b.label.clone(), f);
                }
                Err(_) if !opts.checked => {}
                Err(_) => return Err(CgenError::Unresolvable(b.label.clone())),
            }
        }
        for check in opts.params.iter().chain(opts.return_var.iter()) {
            match program.decl(check).map(|d| d.kind) {
                Some(DeclKind::Scalar) => {}
                _ => return Err(CgenError::BadVariable(check.clone())),
            }
        }
        Ok(Emitter {
            program,
            opts,
            t,
            resolved,
            quant_helpers: Vec::new(),
            use_swap: false,
            use_gcd: false,
            use_pow: false,
            use_mod: false,
        })
    }

    fn emit(mut self) -> Result<String, CgenError> {
        let mut body = String::new();
        for b in &self.program.blocks {
            body.push_str(&self.block(b)?);
        }

        let mut out = String::new();
        out.push_str("// Translated from labeled guarded commands.\n");
        out.push_str("// Declarations are hoisted here; the source text introduces each\n");
        out.push_str("// variable at its first use.\n");
        out.push_str("#include <assert.h>\n\n");
        let t = self.t;
        if self.use_swap {
            out.push_str(&format!(
                "static void swap({t} *a, {t} *b) {{ {t} tmp = *a; *a = *b; *b = tmp; }}\n"
            ));
        }
        if self.use_gcd {
            out.push_str(&format!(
                "static {t} gcd0({t} a, {t} b) {{\n    assert(a > 0 && b > 0);\n    while (a != b) {{ if (a > b) a = a - b; else b = b - a; }}\n    return a;\n}}\n"
            ));
        }
        if self.use_pow {
            out.push_str(&format!(
                "static {t} ipow({t} a, {t} b) {{\n    {t} r = 1;\n    while (b > 0) {{ r = r*a; b = b - 1; }}\n    return r;\n}}\n"
            ));
        }
        if self.use_mod {
            out.push_str(&format!(
                "static {t} imod({t} a, {t} b) {{\n    {t} r = a % b;\n    return r < 0 ? r + (b < 0 ? -b : b) : r;\n}}\n"
            ));
        }
        for h in &self.quant_helpers {
            out.push_str(h);
        }
        if self.use_swap || self.use_gcd || self.use_pow || self.use_mod
            || !self.quant_helpers.is_empty()
        {
            out.push('\n');
        }

        let params: Vec<String> =
            self.opts.params.iter().map(|p| format!("{t} {p}")).collect();
        let params = if params.is_empty() { "void".to_string() } else { params.join(", ") };
        out.push_str(&format!("{t} {}({params}) {{\n", self.opts.name));
        out.push_str(&self.locals());
        out.push_str(&body);
        out.push_str("}\n");
        Ok(out)
    }

    /// Hoisted locals: every declaration that is not a parameter. Without
    /// runtime checks, variables only assertions mention are left out.
    fn locals(&self) -> String {
        let mut used = BTreeSet::new();
        let mut used_arrays = BTreeSet::new();
        for b in &self.program.blocks {
            if self.opts.checked {
                formula_vars(&self.resolved[&b.label], &mut used, &mut used_arrays);
            }
            match &b.body {
                BlockBody::IfFi(arms) => {
                    for gc in arms {
                        formula_vars(&gc.guard, &mut used, &mut used_arrays);
                        crate::ast::command_vars(&gc.body, &mut used, &mut used_arrays);
                        terminal_vars(&gc.terminal, &mut used, &mut used_arrays);
                    }
                }
                BlockBody::Straight(cmd, terminal) => {
                    crate::ast::command_vars(cmd, &mut used, &mut used_arrays);
                    terminal_vars(terminal, &mut used, &mut used_arrays);
                }
                BlockBody::Return(term) => {
                    crate::ast::term_vars(term, &mut used, &mut used_arrays)
                }
                BlockBody::Abort => {}
            }
        }
        let t = self.t;
        let mut out = String::new();
        for d in &self.program.decls {
            if self.opts.params.contains(&d.name) {
                continue;
            }
            match d.kind {
                DeclKind::Scalar => {
                    if !used.contains(&d.name) {
                        continue;
                    }
                    // A ghost `v0` snapshots the parameter `v` on entry.
                    let init = match (d.init, self.ghost_base(&d.name)) {
                        (Some(v), _) => v.to_string(),
                        (None, Some(base)) if self.opts.checked => base.to_string(),
                        (None, _) => "0".to_string(),
                    };
                    out.push_str(&format!("    {t} {} = {init};\n", d.name));
                }
                DeclKind::Array(n) => {
                    if !used_arrays.contains(&d.name) {
                        continue;
                    }
                    let init = d.init.unwrap_or(0);
                    out.push_str(&format!("    {t} {}[{n}] = {{{init}}};\n", d.name));
                }
            }
        }
        out.push('\n');
        out
    }

    fn ghost_base(&self, name: &Ident) -> Option<&Ident> {
        let base = name.as_str().strip_suffix('0')?;
        self.opts.params.iter().find(|p| p.as_str() == base)
    }

    fn block(&mut self, b: &Block) -> Result<String, CgenError> {
        let mut out = format!("{}:  // {}\n", b.label, comment_text(&b.assertion));
        if self.opts.checked {
            let f = self.resolved[&b.label].clone();
            let cond = self.formula(&f, &b.label)?;
            out.push_str(&format!("    assert({cond});\n"));
        }
        match &b.body {
            BlockBody::Abort => out.push_str("    assert(0);\n"),
            BlockBody::Return(term) => {
                out.push_str(&format!("    return {};\n", self.term(term)));
            }
            BlockBody::Straight(cmd, terminal) => {
                for line in self.command_lines(cmd, &b.label)? {
                    out.push_str(&format!("    {line}\n"));
                }
                out.push_str(&format!("    {}\n", self.terminal(terminal)));
            }
            BlockBody::IfFi(arms) => {
                let elide = arms.len() == 1 && arms[0].guard == Formula::TrueF;
                for gc in arms {
                    let mut stmts = self.command_lines(&gc.body, &b.label)?;
                    stmts.push(self.terminal(&gc.terminal));
                    if elide {
                        for line in stmts {
                            out.push_str(&format!("    {line}\n"));
                        }
                    } else {
                        let guard = self.formula(&gc.guard, &b.label)?;
                        out.push_str(&format!("    if ({guard}) {{ {} }}\n", stmts.join(" ")));
                    }
                }
                if !elide {
                    out.push_str("    assert(0);\n");
                }
            }
        }
        Ok(out)
    }

    fn terminal(&mut self, t: &Terminal) -> String {
        match t {
            Terminal::Goto(l) => format!("goto {l};"),
            Terminal::Return(term) => format!("return {};", self.term(term)),
        }
    }

    fn command_lines(&mut self, c: &Command, label: &Ident) -> Result<Vec<String>, CgenError> {
        let mut out = Vec::new();
        self.command_into(c, label, &mut out)?;
        Ok(out)
    }

    fn command_into(
        &mut self,
        c: &Command,
        label: &Ident,
        out: &mut Vec<String>,
    ) -> Result<(), CgenError> {
        match c {
            Command::Seq(cs) => {
                for c in cs {
                    self.command_into(c, label, out)?;
                }
            }
            Command::Hole(_) => return Err(CgenError::HolePresent(label.clone())),
            Command::Swap(a, b) => {
                self.use_swap = true;
                out.push(format!("swap(&{a}, &{b});"));
            }
            Command::Guard(f) => {
                // A failed embedded guard means no transition exists, the
                // same dead end an exhausted if..fi reaches.
                let cond = self.formula(f, label)?;
                out.push(format!("if (!({cond})) {{ assert(0); }}"));
            }
            Command::Annot(f) => {
                if self.opts.checked && !crate::ast::formula_has_opaque(f) {
                    let cond = self.formula(f, label)?;
                    out.push(format!("assert({cond});"));
                } else {
                    out.push(format!("/* {{ {} }} */", comment_text(f)));
                }
            }
            Command::ParAssign(targets, sources) => {
                out.push(self.parassign(targets, sources));
            }
        }
        Ok(())
    }

    /// Parallel assignment. When no target is read by any source or index,
    /// plain assignments suffice; otherwise sources go through temporaries
    /// and array cells are written before scalars so indices still see the
    /// old values.
    fn parassign(&mut self, targets: &[Lhs], sources: &[Term]) -> String {
        // One write never disturbs its own sources: C evaluates the whole
        // right side (and the index) before storing.
        if targets.len() == 1 {
            return format!("{} = {};", self.lhs(&targets[0]), self.term(&sources[0]));
        }
        let mut written = BTreeSet::new();
        for t in targets {
            match t {
                Lhs::Var(v) => {
                    written.insert(v.clone());
                }
                Lhs::ArrayElem(a, _) => {
                    written.insert(a.clone());
                }
            }
        }
        let mut read = BTreeSet::new();
        let mut read_arrays = BTreeSet::new();
        for s in sources {
            crate::ast::term_vars(s, &mut read, &mut read_arrays);
        }
        for t in targets {
            if let Lhs::ArrayElem(_, idx) = t {
                crate::ast::term_vars(idx, &mut read, &mut read_arrays);
            }
        }
        read.extend(read_arrays);
        let interferes = written.iter().any(|w| read.contains(w));

        if !interferes {
            let stmts: Vec<String> = targets
                .iter()
                .zip(sources)
                .map(|(t, s)| format!("{} = {};", self.lhs(t), self.term(s)))
                .collect();
            return stmts.join(" ");
        }
        let t = self.t;
        let mut parts: Vec<String> = sources
            .iter()
            .enumerate()
            .map(|(i, s)| format!("{t} __t{i} = {};", self.term(s)))
            .collect();
        // Array cells first: their index expressions must read pre-state.
        let mut order: Vec<usize> = (0..targets.len()).collect();
        order.sort_by_key(|&i| matches!(targets[i], Lhs::Var(_)));
        for i in order {
            parts.push(format!("{} = __t{i};", self.lhs(&targets[i])));
        }
        format!("{{ {} }}", parts.join(" "))
    }

    fn lhs(&mut self, l: &Lhs) -> String {
        match l {
            Lhs::Var(v) => v.to_string(),
            Lhs::ArrayElem(a, i) => format!("{a}[{}]", self.term(i)),
        }
    }

    // ---- expressions ----

    fn term(&mut self, t: &Term) -> String {
        self.term_prec(t, 0)
    }

    fn term_prec(&mut self, t: &Term, min: u8) -> String {
        let (text, prec) = match t {
            Term::IntLit(v) => {
                if *v < 0 {
                    (format!("({v})"), 3)
                } else {
                    (v.to_string(), 3)
                }
            }
            Term::Var(x) => (x.to_string(), 3),
            Term::ArrayRef(a, i) => (format!("{a}[{}]", self.term(i)), 3),
            Term::BinOp(BinOp::Pow, a, b) => {
                self.use_pow = true;
                (format!("ipow({}, {})", self.term(a), self.term(b)), 3)
            }
            Term::BinOp(BinOp::Mod, a, b) => {
                self.use_mod = true;
                (format!("imod({}, {})", self.term(a), self.term(b)), 3)
            }
            Term::BinOp(op, a, b) => {
                let (sym, prec) = match op {
                    BinOp::Add => (" + ", 1),
                    BinOp::Sub => (" - ", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow | BinOp::Mod => unreachable!(),
                };
                // Left operand at the operator's level, right one tighter:
                // the usual left-associative reading.
                (
                    format!(
                        "{}{sym}{}",
                        self.term_prec(a, prec),
                        self.term_prec(b, prec + 1)
                    ),
                    prec,
                )
            }
            Term::Apply(Func::Gcd, args) => {
                self.use_gcd = true;
                let parts: Vec<String> = args.iter().map(|a| self.term(a)).collect();
                (format!("gcd0({})", parts.join(", ")), 3)
            }
        };
        if prec < min {
            format!("({text})")
        } else {
            text
        }
    }

    fn formula(&mut self, f: &Formula, label: &Ident) -> Result<String, CgenError> {
        self.formula_prec(f, label, 0)
    }

    // C precedence levels here: `||` 1, `&&` 2, comparisons 3, `!` 4,
    // atoms 5. Operands are wrapped whenever they bind looser than the
    // position requires.
    fn formula_prec(
        &mut self,
        f: &Formula,
        label: &Ident,
        min: u8,
    ) -> Result<String, CgenError> {
        let (text, prec) = match f {
            Formula::TrueF => ("1".to_string(), 5),
            Formula::FalseF => ("0".to_string(), 5),
            Formula::Compare(op, a, b) => {
                let sym = match op {
                    CmpOp::Eq => "==",
                    CmpOp::Ne => "!=",
                    CmpOp::Lt => "<",
                    CmpOp::Le => "<=",
                    CmpOp::Gt => ">",
                    CmpOp::Ge => ">=",
                };
                (format!("{} {sym} {}", self.term(a), self.term(b)), 3)
            }
            Formula::Pred(Pred::Even, args) => {
                (format!("{} % 2 == 0", self.term_prec(&args[0], 2)), 3)
            }
            Formula::Pred(Pred::Odd, args) => {
                (format!("{} % 2 != 0", self.term_prec(&args[0], 2)), 3)
            }
            Formula::Pred(Pred::Div, args) => (
                // div(a, b): b divides a.
                format!(
                    "{} % {} == 0",
                    self.term_prec(&args[0], 2),
                    self.term_prec(&args[1], 3)
                ),
                3,
            ),
            Formula::Not(a) => (format!("!{}", self.formula_prec(a, label, 5)?), 4),
            Formula::And(a, b) => (
                format!(
                    "{} && {}",
                    self.formula_prec(a, label, 2)?,
                    self.formula_prec(b, label, 3)?
                ),
                2,
            ),
            Formula::Or(a, b) => (
                format!(
                    "{} || {}",
                    self.formula_prec(a, label, 1)?,
                    self.formula_prec(b, label, 2)?
                ),
                1,
            ),
            Formula::Implies(a, b) => (
                format!(
                    "!{} || {}",
                    self.formula_prec(a, label, 5)?,
                    self.formula_prec(b, label, 2)?
                ),
                1,
            ),
            Formula::BoundedAll(v, lo, hi, body) => {
                (self.quantifier(true, v, lo, hi, body, label)?, 5)
            }
            Formula::BoundedSome(v, lo, hi, body) => {
                (self.quantifier(false, v, lo, hi, body, label)?, 5)
            }
            Formula::LabelRef(l) => {
                let Some(f) = self.resolved.get(l).cloned() else {
                    return Err(CgenError::Unresolvable(label.clone()));
                };
                (self.formula_prec(&f, label, min)?, min)
            }
            Formula::Opaque(_) => return Err(CgenError::OpaqueGuard(label.clone())),
        };
        Ok(if prec < min { format!("({text})") } else { text })
    }

    /// Quantified formulas become helper functions with the free
    /// variables as parameters, called where the formula stood.
    fn quantifier(
        &mut self,
        forall: bool,
        v: &Ident,
        lo: &Term,
        hi: &Term,
        body: &Formula,
        label: &Ident,
    ) -> Result<String, CgenError> {
        let mut scalars = BTreeSet::new();
        let mut arrays = BTreeSet::new();
        crate::ast::term_vars(lo, &mut scalars, &mut arrays);
        crate::ast::term_vars(hi, &mut scalars, &mut arrays);
        formula_vars(body, &mut scalars, &mut arrays);
        scalars.remove(v);

        let body_c = self.formula(body, label)?;
        let lo_c = self.term(lo);
        let hi_c = self.term(hi);
        let t = self.t;
        let name = format!("__q{}", self.quant_helpers.len());
        let mut params: Vec<String> =
            scalars.iter().map(|s| format!("{t} {s}")).collect();
        params.extend(arrays.iter().map(|a| format!("const {t} {a}[]")));
        let (on_miss, after) = if forall { ("return 0;", "1") } else { ("", "0") };
        let hit = if forall {
            format!("if (!({body_c})) {on_miss}")
        } else {
            format!("if ({body_c}) return 1;")
        };
        self.quant_helpers.push(format!(
            "static {t} {name}({}) {{\n    {t} {v};\n    for ({v} = {lo_c}; {v} <= {hi_c}; {v}++) {{\n        {hit}\n    }}\n    return {after};\n}}\n",
            params.join(", ")
        ));
        let mut args: Vec<String> = scalars.iter().map(|s| s.to_string()).collect();
        args.extend(arrays.iter().map(|a| a.to_string()));
        Ok(format!("{name}({})", args.join(", ")))
    }
}

fn terminal_vars(
    t: &Terminal,
    scalars: &mut BTreeSet<Ident>,
    arrays: &mut BTreeSet<Ident>,
) {
    if let Terminal::Return(term) = t {
        crate::ast::term_vars(term, scalars, arrays);
    }
}

/// Assertions and annotations ride along as comments; prose stays as is.
fn comment_text(f: &Formula) -> String {
    match f {
        Formula::Opaque(text) => text.clone(),
        other => formula_to_string(other),
    }
}

/// The (label, goto target) pairs of a program, for checking that the C
/// text preserves the jump structure.
pub fn jump_pairs(program: &Program) -> Vec<(Ident, Ident)> {
    let mut out = Vec::new();
    for b in &program.blocks {
        let mut push = |t: &Terminal| {
            if let Terminal::Goto(l) = t {
                out.push((b.label.clone(), l.clone()));
            }
        };
        match &b.body {
            BlockBody::IfFi(arms) => arms.iter().for_each(|gc| push(&gc.terminal)),
            BlockBody::Straight(_, t) => push(t),
            _ => {}
        }
    }
    out
}
