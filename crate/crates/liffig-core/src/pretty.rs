//! Canonical text rendering for programs, formulas and terms.
//!
//! Printing then reparsing yields a structurally equal program, so the
//! printer doubles as the serializer for synthesized programs.

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{
    BinOp, Block, BlockBody, CmpOp, Command, DeclKind, Formula, Lhs, Program, Term, Terminal,
};

fn term_prec(t: &Term) -> u8 {
    match t {
        Term::BinOp(BinOp::Add | BinOp::Sub, _, _) => 1,
        Term::BinOp(BinOp::Mul | BinOp::Div, _, _) => 2,
        // A negative literal reads back as unary minus, which binds looser
        // than `^`, so it needs parens as a power base: `(-1)^0`.
        Term::BinOp(BinOp::Pow, _, _) | Term::IntLit(..=-1) => 3,
        _ => 4,
    }
}

fn term_prec_of(op: BinOp) -> u8 {
    match op {
        BinOp::Add | BinOp::Sub => 1,
        BinOp::Mul | BinOp::Div => 2,
        BinOp::Pow => 3,
        BinOp::Mod => 4,
    }
}

pub fn term_to_string(t: &Term) -> String {
    match t {
        Term::IntLit(v) => v.to_string(),
        Term::Var(x) => x.to_string(),
        Term::ArrayRef(a, i) => format!("{a}[{}]", term_to_string(i)),
        Term::BinOp(BinOp::Mod, a, b) => {
            format!("mod({}, {})", term_to_string(a), term_to_string(b))
        }
        Term::BinOp(op, a, b) => {
            let prec = term_prec_of(*op);
            // `-` and `/` are left-associative, `^` binds to the right.
            let (left_min, right_min) = match op {
                BinOp::Pow => (prec + 1, prec),
                _ => (prec, prec + 1),
            };
            let left = wrap_term(a, left_min);
            let right = wrap_term(b, right_min);
            match op {
                BinOp::Add => format!("{left} + {right}"),
                BinOp::Sub => format!("{left} - {right}"),
                BinOp::Mul => format!("{left}*{right}"),
                BinOp::Div => format!("{left}/{right}"),
                BinOp::Pow => format!("{left}^{right}"),
                BinOp::Mod => unreachable!(),
            }
        }
        Term::Apply(f, args) => {
            let parts: Vec<String> = args.iter().map(term_to_string).collect();
            format!("{}({})", f.name(), parts.join(", "))
        }
    }
}

fn wrap_term(t: &Term, min: u8) -> String {
    let s = term_to_string(t);
    if term_prec(t) < min {
        format!("({s})")
    } else {
        s
    }
}

fn formula_prec(f: &Formula) -> u8 {
    match f {
        // Quantifier bodies extend to the right without limit, so treat
        // them like the loosest operator when deciding on parentheses.
        Formula::BoundedAll(..) | Formula::BoundedSome(..) => 1,
        Formula::Implies(_, _) => 1,
        Formula::Or(_, _) => 2,
        Formula::And(_, _) => 3,
        Formula::Not(_) => 4,
        _ => 5,
    }
}

pub fn formula_to_string(f: &Formula) -> String {
    match f {
        Formula::TrueF => "true".to_string(),
        Formula::FalseF => "false".to_string(),
        Formula::Compare(op, a, b) => {
            let op = match op {
                CmpOp::Eq => "=",
                CmpOp::Ne => "!=",
                CmpOp::Lt => "<",
                CmpOp::Le => "<=",
                CmpOp::Gt => ">",
                CmpOp::Ge => ">=",
            };
            format!("{} {op} {}", term_to_string(a), term_to_string(b))
        }
        Formula::Pred(p, args) => {
            let parts: Vec<String> = args.iter().map(term_to_string).collect();
            format!("{}({})", p.name(), parts.join(", "))
        }
        Formula::Not(a) => format!("!{}", wrap_formula(a, 4)),
        Formula::And(a, b) => {
            format!("{} & {}", wrap_formula(a, 3), wrap_formula(b, 4))
        }
        Formula::Or(a, b) => {
            format!("{} or {}", wrap_formula(a, 2), wrap_formula(b, 3))
        }
        Formula::Implies(a, b) => {
            format!("{} => {}", wrap_formula(a, 2), wrap_formula(b, 1))
        }
        Formula::BoundedAll(v, lo, hi, body) => format!(
            "all {v} in {}..{} : {}",
            term_to_string(lo),
            term_to_string(hi),
            formula_to_string(body)
        ),
        Formula::BoundedSome(v, lo, hi, body) => format!(
            "some {v} in {}..{} : {}",
            term_to_string(lo),
            term_to_string(hi),
            formula_to_string(body)
        ),
        Formula::LabelRef(l) => l.to_string(),
        Formula::Opaque(text) => text.clone(),
    }
}

fn wrap_formula(f: &Formula, min: u8) -> String {
    let s = formula_to_string(f);
    if formula_prec(f) < min {
        format!("({s})")
    } else {
        s
    }
}

fn lhs_to_string(l: &Lhs) -> String {
    match l {
        Lhs::Var(x) => x.to_string(),
        Lhs::ArrayElem(a, i) => format!("{a}[{}]", term_to_string(i)),
    }
}

pub fn command_to_string(c: &Command) -> String {
    match c {
        Command::ParAssign(ts, ss) => {
            let ts: Vec<String> = ts.iter().map(lhs_to_string).collect();
            let ss: Vec<String> = ss.iter().map(term_to_string).collect();
            format!("{} := {}", ts.join(", "), ss.join(", "))
        }
        Command::Swap(a, b) => format!("swap({a}, {b})"),
        Command::Guard(f) => format!("[{}]", formula_to_string(f)),
        Command::Annot(f) => format!("{{ {} }}", formula_to_string(f)),
        Command::Hole(text) => format!("\"{text}\""),
        Command::Seq(cs) => {
            let parts: Vec<String> = cs.iter().map(command_to_string).collect();
            parts.join("; ")
        }
    }
}

fn terminal_to_string(t: &Terminal) -> String {
    match t {
        Terminal::Goto(l) => format!("goto {l}"),
        Terminal::Return(term) => format!("return {}", term_to_string(term)),
    }
}

/// Statements and terminal of one arm, `;`-joined.
fn arm_tail(cmd: &Command, terminal: &Terminal) -> String {
    let body = command_to_string(cmd);
    if body.is_empty() {
        terminal_to_string(terminal)
    } else {
        format!("{body}; {}", terminal_to_string(terminal))
    }
}

pub fn block_to_string(b: &Block) -> String {
    let mut out = format!("{}: {}\n", b.label, formula_to_string(&b.assertion));
    match &b.body {
        BlockBody::IfFi(arms) => {
            for (i, gc) in arms.iter().enumerate() {
                let head = if i == 0 { "  if" } else { "   |" };
                out.push_str(&format!(
                    "{head} {} -> {}\n",
                    formula_to_string(&gc.guard),
                    arm_tail(&gc.body, &gc.terminal)
                ));
            }
            out.push_str("  fi\n");
        }
        BlockBody::Straight(cmd, terminal) => {
            out.push_str(&format!("  {}\n", arm_tail(cmd, terminal)));
        }
        BlockBody::Return(t) => {
            out.push_str(&format!("  return {}\n", term_to_string(t)));
        }
        BlockBody::Abort => out.push_str("  abort\n"),
    }
    out
}

pub fn program_to_string(p: &Program) -> String {
    let mut out = String::new();
    for d in &p.decls {
        match (d.kind, d.init) {
            (DeclKind::Scalar, None) => out.push_str(&format!("int {};\n", d.name)),
            (DeclKind::Scalar, Some(v)) => {
                out.push_str(&format!("int {} := {v};\n", d.name))
            }
            (DeclKind::Array(n), None) => out.push_str(&format!("int {}[{n}];\n", d.name)),
            (DeclKind::Array(n), Some(v)) => {
                out.push_str(&format!("int {}[{n}] := {v};\n", d.name))
            }
        }
    }
    for b in &p.blocks {
        out.push('\n');
        out.push_str(&block_to_string(b));
    }
    out
}
