//! The on-disk form of a verification-condition list.
//!
//! ```text
//! start: S
//! halt: H
//! return: z
//!
//! assertions:
//! S: x = x0 & y = y0
//! A: gcd(x0, y0) = z*gcd(x, y)
//!
//! conditions:
//! {S} z := 1 {A}
//! {A} x = y; z := z*x {H}
//! ```
//!
//! Each condition row is `{PreLabel} guard; statements {PostLabel}`, with
//! the guard or the statements omitted when absent. Assertions may be
//! prose; rows are always formal. Writing is canonical: parsing a written
//! file and writing it again reproduces it byte for byte.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{
    resolve_in_map, BlockBody, Command, Formula, Ident, Program, Term, Terminal,
};
use crate::diag::{Diagnostic, SourceSpan};
use crate::lex::{tokenize_at, TokenKind};
use crate::parse::{resolve_formula_refs, vc_row_middle};
use crate::pretty::{command_to_string, formula_to_string, term_to_string};
use crate::vc::{extract_vcs, VerificationCondition};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcRow {
    pub pre: Ident,
    pub guard: Option<Formula>,
    pub stmts: Vec<Command>,
    pub post: Ident,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VcFile {
    pub start: Ident,
    pub halt: Ident,
    pub return_term: Term,
    /// In file order; label references between assertions stay unresolved.
    pub assertions: Vec<(Ident, Formula)>,
    pub rows: Vec<VcRow>,
}

fn err(line: u32, msg: impl Into<String>) -> Diagnostic {
    Diagnostic::error(SourceSpan::new(line, 1, 1), msg.into())
}

/// Parse the text of a `.vc` file.
pub fn parse_vc_file(source: &str) -> Result<VcFile, Vec<Diagnostic>> {
    enum Section {
        Preamble,
        Assertions,
        Conditions,
    }
    let mut errors: Vec<Diagnostic> = Vec::new();
    let mut warnings: Vec<Diagnostic> = Vec::new();
    let mut section = Section::Preamble;
    let mut start: Option<Ident> = None;
    let mut halt: Option<Ident> = None;
    let mut return_term: Option<Term> = None;
    let mut assertions: Vec<(Ident, Formula)> = Vec::new();
    let mut seen: BTreeSet<Ident> = BTreeSet::new();
    let mut rows: Vec<VcRow> = Vec::new();

    for (i, raw) in source.lines().enumerate() {
        let line_no = i as u32 + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with("//") {
            continue;
        }
        match line {
            "assertions:" => {
                section = Section::Assertions;
                continue;
            }
            "conditions:" => {
                section = Section::Conditions;
                continue;
            }
            _ => {}
        }
        match section {
            Section::Preamble => {
                let Some((key, rest)) = line.split_once(':') else {
                    errors.push(err(line_no, "expected `key: value` before the sections"));
                    continue;
                };
                let rest = rest.trim();
                match key.trim() {
                    "start" => match Ident::new(rest) {
                        Ok(l) => start = Some(l),
                        Err(e) => errors.push(err(line_no, e.to_string())),
                    },
                    "halt" => match Ident::new(rest) {
                        Ok(l) => halt = Some(l),
                        Err(e) => errors.push(err(line_no, e.to_string())),
                    },
                    "return" => match crate::parse::parse_term(rest) {
                        Ok(t) => return_term = Some(t),
                        Err(d) => errors.push(err(line_no, d.message)),
                    },
                    other => {
                        errors.push(err(line_no, format!("unknown directive `{other}`")))
                    }
                }
            }
            Section::Assertions => {
                let Some((label, rest)) = line.split_once(':') else {
                    errors.push(err(line_no, "expected `Label: formula-or-prose`"));
                    continue;
                };
                let label = match Ident::new(label.trim()) {
                    Ok(l) => l,
                    Err(e) => {
                        errors.push(err(line_no, e.to_string()));
                        continue;
                    }
                };
                if !seen.insert(label.clone()) {
                    errors.push(err(line_no, format!("`{label}` already has an assertion")));
                    continue;
                }
                let rest = rest.trim();
                let formula = match crate::parse::parse_formula(rest) {
                    Ok(f) => f,
                    Err(_) => {
                        warnings.push(Diagnostic::warning(
                            SourceSpan::new(line_no, 1, 1),
                            format!("assertion of `{label}` kept as prose"),
                        ));
                        Formula::Opaque(rest.to_string())
                    }
                };
                assertions.push((label, formula));
            }
            Section::Conditions => match parse_row(line, line_no, &mut warnings) {
                Ok(row) => rows.push(row),
                Err(d) => errors.push(d),
            },
        }
    }

    let Some(start) = start else {
        errors.push(err(1, "missing `start:` directive"));
        return Err(errors);
    };
    let Some(halt) = halt else {
        errors.push(err(1, "missing `halt:` directive"));
        return Err(errors);
    };
    let Some(return_term) = return_term else {
        errors.push(err(1, "missing `return:` directive"));
        return Err(errors);
    };
    if !errors.is_empty() {
        return Err(errors);
    }
    Ok(VcFile { start, halt, return_term, assertions, rows })
}

fn parse_row(
    line: &str,
    line_no: u32,
    warnings: &mut Vec<Diagnostic>,
) -> Result<VcRow, Diagnostic> {
    let tokens = tokenize_at(line, line_no, 1)
        .map_err(|d| err(line_no, d.message))?;
    let label_of = |kind: &TokenKind| -> Option<Result<Ident, Diagnostic>> {
        match kind {
            TokenKind::Annotation(text) => Some(
                Ident::new(text.trim())
                    .map_err(|_| err(line_no, format!("`{{{text}}}` is not a label"))),
            ),
            _ => None,
        }
    };
    let Some(pre) = tokens.first().and_then(|t| label_of(&t.kind)) else {
        return Err(err(line_no, "a condition row starts with `{PreLabel}`"));
    };
    let pre = pre?;
    let Some(post) = tokens.last().and_then(|t| label_of(&t.kind)) else {
        return Err(err(line_no, "a condition row ends with `{PostLabel}`"));
    };
    let post = post?;
    if tokens.len() < 2 {
        return Err(err(line_no, "a condition row needs both labels"));
    }
    let middle = tokens[1..tokens.len() - 1].to_vec();
    let (guard, stmts) = if middle.is_empty() {
        (None, Vec::new())
    } else {
        vc_row_middle(middle, warnings).map_err(|d| err(line_no, d.message))?
    };
    // `true` as the whole middle means no guard and no statements.
    let guard = match guard {
        Some(Formula::TrueF) if stmts.is_empty() => None,
        other => other,
    };
    Ok(VcRow { pre, guard, stmts, post })
}

fn row_to_string(row: &VcRow) -> String {
    let mut middle = String::new();
    if let Some(g) = &row.guard {
        middle.push_str(&formula_to_string(g));
        if !row.stmts.is_empty() {
            middle.push_str("; ");
        }
    }
    let stmts: Vec<String> = row.stmts.iter().map(command_to_string).collect();
    middle.push_str(&stmts.join("; "));
    if middle.is_empty() {
        middle.push_str("true");
    }
    format!("{{{}}} {middle} {{{}}}", row.pre, row.post)
}

/// Render a file in the canonical form `parse_vc_file` reads back.
pub fn write_vc_file(file: &VcFile) -> String {
    let mut out = String::new();
    out.push_str(&format!("start: {}\n", file.start));
    out.push_str(&format!("halt: {}\n", file.halt));
    out.push_str(&format!("return: {}\n", term_to_string(&file.return_term)));
    out.push_str("\nassertions:\n");
    for (label, f) in &file.assertions {
        out.push_str(&format!("{label}: {}\n", formula_to_string(f)));
    }
    out.push_str("\nconditions:\n");
    for row in &file.rows {
        out.push_str(&row_to_string(row));
        out.push('\n');
    }
    out
}

impl VcFile {
    pub fn assertion_map(&self) -> BTreeMap<Ident, Formula> {
        self.assertions.iter().cloned().collect()
    }

    /// Resolve the rows into checkable conditions: pre and post become the
    /// named assertions with label references expanded.
    pub fn to_vcs(&self) -> Result<Vec<VerificationCondition>, Diagnostic> {
        let map = self.assertion_map();
        let resolve = |label: &Ident| -> Result<Formula, Diagnostic> {
            resolve_in_map(&map, label).map_err(|e| {
                Diagnostic::error(label.span, format!("cannot resolve `{label}`: {e}"))
            })
        };
        let mut out = Vec::new();
        for row in &self.rows {
            let pre = resolve(&row.pre)?;
            let post = resolve(&row.post)?;
            let mut cmds = Vec::new();
            if let Some(g) = &row.guard {
                let g = resolve_formula_refs(g, &map).map_err(|e| {
                    Diagnostic::error(row.pre.span, format!("in a guard: {e}"))
                })?;
                cmds.push(Command::Guard(g));
            }
            for c in &row.stmts {
                cmds.push(resolve_command_refs(c, &map)?);
            }
            let command = if cmds.len() == 1 {
                cmds.pop().expect("len checked")
            } else {
                Command::Seq(cmds)
            };
            out.push(VerificationCondition {
                pre_label: row.pre.clone(),
                pre,
                command,
                post_label: row.post.clone(),
                post,
            });
        }
        Ok(out)
    }

    /// Serialize a program's conditions. The halt block must return.
    pub fn from_program(program: &Program) -> Result<VcFile, Diagnostic> {
        let return_term = match program.block(&program.halt).map(|b| &b.body) {
            Some(BlockBody::Return(t)) => t.clone(),
            Some(BlockBody::Straight(_, Terminal::Return(t))) => t.clone(),
            _ => {
                return Err(Diagnostic::error(
                    program.halt.span,
                    format!("halt block `{}` does not return a term", program.halt),
                ))
            }
        };
        let vcs = extract_vcs(program).map_err(|e| {
            Diagnostic::error(SourceSpan::synthetic(), format!("unresolvable assertion: {e}"))
        })?;
        let rows = vcs
            .iter()
            .map(|vc| {
                let (guard, stmts) = vc.parts();
                VcRow {
                    pre: vc.pre_label.clone(),
                    guard,
                    stmts,
                    post: vc.post_label.clone(),
                }
            })
            .collect();
        Ok(VcFile {
            start: program.start.clone(),
            halt: program.halt.clone(),
            return_term,
            assertions: program
                .blocks
                .iter()
                .map(|b| (b.label.clone(), b.assertion.clone()))
                .collect(),
            rows,
        })
    }
}

fn resolve_command_refs(
    c: &Command,
    map: &BTreeMap<Ident, Formula>,
) -> Result<Command, Diagnostic> {
    let on_formula = |f: &Formula| -> Result<Formula, Diagnostic> {
        resolve_formula_refs(f, map).map_err(|e| {
            Diagnostic::error(SourceSpan::synthetic(), format!("in a statement: {e}"))
        })
    };
    Ok(match c {
        Command::Guard(f) => Command::Guard(on_formula(f)?),
        Command::Annot(f) => Command::Annot(on_formula(f)?),
        Command::Seq(cs) => Command::Seq(
            cs.iter().map(|c| resolve_command_refs(c, map)).collect::<Result<_, _>>()?,
        ),
        other => other.clone(),
    })
}
