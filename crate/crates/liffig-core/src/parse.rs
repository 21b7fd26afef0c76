//! Parser for `.lif` source text, plus standalone term and formula parsers.
//!
//! A file is a list of `int` declarations followed by labeled blocks:
//!
//! ```text
//! int x; int y; int z; int x0; int y0;
//! S: x=x0 & y=y0
//!   if true -> z := 1; goto A
//!   fi
//! ...
//! H: gcd(x0,y0) = z
//!   return z
//! ```
//!
//! Everything between a label's `:` and the first body line is the block's
//! assertion. It is read as a formula when possible; otherwise it is kept
//! as opaque prose and a warning is issued. Bodies are always formal.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::ast::{
    formula_has_labelref, resolve_in_map, BinOp, Block, BlockBody, CmpOp, Command, Decl,
    DeclKind, Formula, Func, GuardedCommand, Ident, Lhs, Pred, Program, ResolveError, Term,
    Terminal,
};
use crate::diag::{Diagnostic, SourceSpan};
use crate::lex::{tokenize_at, Token, TokenKind};

/// A successfully parsed program together with its warnings (implicit
/// declarations, assertions kept as prose, and the like).
#[derive(Clone, Debug)]
pub struct Parsed {
    pub program: Program,
    pub warnings: Vec<Diagnostic>,
}

/// Parse a complete program. On failure every collected diagnostic is
/// returned; at least one of them is an error.
pub fn parse_program(source: &str) -> Result<Parsed, Vec<Diagnostic>> {
    ProgramParser::new(source).parse()
}

/// Parse a formula, requiring the whole input to be consumed.
pub fn parse_formula(source: &str) -> Result<Formula, Diagnostic> {
    let tokens = tokenize_at(source, 1, 1)?;
    let mut p = TokenParser::new(tokens);
    let f = p.formula()?;
    p.expect_end()?;
    Ok(f)
}

/// Parse a term, requiring the whole input to be consumed.
pub fn parse_term(source: &str) -> Result<Term, Diagnostic> {
    let tokens = tokenize_at(source, 1, 1)?;
    let mut p = TokenParser::new(tokens);
    let t = p.term()?;
    p.expect_end()?;
    Ok(t)
}

/// Parse the middle of a verification-condition row: either a guard
/// formula, optionally followed by `;` and statements, or statements only.
pub(crate) fn vc_row_middle(
    tokens: Vec<Token>,
    warnings: &mut Vec<Diagnostic>,
) -> Result<(Option<Formula>, Vec<Command>), Diagnostic> {
    let mut p = TokenParser::new(tokens.clone());
    if let Ok(f) = p.formula() {
        match p.peek() {
            None => return Ok((Some(f), Vec::new())),
            Some(TokenKind::Semi) => {
                p.bump();
                let stmts = p.stmts_until_end(warnings)?;
                return Ok((Some(f), stmts));
            }
            _ => {}
        }
    }
    let mut p = TokenParser::new(tokens);
    let stmts = p.stmts_until_end(warnings)?;
    Ok((None, stmts))
}

/// Parse a `;`-separated statement list with no trailing `goto`/`return`.
/// One statement comes back bare; any other count becomes a `Seq`.
pub fn parse_command_text(source: &str) -> Result<Command, Diagnostic> {
    let tokens = tokenize_at(source, 1, 1)?;
    let mut p = TokenParser::new(tokens);
    let mut warnings = Vec::new();
    let mut cmds = p.stmts_until_end(&mut warnings)?;
    if cmds.len() == 1 {
        Ok(cmds.pop().expect("len checked"))
    } else {
        Ok(Command::Seq(cmds))
    }
}

// ---------------------------------------------------------------------------
// Token-level parsing (terms, formulas, statements, bodies).
// ---------------------------------------------------------------------------

pub(crate) struct TokenParser {
    tokens: Vec<Token>,
    pos: usize,
}

impl TokenParser {
    pub(crate) fn new(tokens: Vec<Token>) -> Self {
        TokenParser { tokens, pos: 0 }
    }

    fn peek(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos).map(|t| &t.kind)
    }

    fn peek2(&self) -> Option<&TokenKind> {
        self.tokens.get(self.pos + 1).map(|t| &t.kind)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn here(&self) -> SourceSpan {
        self.tokens
            .get(self.pos)
            .or_else(|| self.tokens.last())
            .map(|t| t.span)
            .unwrap_or_else(SourceSpan::synthetic)
    }

    fn at_end(&self) -> bool {
        self.pos >= self.tokens.len()
    }

    fn error(&self, msg: impl Into<String>) -> Diagnostic {
        Diagnostic::error(self.here(), msg)
    }

    fn expect_end(&self) -> Result<(), Diagnostic> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("unexpected trailing input"))
        }
    }

    fn eat(&mut self, kind: &TokenKind) -> bool {
        if self.peek() == Some(kind) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, kind: TokenKind, what: &str) -> Result<Token, Diagnostic> {
        if self.peek() == Some(&kind) {
            Ok(self.bump().unwrap())
        } else {
            Err(self.error(format!("expected {what}")))
        }
    }

    fn ident(&mut self, what: &str) -> Result<Ident, Diagnostic> {
        match self.peek() {
            Some(TokenKind::Ident(_)) => {
                let tok = self.bump().unwrap();
                let TokenKind::Ident(name) = tok.kind else { unreachable!() };
                Ident::with_span(&name, tok.span)
                    .map_err(|e| Diagnostic::error(tok.span, e.to_string()))
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    // ---- terms ----

    pub(crate) fn term(&mut self) -> Result<Term, Diagnostic> {
        let mut lhs = self.term_muldiv()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Plus) => BinOp::Add,
                Some(TokenKind::Minus) => BinOp::Sub,
                _ => break,
            };
            self.bump();
            let rhs = self.term_muldiv()?;
            lhs = Term::BinOp(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term_muldiv(&mut self) -> Result<Term, Diagnostic> {
        let mut lhs = self.term_unary()?;
        loop {
            let op = match self.peek() {
                Some(TokenKind::Star) => BinOp::Mul,
                Some(TokenKind::Slash) => BinOp::Div,
                _ => break,
            };
            self.bump();
            let rhs = self.term_unary()?;
            lhs = Term::BinOp(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term_unary(&mut self) -> Result<Term, Diagnostic> {
        if self.eat(&TokenKind::Minus) {
            let inner = self.term_unary()?;
            return Ok(match inner {
                Term::IntLit(v) => Term::IntLit(-v),
                other => Term::BinOp(BinOp::Sub, Box::new(Term::IntLit(0)), Box::new(other)),
            });
        }
        self.term_power()
    }

    fn term_power(&mut self) -> Result<Term, Diagnostic> {
        let base = self.term_atom()?;
        if self.eat(&TokenKind::Caret) {
            let exp = self.term_unary()?;
            return Ok(Term::BinOp(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn term_atom(&mut self) -> Result<Term, Diagnostic> {
        match self.peek() {
            Some(TokenKind::Int(v)) => {
                let v = *v;
                self.bump();
                Ok(Term::IntLit(v))
            }
            Some(TokenKind::LParen) => {
                self.bump();
                let t = self.term()?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(t)
            }
            Some(TokenKind::Ident(name)) => {
                let name = name.clone();
                match self.peek2() {
                    Some(TokenKind::LParen) => self.term_call(&name),
                    Some(TokenKind::LBracket) => {
                        let arr = self.ident("array name")?;
                        self.bump(); // '['
                        let idx = self.term()?;
                        self.expect(TokenKind::RBracket, "`]`")?;
                        Ok(Term::ArrayRef(arr, Box::new(idx)))
                    }
                    _ => Ok(Term::Var(self.ident("variable")?)),
                }
            }
            _ => Err(self.error("expected a term")),
        }
    }

    fn term_call(&mut self, name: &str) -> Result<Term, Diagnostic> {
        let span = self.here();
        self.bump(); // ident
        self.bump(); // '('
        let mut args = Vec::new();
        if self.peek() != Some(&TokenKind::RParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        match name {
            "gcd" => {
                if args.len() != Func::Gcd.arity() {
                    return Err(Diagnostic::error(span, "gcd takes exactly 2 arguments"));
                }
                Ok(Term::Apply(Func::Gcd, args))
            }
            "mod" => {
                if args.len() != 2 {
                    return Err(Diagnostic::error(span, "mod takes exactly 2 arguments"));
                }
                let mut it = args.into_iter();
                let a = it.next().unwrap();
                let b = it.next().unwrap();
                Ok(Term::BinOp(BinOp::Mod, Box::new(a), Box::new(b)))
            }
            "even" | "odd" | "div" => Err(Diagnostic::error(
                span,
                format!("`{name}` is a predicate and cannot be used as a value"),
            )),
            other => Err(Diagnostic::error(span, format!("unknown function `{other}`"))),
        }
    }

    // ---- formulas ----

    pub(crate) fn formula(&mut self) -> Result<Formula, Diagnostic> {
        let lhs = self.formula_or()?;
        if self.eat(&TokenKind::Implies) {
            let rhs = self.formula()?; // right-associative
            return Ok(Formula::Implies(Box::new(lhs), Box::new(rhs)));
        }
        Ok(lhs)
    }

    fn formula_or(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.formula_and()?;
        while self.eat(&TokenKind::Or) {
            let rhs = self.formula_and()?;
            lhs = Formula::Or(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_and(&mut self) -> Result<Formula, Diagnostic> {
        let mut lhs = self.formula_not()?;
        while self.eat(&TokenKind::Amp) {
            let rhs = self.formula_not()?;
            lhs = Formula::And(Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn formula_not(&mut self) -> Result<Formula, Diagnostic> {
        if self.eat(&TokenKind::Bang) {
            let inner = self.formula_not()?;
            return Ok(Formula::Not(Box::new(inner)));
        }
        self.formula_atom()
    }

    fn formula_atom(&mut self) -> Result<Formula, Diagnostic> {
        match self.peek() {
            Some(TokenKind::True) => {
                self.bump();
                Ok(Formula::TrueF)
            }
            Some(TokenKind::False) => {
                self.bump();
                Ok(Formula::FalseF)
            }
            Some(TokenKind::All) | Some(TokenKind::Some) => self.quantifier(),
            Some(TokenKind::Ident(name))
                if matches!(name.as_str(), "even" | "odd" | "div")
                    && self.peek2() == Some(&TokenKind::LParen) =>
            {
                self.predicate()
            }
            _ => self.comparison_or_ref(),
        }
    }

    fn quantifier(&mut self) -> Result<Formula, Diagnostic> {
        let all = matches!(self.peek(), Some(TokenKind::All));
        self.bump();
        let var = self.ident("a bound variable")?;
        self.expect(TokenKind::In, "`in`")?;
        let lo = self.term()?;
        self.expect(TokenKind::DotDot, "`..`")?;
        let hi = self.term()?;
        self.expect(TokenKind::Colon, "`:`")?;
        let body = self.formula()?; // extends as far right as possible
        Ok(if all {
            Formula::BoundedAll(var, Box::new(lo), Box::new(hi), Box::new(body))
        } else {
            Formula::BoundedSome(var, Box::new(lo), Box::new(hi), Box::new(body))
        })
    }

    fn predicate(&mut self) -> Result<Formula, Diagnostic> {
        let span = self.here();
        let Some(TokenKind::Ident(name)) = self.peek() else { unreachable!() };
        let pred = match name.as_str() {
            "even" => Pred::Even,
            "odd" => Pred::Odd,
            "div" => Pred::Div,
            _ => unreachable!(),
        };
        self.bump(); // name
        self.bump(); // '('
        let mut args = Vec::new();
        if self.peek() != Some(&TokenKind::RParen) {
            loop {
                args.push(self.term()?);
                if !self.eat(&TokenKind::Comma) {
                    break;
                }
            }
        }
        self.expect(TokenKind::RParen, "`)`")?;
        if args.len() != pred.arity() {
            return Err(Diagnostic::error(
                span,
                format!("{} takes exactly {} argument(s)", pred.name(), pred.arity()),
            ));
        }
        Ok(Formula::Pred(pred, args))
    }

    fn comparison_or_ref(&mut self) -> Result<Formula, Diagnostic> {
        let saved = self.pos;
        match self.term() {
            Ok(lhs) => {
                if let Some(op) = self.peek_cmp() {
                    self.bump();
                    let rhs = self.term()?;
                    if self.peek_cmp().is_some() {
                        return Err(self.error("comparison chains are not allowed"));
                    }
                    return Ok(Formula::Compare(op, lhs, rhs));
                }
                match lhs {
                    Term::Var(v) => Ok(Formula::LabelRef(v)),
                    _ => Err(self.error("expected a comparison operator")),
                }
            }
            Err(term_err) => {
                self.pos = saved;
                if self.eat(&TokenKind::LParen) {
                    let f = self.formula()?;
                    self.expect(TokenKind::RParen, "`)`")?;
                    return Ok(f);
                }
                Err(term_err)
            }
        }
    }

    fn peek_cmp(&self) -> Option<CmpOp> {
        Some(match self.peek()? {
            TokenKind::Eq => CmpOp::Eq,
            TokenKind::Ne => CmpOp::Ne,
            TokenKind::Lt => CmpOp::Lt,
            TokenKind::Le => CmpOp::Le,
            TokenKind::Gt => CmpOp::Gt,
            TokenKind::Ge => CmpOp::Ge,
            _ => return None,
        })
    }

    // ---- statements and block bodies ----

    /// `stmt*` followed by `goto L` or `return t`. When the statement list
    /// ends in a hole the terminal may be omitted (the hole never falls
    /// through); a jump back to the own label is supplied.
    pub(crate) fn stmtlist_terminal(
        &mut self,
        self_label: &Ident,
        warnings: &mut Vec<Diagnostic>,
    ) -> Result<(Vec<Command>, Terminal), Diagnostic> {
        let mut cmds = Vec::new();
        loop {
            match self.peek() {
                Some(TokenKind::Goto) => {
                    self.bump();
                    let target = self.ident("a label after `goto`")?;
                    return Ok((cmds, Terminal::Goto(target)));
                }
                Some(TokenKind::Return) => {
                    self.bump();
                    let t = self.term()?;
                    return Ok((cmds, Terminal::Return(t)));
                }
                Some(TokenKind::Pipe) | Some(TokenKind::Fi) | None => {
                    if matches!(cmds.last(), Some(Command::Hole(_))) {
                        return Ok((cmds, Terminal::Goto(self_label.clone())));
                    }
                    return Err(self.error("expected `goto` or `return` to end the arm"));
                }
                _ => {
                    let cmd = self.stmt(warnings)?;
                    let semi_optional =
                        matches!(cmd, Command::Annot(_) | Command::Hole(_));
                    cmds.push(cmd);
                    if !self.eat(&TokenKind::Semi) && !semi_optional {
                        match self.peek() {
                            Some(TokenKind::Goto) | Some(TokenKind::Return) => {
                                return Err(self.error("expected `;` before the terminal"))
                            }
                            _ => return Err(self.error("expected `;` after the statement")),
                        }
                    }
                }
            }
        }
    }

    /// `stmt (";" stmt)*` to the end of the input, with no terminal:
    /// the form verification condition rows use.
    pub(crate) fn stmts_until_end(
        &mut self,
        warnings: &mut Vec<Diagnostic>,
    ) -> Result<Vec<Command>, Diagnostic> {
        let mut cmds = Vec::new();
        while self.peek().is_some() {
            let cmd = self.stmt(warnings)?;
            let semi_optional = matches!(cmd, Command::Annot(_) | Command::Hole(_));
            cmds.push(cmd);
            if !self.eat(&TokenKind::Semi) && !semi_optional && self.peek().is_some() {
                return Err(self.error("expected `;` after the statement"));
            }
        }
        Ok(cmds)
    }

    fn stmt(&mut self, warnings: &mut Vec<Diagnostic>) -> Result<Command, Diagnostic> {
        match self.peek() {
            Some(TokenKind::Annotation(_)) => {
                let tok = self.bump().unwrap();
                let TokenKind::Annotation(text) = tok.kind else { unreachable!() };
                let formula = annotation_formula(&text, tok.span, warnings);
                Ok(Command::Annot(formula))
            }
            Some(TokenKind::HoleStr(_)) => {
                let tok = self.bump().unwrap();
                let TokenKind::HoleStr(text) = tok.kind else { unreachable!() };
                Ok(Command::Hole(text))
            }
            Some(TokenKind::Swap) => {
                self.bump();
                self.expect(TokenKind::LParen, "`(`")?;
                let a = self.ident("a variable")?;
                self.expect(TokenKind::Comma, "`,`")?;
                let b = self.ident("a variable")?;
                self.expect(TokenKind::RParen, "`)`")?;
                Ok(Command::Swap(a, b))
            }
            _ => self.assignment(),
        }
    }

    fn assignment(&mut self) -> Result<Command, Diagnostic> {
        let span = self.here();
        let mut targets = Vec::new();
        loop {
            targets.push(self.lhs()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        if self.eat(&TokenKind::PlusAssign) {
            if targets.len() != 1 {
                return Err(Diagnostic::error(span, "`+=` takes a single target"));
            }
            let step = self.term()?;
            let target = targets.pop().unwrap();
            let current = match &target {
                Lhs::Var(v) => Term::Var(v.clone()),
                Lhs::ArrayElem(a, i) => Term::ArrayRef(a.clone(), Box::new(i.clone())),
            };
            let sum = Term::BinOp(BinOp::Add, Box::new(current), Box::new(step));
            return Ok(Command::ParAssign(alloc::vec![target], alloc::vec![sum]));
        }
        self.expect(TokenKind::Assign, "`:=`")?;
        let mut sources = Vec::new();
        loop {
            sources.push(self.term()?);
            if !self.eat(&TokenKind::Comma) {
                break;
            }
        }
        if targets.len() != sources.len() {
            return Err(Diagnostic::error(
                span,
                format!(
                    "assignment has {} target(s) but {} source(s)",
                    targets.len(),
                    sources.len()
                ),
            ));
        }
        check_distinct_static_targets(&targets, span)?;
        Ok(Command::ParAssign(targets, sources))
    }

    fn lhs(&mut self) -> Result<Lhs, Diagnostic> {
        let name = self.ident("an assignment target")?;
        if self.eat(&TokenKind::LBracket) {
            let idx = self.term()?;
            self.expect(TokenKind::RBracket, "`]`")?;
            return Ok(Lhs::ArrayElem(name, idx));
        }
        Ok(Lhs::Var(name))
    }

    /// Parse a whole block body: `if .. fi`, `abort`, or statements with a
    /// terminal.
    fn body(
        &mut self,
        self_label: &Ident,
        warnings: &mut Vec<Diagnostic>,
    ) -> Result<BlockBody, Diagnostic> {
        match self.peek() {
            Some(TokenKind::If) => {
                self.bump();
                let mut arms = Vec::new();
                loop {
                    arms.push(self.guarded_command(self_label, warnings)?);
                    if self.eat(&TokenKind::Pipe) {
                        continue;
                    }
                    self.expect(TokenKind::Fi, "`|` or `fi`")?;
                    break;
                }
                self.expect_end()?;
                Ok(BlockBody::IfFi(arms))
            }
            Some(TokenKind::Abort) => {
                self.bump();
                self.expect_end()?;
                Ok(BlockBody::Abort)
            }
            _ => {
                let (cmds, terminal) = self.stmtlist_terminal(self_label, warnings)?;
                self.expect_end()?;
                Ok(match (cmds.is_empty(), terminal) {
                    (true, Terminal::Return(t)) => BlockBody::Return(t),
                    (_, terminal) => BlockBody::Straight(seq_of(cmds), terminal),
                })
            }
        }
    }

    fn guarded_command(
        &mut self,
        self_label: &Ident,
        warnings: &mut Vec<Diagnostic>,
    ) -> Result<GuardedCommand, Diagnostic> {
        let guard = self.formula()?;
        // The corpus style allows an annotation between guard and arrow.
        let mut leading = Vec::new();
        if let Some(TokenKind::Annotation(_)) = self.peek() {
            let tok = self.bump().unwrap();
            let TokenKind::Annotation(text) = tok.kind else { unreachable!() };
            leading.push(Command::Annot(annotation_formula(&text, tok.span, warnings)));
        }
        self.expect(TokenKind::Arrow, "`->`")?;
        let (cmds, terminal) = self.stmtlist_terminal(self_label, warnings)?;
        leading.extend(cmds);
        Ok(GuardedCommand { guard, body: seq_of(leading), terminal })
    }
}

fn seq_of(mut cmds: Vec<Command>) -> Command {
    if cmds.len() == 1 {
        cmds.pop().unwrap()
    } else {
        Command::Seq(cmds)
    }
}

fn check_distinct_static_targets(targets: &[Lhs], span: SourceSpan) -> Result<(), Diagnostic> {
    for (i, a) in targets.iter().enumerate() {
        for b in &targets[i + 1..] {
            let clash = match (a, b) {
                (Lhs::Var(x), Lhs::Var(y)) => x == y,
                (Lhs::ArrayElem(x, ti), Lhs::ArrayElem(y, tj)) => x == y && ti == tj,
                _ => false,
            };
            if clash {
                return Err(Diagnostic::error(
                    span,
                    "parallel assignment writes the same location twice",
                ));
            }
        }
    }
    Ok(())
}

/// Read an annotation's text as a formula, falling back to prose.
fn annotation_formula(text: &str, span: SourceSpan, warnings: &mut Vec<Diagnostic>) -> Formula {
    match parse_formula(text) {
        Ok(f) => f,
        Err(_) => {
            warnings.push(Diagnostic::warning(
                span,
                format!("annotation `{{ {text} }}` is not a formula; kept as prose"),
            ));
            Formula::Opaque(text.trim().to_string())
        }
    }
}

// ---------------------------------------------------------------------------
// Line-level program structure.
// ---------------------------------------------------------------------------

struct RawBlock {
    label: Ident,
    assertion_text: String,
    /// Body lines, verbatim, with the 1-based number of the first one.
    body: String,
    body_first_line: u32,
}

struct ProgramParser<'a> {
    source: &'a str,
    errors: Vec<Diagnostic>,
    warnings: Vec<Diagnostic>,
}

/// `Ident ':' rest` (and not `:=`) makes a line a label line.
fn split_label_line(line: &str) -> Option<(&str, u32, &str)> {
    let trimmed_start = line.len() - line.trim_start().len();
    let t = &line[trimmed_start..];
    let word_len = t
        .char_indices()
        .take_while(|(i, c)| {
            if *i == 0 {
                c.is_ascii_alphabetic()
            } else {
                c.is_ascii_alphanumeric() || *c == '_'
            }
        })
        .count();
    if word_len == 0 {
        return None;
    }
    let (word, rest) = t.split_at(word_len);
    let rest_t = rest.trim_start();
    let mut rest_chars = rest_t.chars();
    if rest_chars.next() != Some(':') || rest_chars.next() == Some('=') {
        return None;
    }
    if !Ident::is_valid(word) {
        return None;
    }
    let after_colon = &rest_t[1..];
    Some((word, trimmed_start as u32 + 1, after_colon))
}

fn starts_with_word(text: &str, word: &str) -> bool {
    text.strip_prefix(word).is_some_and(|rest| {
        rest.chars().next().is_none_or(|c| !(c.is_ascii_alphanumeric() || c == '_'))
    })
}

/// Would this line begin a block body rather than continue an assertion?
fn is_body_start(line: &str) -> bool {
    let t = line.trim_start();
    if t.starts_with('"') || t.starts_with('{') {
        return true;
    }
    if ["if", "abort", "return", "goto", "swap"].iter().any(|w| starts_with_word(t, w)) {
        return true;
    }
    t.contains(":=") || t.contains("+=")
}

impl<'a> ProgramParser<'a> {
    fn new(source: &'a str) -> Self {
        ProgramParser { source, errors: Vec::new(), warnings: Vec::new() }
    }

    fn err(&mut self, span: SourceSpan, msg: impl Into<String>) {
        self.errors.push(Diagnostic::error(span, msg));
    }

    fn warn(&mut self, span: SourceSpan, msg: impl Into<String>) {
        self.warnings.push(Diagnostic::warning(span, msg));
    }

    fn parse(mut self) -> Result<Parsed, Vec<Diagnostic>> {
        let lines: Vec<&str> = self.source.lines().collect();
        let mut decls = Vec::new();
        let mut raw_blocks: Vec<RawBlock> = Vec::new();
        let mut i = 0usize;

        // Declarations come first.
        while i < lines.len() {
            let line = lines[i];
            if line.trim().is_empty() {
                i += 1;
                continue;
            }
            if !starts_with_word(line.trim_start(), "int") {
                break;
            }
            self.decl_line(line, (i + 1) as u32, &mut decls);
            i += 1;
        }

        // Blocks: label line, assertion text, body region.
        while i < lines.len() {
            let line = lines[i];
            let line_no = (i + 1) as u32;
            if line.trim().is_empty() {
                i += 1;
                continue;
            }
            let Some((label_text, col, rest)) = split_label_line(line) else {
                self.err(
                    SourceSpan::new(line_no, 1, line.trim().len() as u32),
                    "expected a labeled block (`L: assertion`)",
                );
                return Err(self.into_diagnostics());
            };
            let span = SourceSpan::new(line_no, col, label_text.len() as u32);
            let label = Ident::with_span(label_text, span).expect("validated");
            let mut assertion_text = String::from(rest.trim());
            i += 1;
            // Assertion continuation lines.
            while i < lines.len() {
                let l = lines[i];
                if l.trim().is_empty() {
                    i += 1;
                    continue;
                }
                if is_body_start(l) || split_label_line(l).is_some() {
                    break;
                }
                if !assertion_text.is_empty() {
                    assertion_text.push(' ');
                }
                assertion_text.push_str(l.trim());
                i += 1;
            }
            // Body region: up to the next label line (or end of input).
            let body_first_line = (i + 1) as u32;
            let mut body = String::new();
            while i < lines.len() {
                let l = lines[i];
                if split_label_line(l).is_some() {
                    break;
                }
                body.push_str(l);
                body.push('\n');
                i += 1;
            }
            if body.trim().is_empty() {
                self.err(span, format!("block `{label}` has no body"));
                continue;
            }
            raw_blocks.push(RawBlock { label, assertion_text, body, body_first_line });
        }

        if raw_blocks.is_empty() && self.errors.is_empty() {
            self.err(SourceSpan::new(1, 1, 0), "a program needs at least one block");
        }

        // Parse each body and each assertion.
        let mut blocks = Vec::new();
        for raw in &raw_blocks {
            let assertion = self.assertion(raw);
            match tokenize_at(&raw.body, raw.body_first_line, 1) {
                Ok(tokens) => {
                    let mut tp = TokenParser::new(tokens);
                    match tp.body(&raw.label, &mut self.warnings) {
                        Ok(body) => {
                            blocks.push(Block { label: raw.label.clone(), assertion, body })
                        }
                        Err(d) => self.errors.push(d),
                    }
                }
                Err(d) => self.errors.push(d),
            }
        }

        if !self.errors.is_empty() {
            return Err(self.into_diagnostics());
        }

        self.well_formed(decls, blocks)
    }

    fn decl_line(&mut self, line: &str, line_no: u32, decls: &mut Vec<Decl>) {
        let tokens = match tokenize_at(line, line_no, 1) {
            Ok(t) => t,
            Err(d) => {
                self.errors.push(d);
                return;
            }
        };
        let mut p = TokenParser::new(tokens);
        while !p.at_end() {
            if p.expect(TokenKind::IntKw, "`int`").is_err() {
                self.err(p.here(), "expected `int`");
                return;
            }
            // One `int` may introduce several comma-separated names.
            loop {
                let name = match p.ident("a variable name") {
                    Ok(n) => n,
                    Err(d) => {
                        self.errors.push(d);
                        return;
                    }
                };
                let mut kind = DeclKind::Scalar;
                if p.eat(&TokenKind::LBracket) {
                    match p.bump().map(|t| t.kind) {
                        Some(TokenKind::Int(n)) if n >= 0 => kind = DeclKind::Array(n as u64),
                        _ => {
                            self.err(name.span, "array length must be a nonnegative integer");
                            return;
                        }
                    }
                    if p.expect(TokenKind::RBracket, "`]`").is_err() {
                        self.err(name.span, "expected `]`");
                        return;
                    }
                }
                let mut init = None;
                if p.eat(&TokenKind::Assign) {
                    let neg = p.eat(&TokenKind::Minus);
                    match p.bump().map(|t| t.kind) {
                        Some(TokenKind::Int(n)) => init = Some(if neg { -n } else { n }),
                        _ => {
                            self.err(name.span, "initializer must be an integer literal");
                            return;
                        }
                    }
                }
                decls.push(Decl { name, kind, init });
                if !p.eat(&TokenKind::Comma) {
                    break;
                }
            }
            p.eat(&TokenKind::Semi);
        }
    }

    fn assertion(&mut self, raw: &RawBlock) -> Formula {
        let text = strip_outer_braces(raw.assertion_text.trim());
        if text.is_empty() {
            self.warn(raw.label.span, format!("label `{}` has no assertion; using `true`", raw.label));
            return Formula::TrueF;
        }
        match parse_formula(text) {
            Ok(f) => f,
            Err(_) => {
                self.warn(
                    raw.label.span,
                    format!("assertion of `{}` is not in the formal fragment; kept as prose", raw.label),
                );
                Formula::Opaque(text.to_string())
            }
        }
    }

    fn well_formed(
        mut self,
        mut decls: Vec<Decl>,
        mut blocks: Vec<Block>,
    ) -> Result<Parsed, Vec<Diagnostic>> {
        // Unique labels and declarations.
        let mut seen = BTreeSet::new();
        for b in &blocks {
            if !seen.insert(b.label.clone()) {
                self.err(b.label.span, format!("label `{}` is defined twice", b.label));
            }
        }
        let mut seen_decl = BTreeSet::new();
        for d in &decls {
            if !seen_decl.insert(d.name.clone()) {
                self.err(d.name.span, format!("`{}` is declared twice", d.name));
            }
        }

        let labels: BTreeSet<Ident> = blocks.iter().map(|b| b.label.clone()).collect();

        // Assertions may reference other labels; anything else demotes the
        // assertion to prose. Cycles among references are hard errors.
        for b in &mut blocks {
            let mut refs = BTreeSet::new();
            collect_labelrefs(&b.assertion, &mut refs);
            if refs.iter().any(|r| !labels.contains(r)) {
                self.warnings.push(Diagnostic::warning(
                    b.label.span,
                    format!(
                        "assertion of `{}` names no known label; kept as prose",
                        b.label
                    ),
                ));
                b.assertion = Formula::Opaque(assertion_prose(&b.assertion));
            }
        }
        let assertion_map: BTreeMap<Ident, Formula> =
            blocks.iter().map(|b| (b.label.clone(), b.assertion.clone())).collect();
        for b in &blocks {
            if let Err(ResolveError::CyclicReference(l)) =
                resolve_in_map(&assertion_map, &b.label)
            {
                self.err(
                    b.label.span,
                    format!("assertion references form a cycle through `{l}`"),
                );
                break;
            }
        }
        if !self.errors.is_empty() {
            return Err(self.into_diagnostics());
        }

        // Guards and annotations may name labels too; inline them now so
        // that evaluation never needs the program context.
        for b in &mut blocks {
            let label = b.label.clone();
            let mut resolve_err = None;
            visit_body_formulas(&mut b.body, &mut |f| {
                if formula_has_labelref(f) {
                    match resolve_formula_refs(f, &assertion_map) {
                        Ok(resolved) => *f = resolved,
                        Err(e) => resolve_err = Some(e),
                    }
                }
            });
            if let Some(e) = resolve_err {
                self.err(label.span, e.to_string());
            }
        }

        // Jumps must land on labels.
        for b in &blocks {
            let mut check_terminal = |t: &Terminal| {
                if let Terminal::Goto(target) = t {
                    if !labels.contains(target) {
                        self.errors.push(Diagnostic::error(
                            target.span,
                            format!("goto targets undefined label `{target}`"),
                        ));
                    }
                }
            };
            match &b.body {
                BlockBody::IfFi(arms) => arms.iter().for_each(|gc| check_terminal(&gc.terminal)),
                BlockBody::Straight(_, t) => check_terminal(t),
                _ => {}
            }
        }

        // Exactly one block returns; it is the halt block. The first block
        // is the start block.
        let halting: Vec<Ident> = blocks
            .iter()
            .filter(|b| {
                matches!(
                    &b.body,
                    BlockBody::Return(_) | BlockBody::Straight(_, Terminal::Return(_))
                )
            })
            .map(|b| b.label.clone())
            .collect();
        let halt = match halting.as_slice() {
            [one] => one.clone(),
            [] => {
                self.err(SourceSpan::new(1, 1, 0), "no block returns; a halt block is required");
                return Err(self.into_diagnostics());
            }
            [_, second, ..] => {
                self.err(second.span, "more than one block returns");
                return Err(self.into_diagnostics());
            }
        };
        let start = blocks[0].label.clone();

        // Every used name must be declared; scalars are declared on the
        // fly with a warning, arrays must be explicit.
        let mut used_scalars = BTreeSet::new();
        let mut used_arrays = BTreeSet::new();
        for b in &blocks {
            crate::ast::formula_vars(&b.assertion, &mut used_scalars, &mut used_arrays);
            match &b.body {
                BlockBody::IfFi(arms) => {
                    for gc in arms {
                        crate::ast::formula_vars(&gc.guard, &mut used_scalars, &mut used_arrays);
                        crate::ast::command_vars(&gc.body, &mut used_scalars, &mut used_arrays);
                        terminal_vars(&gc.terminal, &mut used_scalars, &mut used_arrays);
                    }
                }
                BlockBody::Straight(c, t) => {
                    crate::ast::command_vars(c, &mut used_scalars, &mut used_arrays);
                    terminal_vars(t, &mut used_scalars, &mut used_arrays);
                }
                BlockBody::Return(t) => {
                    crate::ast::term_vars(t, &mut used_scalars, &mut used_arrays)
                }
                BlockBody::Abort => {}
            }
        }
        let declared: BTreeMap<Ident, DeclKind> =
            decls.iter().map(|d| (d.name.clone(), d.kind)).collect();
        for name in &used_arrays {
            match declared.get(name) {
                Some(DeclKind::Array(_)) => {}
                Some(DeclKind::Scalar) => {
                    self.errors.push(Diagnostic::error(
                        name.span,
                        format!("`{name}` is a scalar but is indexed like an array"),
                    ));
                }
                None => {
                    self.errors.push(Diagnostic::error(
                        name.span,
                        format!("array `{name}` is not declared"),
                    ));
                }
            }
        }
        for name in &used_scalars {
            match declared.get(name) {
                Some(DeclKind::Scalar) => {}
                Some(DeclKind::Array(_)) => {
                    self.errors.push(Diagnostic::error(
                        name.span,
                        format!("array `{name}` is used without an index"),
                    ));
                }
                None => {
                    self.warnings.push(Diagnostic::warning(
                        name.span,
                        format!("`{name}` is not declared; declaring it as a scalar with value 0"),
                    ));
                    decls.push(Decl { name: name.clone(), kind: DeclKind::Scalar, init: None });
                }
            }
        }

        if !self.errors.is_empty() {
            return Err(self.into_diagnostics());
        }
        Ok(Parsed {
            program: Program { decls, blocks, start, halt },
            warnings: self.warnings,
        })
    }

    fn into_diagnostics(self) -> Vec<Diagnostic> {
        let mut all = self.errors;
        all.extend(self.warnings);
        all
    }
}

/// `{ text }` wrapping an entire assertion is stripped.
fn strip_outer_braces(text: &str) -> &str {
    let t = text.trim();
    if !(t.starts_with('{') && t.ends_with('}') && t.len() >= 2) {
        return t;
    }
    // The first brace must close at the final character.
    let mut depth = 0i32;
    for (i, c) in t.char_indices() {
        match c {
            '{' => depth += 1,
            '}' => {
                depth -= 1;
                if depth == 0 {
                    return if i == t.len() - 1 { t[1..i].trim() } else { t };
                }
            }
            _ => {}
        }
    }
    t
}

fn collect_labelrefs(f: &Formula, out: &mut BTreeSet<Ident>) {
    match f {
        Formula::LabelRef(l) => {
            out.insert(l.clone());
        }
        Formula::Not(a) => collect_labelrefs(a, out),
        Formula::And(a, b) | Formula::Or(a, b) | Formula::Implies(a, b) => {
            collect_labelrefs(a, out);
            collect_labelrefs(b, out);
        }
        Formula::BoundedAll(_, _, _, b) | Formula::BoundedSome(_, _, _, b) => {
            collect_labelrefs(b, out)
        }
        _ => {}
    }
}

/// Replace label references inside `f` by the referenced (recursively
/// resolved) assertions from `map`.
pub fn resolve_formula_refs(
    f: &Formula,
    map: &BTreeMap<Ident, Formula>,
) -> Result<Formula, ResolveError> {
    Ok(match f {
        Formula::LabelRef(l) => resolve_in_map(map, l)?,
        Formula::Not(a) => Formula::Not(Box::new(resolve_formula_refs(a, map)?)),
        Formula::And(a, b) => Formula::And(
            Box::new(resolve_formula_refs(a, map)?),
            Box::new(resolve_formula_refs(b, map)?),
        ),
        Formula::Or(a, b) => Formula::Or(
            Box::new(resolve_formula_refs(a, map)?),
            Box::new(resolve_formula_refs(b, map)?),
        ),
        Formula::Implies(a, b) => Formula::Implies(
            Box::new(resolve_formula_refs(a, map)?),
            Box::new(resolve_formula_refs(b, map)?),
        ),
        Formula::BoundedAll(v, lo, hi, b) => Formula::BoundedAll(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(resolve_formula_refs(b, map)?),
        ),
        Formula::BoundedSome(v, lo, hi, b) => Formula::BoundedSome(
            v.clone(),
            lo.clone(),
            hi.clone(),
            Box::new(resolve_formula_refs(b, map)?),
        ),
        other => other.clone(),
    })
}

/// A one-line prose rendering for assertions demoted to opaque.
fn assertion_prose(f: &Formula) -> String {
    crate::pretty::formula_to_string(f)
}

fn visit_body_formulas(body: &mut BlockBody, visit: &mut impl FnMut(&mut Formula)) {
    fn visit_cmd(c: &mut Command, visit: &mut impl FnMut(&mut Formula)) {
        match c {
            Command::Guard(f) | Command::Annot(f) => visit(f),
            Command::Seq(cs) => cs.iter_mut().for_each(|c| visit_cmd(c, visit)),
            _ => {}
        }
    }
    match body {
        BlockBody::IfFi(arms) => {
            for gc in arms {
                visit(&mut gc.guard);
                visit_cmd(&mut gc.body, visit);
            }
        }
        BlockBody::Straight(c, _) => visit_cmd(c, visit),
        _ => {}
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
