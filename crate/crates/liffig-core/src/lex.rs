//! Tokenizer for declarations, block bodies and formulas.
//!
//! Assertion prose is deliberately not lexed: the program parser slices it
//! out line-wise and only hands the tokenizer text that must be formal
//! (declarations, bodies, and assertion text it is *trying* to read as a
//! formula).

use alloc::string::String;
use alloc::vec::Vec;

use crate::diag::{Diagnostic, SourceSpan};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TokenKind {
    Ident(String),
    Int(i64),
    // Keywords.
    If,
    Fi,
    Goto,
    Return,
    Abort,
    IntKw,
    All,
    Some,
    In,
    Or,
    Swap,
    True,
    False,
    // Punctuation and operators.
    Assign,    // :=
    PlusAssign, // +=
    Arrow,     // ->
    Implies,   // =>
    Eq,        // =
    Ne,        // !=
    Le,        // <=
    Ge,        // >=
    Lt,        // <
    Gt,        // >
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    Amp,
    Bang,
    Comma,
    Semi,
    Colon,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Pipe,
    DotDot, // ..
    /// `{ ... }` group; the trimmed inner text.
    Annotation(String),
    /// `"..."` hole; the inner text verbatim.
    HoleStr(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub kind: TokenKind,
    pub span: SourceSpan,
}

fn keyword(word: &str) -> Option<TokenKind> {
    Some(match word {
        "if" => TokenKind::If,
        "fi" => TokenKind::Fi,
        "goto" => TokenKind::Goto,
        "return" => TokenKind::Return,
        "abort" => TokenKind::Abort,
        "int" => TokenKind::IntKw,
        "all" => TokenKind::All,
        "some" => TokenKind::Some,
        "in" => TokenKind::In,
        "or" => TokenKind::Or,
        "swap" => TokenKind::Swap,
        "true" => TokenKind::True,
        "false" => TokenKind::False,
        _ => return None,
    })
}

/// Tokenize `source` as if it started at line 1, column 1.
pub fn tokenize(source: &str) -> Result<Vec<Token>, Diagnostic> {
    tokenize_at(source, 1, 1)
}

/// Tokenize a slice of a larger file; spans are reported relative to the
/// slice's position (`line`, `column`) in that file.
pub fn tokenize_at(source: &str, line: u32, column: u32) -> Result<Vec<Token>, Diagnostic> {
    Lexer { rest: source, line, column, tokens: Vec::new() }.run()
}

struct Lexer<'a> {
    rest: &'a str,
    line: u32,
    column: u32,
    tokens: Vec<Token>,
}

impl<'a> Lexer<'a> {
    fn run(mut self) -> Result<Vec<Token>, Diagnostic> {
        while let Some(c) = self.peek() {
            if c == '\n' {
                self.bump();
                self.line += 1;
                self.column = 1;
                continue;
            }
            if c.is_whitespace() {
                self.bump();
                continue;
            }
            if self.rest.starts_with("//") {
                while self.peek().is_some_and(|c| c != '\n') {
                    self.bump();
                }
                continue;
            }
            let span_start = (self.line, self.column);
            if c.is_ascii_digit() {
                self.lex_number(span_start)?;
            } else if c.is_ascii_alphabetic() || c == '_' {
                self.lex_word(span_start);
            } else if c == '{' {
                self.lex_annotation(span_start)?;
            } else if c == '"' {
                self.lex_hole(span_start)?;
            } else {
                self.lex_operator(span_start)?;
            }
        }
        Ok(self.tokens)
    }

    fn peek(&self) -> Option<char> {
        self.rest.chars().next()
    }

    fn bump(&mut self) -> char {
        let c = self.rest.chars().next().unwrap();
        self.rest = &self.rest[c.len_utf8()..];
        if c != '\n' {
            self.column += 1;
        }
        c
    }

    fn push(&mut self, kind: TokenKind, start: (u32, u32)) {
        let length = self.column.saturating_sub(start.1);
        self.tokens.push(Token { kind, span: SourceSpan::new(start.0, start.1, length) });
    }

    fn lex_number(&mut self, start: (u32, u32)) -> Result<(), Diagnostic> {
        let mut text = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_digit() {
                text.push(self.bump());
            } else {
                break;
            }
        }
        match text.parse::<i64>() {
            Ok(v) => {
                self.push(TokenKind::Int(v), start);
                Ok(())
            }
            Err(_) => Err(Diagnostic::error(
                SourceSpan::new(start.0, start.1, text.len() as u32),
                "integer literal does not fit in 64 bits",
            )),
        }
    }

    fn lex_word(&mut self, start: (u32, u32)) {
        let mut word = String::new();
        while let Some(c) = self.peek() {
            if c.is_ascii_alphanumeric() || c == '_' {
                word.push(self.bump());
            } else {
                break;
            }
        }
        let kind = keyword(&word).unwrap_or(TokenKind::Ident(word));
        self.push(kind, start);
    }

    fn lex_annotation(&mut self, start: (u32, u32)) -> Result<(), Diagnostic> {
        self.bump(); // '{'
        let mut depth = 1u32;
        let mut text = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(Diagnostic::error(
                    SourceSpan::new(start.0, start.1, 1),
                    "unterminated `{ ... }` group",
                ));
            };
            if c == '\n' {
                self.bump();
                self.line += 1;
                self.column = 1;
                text.push('\n');
                continue;
            }
            self.bump();
            match c {
                '{' => {
                    depth += 1;
                    text.push(c);
                }
                '}' => {
                    depth -= 1;
                    if depth == 0 {
                        break;
                    }
                    text.push(c);
                }
                _ => text.push(c),
            }
        }
        self.push(TokenKind::Annotation(text.trim().into()), start);
        Ok(())
    }

    fn lex_hole(&mut self, start: (u32, u32)) -> Result<(), Diagnostic> {
        self.bump(); // '"'
        let mut text = String::new();
        loop {
            let Some(c) = self.peek() else {
                return Err(Diagnostic::error(
                    SourceSpan::new(start.0, start.1, 1),
                    "unterminated string",
                ));
            };
            if c == '\n' {
                self.bump();
                self.line += 1;
                self.column = 1;
                text.push('\n');
                continue;
            }
            self.bump();
            if c == '"' {
                break;
            }
            text.push(c);
        }
        self.push(TokenKind::HoleStr(text), start);
        Ok(())
    }

    fn lex_operator(&mut self, start: (u32, u32)) -> Result<(), Diagnostic> {
        let c = self.bump();
        let two = |lexer: &Lexer| lexer.peek();
        let kind = match c {
            ':' => {
                if two(self) == Some('=') {
                    self.bump();
                    TokenKind::Assign
                } else {
                    TokenKind::Colon
                }
            }
            '+' => {
                if two(self) == Some('=') {
                    self.bump();
                    TokenKind::PlusAssign
                } else {
                    TokenKind::Plus
                }
            }
            '-' => {
                if two(self) == Some('>') {
                    self.bump();
                    TokenKind::Arrow
                } else {
                    TokenKind::Minus
                }
            }
            '=' => {
                if two(self) == Some('>') {
                    self.bump();
                    TokenKind::Implies
                } else {
                    TokenKind::Eq
                }
            }
            '!' => {
                if two(self) == Some('=') {
                    self.bump();
                    TokenKind::Ne
                } else {
                    TokenKind::Bang
                }
            }
            '<' => {
                if two(self) == Some('=') {
                    self.bump();
                    TokenKind::Le
                } else {
                    TokenKind::Lt
                }
            }
            '>' => {
                if two(self) == Some('=') {
                    self.bump();
                    TokenKind::Ge
                } else {
                    TokenKind::Gt
                }
            }
            '.' => {
                if two(self) == Some('.') {
                    self.bump();
                    TokenKind::DotDot
                } else {
                    return Err(Diagnostic::error(
                        SourceSpan::new(start.0, start.1, 1),
                        "illegal character `.`",
                    ));
                }
            }
            '*' => TokenKind::Star,
            '/' => TokenKind::Slash,
            '^' => TokenKind::Caret,
            '&' => TokenKind::Amp,
            ',' => TokenKind::Comma,
            ';' => TokenKind::Semi,
            '(' => TokenKind::LParen,
            ')' => TokenKind::RParen,
            '[' => TokenKind::LBracket,
            ']' => TokenKind::RBracket,
            '|' => TokenKind::Pipe,
            other => {
                return Err(Diagnostic::error(
                    SourceSpan::new(start.0, start.1, 1),
                    alloc::format!("illegal character `{other}`"),
                ));
            }
        };
        self.push(kind, start);
        Ok(())
    }
}
