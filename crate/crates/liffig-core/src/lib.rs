//! Toolchain for Liffig, a small guarded-command language in which every
//! labeled block carries an assertion and ends by jumping to another label
//! or returning a value.
//!
//! The crate provides, in one place and with one semantics:
//!
//! * an abstract syntax tree and a parser for `.lif` source text ([`ast`],
//!   [`lex`], [`parse`]),
//! * an interpreter that checks each block's assertion on arrival and
//!   records a trace ([`eval`], [`interp`]),
//! * extraction and brute-force checking of the verification conditions
//!   induced by the label graph, over finite windows of the integers
//!   ([`vc`]),
//! * synthesis of a program back out of a verification-condition list and
//!   merging of partially developed snippets ([`vc`]),
//! * a translator to plain C with labels and gotos ([`cgen`]).
//!
//! The crate is `no_std` (with `alloc`); everything here is pure
//! computation over strings and trees. File handling and the command-line
//! interface live in the companion `liffig-cli` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod ast;
pub mod cgen;
pub mod diag;
pub mod eval;
pub mod interp;
pub mod lex;
pub mod parse;
pub mod pretty;
pub mod state;
pub mod vc;
pub mod vcfile;

pub use ast::{
    Block, BlockBody, Command, Decl, DeclKind, Formula, GuardedCommand, Ident, Lhs, Program,
    Term, Terminal,
};
pub use diag::{Diagnostic, Severity, SourceSpan};
pub use interp::{GuardPolicy, RunConfig, VariantVerdict};
pub use parse::{parse_formula, parse_program, parse_term, Parsed};
pub use state::{FaultKind, RunResult, State, Trace};
pub use vc::{DomainWindow, VcVerdict, VerificationCondition};
