//! CBDDL problem files: lexing, parsing, validation and printing.
//!
//! A problem is one `(define (problem NAME) ...)` form holding free-order
//! blocks:
//!
//! ```text
//! (define (problem pick_apple)
//!   (:domain tabletop)
//!   (:language "Pick up the apple and put it on the bowl")
//!   (:objects (apple_1 apple (:parts (0 sphere 0.04 (0 0 0)))) (bowl_1 bowl))
//!   (:init (At apple_1 (0 0 0.04)))
//!   (:goal (OnTop apple_1 bowl_1))
//!   (:cost (InContact apple_1 bowl_1)))
//! ```
//!
//! Unknown `:`-keywords are rejected. Numbers are plain decimals.

mod ast;
mod error;
mod lexer;
mod parser;
mod predicate;
mod printer;
mod validate;

pub use ast::*;
pub use error::{LexError, LexErrorKind, ParseError, SyntaxError};
pub use lexer::{read_all, tokenize, Sexp, Span, Token, TokenKind};
pub use parser::parse_problem;
pub use predicate::{ArgKind, Predicate, PredicateClass};
pub use printer::{expr_to_string, pretty_print};
pub use validate::{validate, Diagnostic, Severity};
