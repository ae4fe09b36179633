//! The notJS intermediate language: abstract syntax, the parenthesized
//! surface syntax (`.njs` files) and static well-formedness checks.

mod ast;
mod parse;
mod pretty;
mod validate;

pub use ast::*;
pub use parse::{parse_program, ParseError};
pub use pretty::{fmt_num, fmt_str, pretty, pretty_exp, pretty_stmt};
pub use validate::{validate, DiagKind, Diagnostic};
