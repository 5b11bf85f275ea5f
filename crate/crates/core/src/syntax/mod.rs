//! Concrete syntax for signatures, contexts, valences and terms.
//!
//! Terms: `x`, `m{u,v}(M, N)`, `op[u](\{w}[x].M, N)`, `nabla[exp](\{u}.J)`.
//! Empty parameter lists, argument lists and binder groups are omitted. An
//! argument that binds nothing is written bare. With the sequent operators in
//! the signature, `<>`, `H, u:A`, `H >> A` and `'u` abbreviate `nil`,
//! `snoc[u](H, A)`, `sequent(H, A)` and `hyp[u]`.

mod lex;
mod parse;
mod print;

use std::fmt;

use serde::Serialize;
use thiserror::Error;

use crate::contexts::ContextError;
use crate::name::Name;
use crate::signature::SignatureError;
use crate::term::{Abstraction, Term};

pub use parse::{
    parse_abstraction, parse_abstraction_in, parse_meta_ctx, parse_signature, parse_symbol_ctx, parse_term,
    parse_term_in, parse_term_spanned, parse_var_ctx, SpanMap,
};
pub use print::{print_abstraction, print_abstraction_with, print_term, print_term_with, PrintOptions};

/// Byte offsets into a source text.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Span {
    pub start: usize,
    pub end: usize,
}

impl Span {
    pub fn new(start: usize, end: usize) -> Span {
        Span { start, end }
    }
}

impl fmt::Display for Span {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.start, self.end)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SyntaxError {
    #[error("{message}")]
    Parse { message: String, span: Span },
    #[error("unknown operator `{name}`")]
    UnknownOperator { name: Name, span: Span },
    #[error("{error}")]
    Signature { error: SignatureError, span: Span },
    #[error("{error}")]
    Context { error: ContextError, span: Span },
}

impl SyntaxError {
    pub fn span(&self) -> Span {
        match self {
            SyntaxError::Parse { span, .. }
            | SyntaxError::UnknownOperator { span, .. }
            | SyntaxError::Signature { span, .. }
            | SyntaxError::Context { span, .. } => *span,
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_term(self))
    }
}

impl fmt::Display for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_abstraction(self))
    }
}

impl fmt::Debug for Abstraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_abstraction(self))
    }
}
