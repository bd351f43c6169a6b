//! The specification language: AST, parser, typechecker, normalizer, pretty-printer and
//! the JSON document format.

pub mod ast;
pub mod diag;
pub mod doc;
mod lexer;
pub mod normalize;
pub mod parser;
pub mod pretty;
pub mod typecheck;

pub use ast::{conjoin, BinOp, Expr, ExprKind, Param, QuantKind, Signature, Span, Specification, Type, UnOp, RETVAL};
pub use diag::{Diagnostic, DiagnosticKind, Diagnostics};
pub use doc::{expr_from_doc, expr_to_doc, spec_from_doc, spec_to_doc, DocError};
pub use normalize::{conjuncts, normalize};
pub use parser::{parse, parse_expr};
pub use pretty::{pretty, pretty_spec};
pub use typecheck::{parse_checked, typecheck, typecheck_clause};
