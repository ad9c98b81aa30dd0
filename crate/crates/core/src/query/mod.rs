//! Boolean field-query language: syntax tree, parser and set evaluation.

mod ast;
mod eval;
mod parser;

pub use ast::{QueryAst, QueryField};
pub use eval::{display_order, display_page, evaluate, EvalError, FacetFilters};
pub use parser::{parse_query, SyntaxError, MAX_DEPTH};
