//! Input parsing, diagnostics and output rendering.

pub mod ast;
pub mod diag;
pub mod loopfmt;
pub mod polyfile;
pub mod printer;
pub mod sexpr;
pub mod smt2;

pub use ast::{BoolTerm, BvTerm, Command, Script};
pub use diag::{Diagnostic, ErrorCode, PResult, Severity, Span};
pub use loopfmt::{parse_loop, print_loop};
pub use polyfile::parse_poly_file;
pub use printer::{print_script, print_verdict};
pub use smt2::{lower, parse_smt2, Problem};
