// SPDX-License-Identifier: Apache-2.0

//! Frontend: lexing, parsing, and width checking of BDL sources.

mod ast;
mod lexer;
mod parser;
mod widths;

pub use ast::{
    pretty_print, walk_expr_nodes, AssignRef, BinOp, Direction, Expr, ExprId, PortDecl, Program,
    Stmt, UnaryOp, VarDecl,
};
pub use lexer::{literal_value, tokenize, Token, TokenKind, KEYWORDS};
pub use parser::{parse, parse_source};
pub use widths::{check_widths, WidthReport};

/// Errors raised while lexing, parsing, or width-checking a BDL source.
#[derive(Debug, Clone, thiserror::Error)]
pub enum FrontendError {
    #[error("lex error at {line}:{column}: unexpected character `{found}`")]
    Lex { line: u32, column: u32, found: char },
    #[error("parse error at {line}:{column}: expected {expected}, found {found}")]
    Parse {
        line: u32,
        column: u32,
        expected: String,
        found: String,
    },
    #[error("semantic error: {message}")]
    Semantic { message: String },
    #[error("width error: constant {value} does not fit destination `{target}` of width {width}")]
    Width {
        value: u64,
        width: u32,
        target: String,
    },
}
