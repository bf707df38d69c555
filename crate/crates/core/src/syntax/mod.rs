//! Textual forms of trees: canonical s-expressions, prefix text, and an
//! infix rendering for humans.

pub mod prefix;
pub mod pretty;
pub mod sexpr;

use std::fmt;

use thiserror::Error;

pub use prefix::{parse_prefix, pattern_to_prefix, to_prefix, Pattern};
pub use pretty::pretty;
pub use sexpr::{parse_sexpr, to_sexpr};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxError {
    pub line: usize,
    pub col: usize,
    pub msg: String,
}

impl SyntaxError {
    pub fn new(line: usize, col: usize, msg: &str) -> Self {
        SyntaxError { line, col, msg: msg.to_string() }
    }
}

impl fmt::Display for SyntaxError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.col, self.msg)
    }
}

impl std::error::Error for SyntaxError {}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at {0}")]
    Syntax(SyntaxError),
    #[error("{line}:{col}: `{symbol}` expects {expected} arguments, found {found}")]
    Arity { line: usize, col: usize, symbol: String, expected: usize, found: usize },
}
