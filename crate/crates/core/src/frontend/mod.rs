//! The `.pbs` text format: a parser and pretty-printer for diagrams with gate
//! bindings, plus DOT and TikZ renderers.
//!
//! Sequential composition is written left to right in dataflow order, so
//! `a ; b` runs `a` first and denotes `b ∘ a`. Parallel composition `&`
//! stacks top to bottom and binds tighter than `;`.
//!
//! ```text
//! sym U
//! let X = [[0, 1], [1, 0]]
//! def qs = tr( pbs ; (gate U & gate X) ; pbs ; swap )
//! ```

mod lexer;
mod parser;
mod printer;
mod render;

use thiserror::Error;

use crate::diagram::Diagram;
use crate::linalg::CMatrix;

pub use parser::parse;
pub use printer::{format_complex, print, print_canonical, print_flat, print_matrix, print_module};
pub use render::{render, RenderFormat};

/// Errors from parsing and elaborating a module. Every variant carries the
/// 1-based line and column of the offending text.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FrontendError {
    #[error("{line}:{col}: syntax error: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("{line}:{col}: arity {left} vs {right} in sequential composition")]
    Arity {
        line: usize,
        col: usize,
        left: usize,
        right: usize,
    },
    #[error("{line}:{col}: trace of a diagram with no wires")]
    EmptyTrace { line: usize, col: usize },
    #[error("{line}:{col}: undefined name `{name}`")]
    Undefined { line: usize, col: usize, name: String },
    #[error("{line}:{col}: duplicate name `{name}`")]
    Duplicate { line: usize, col: usize, name: String },
    #[error("{line}:{col}: recursive definition `{name}`")]
    Recursive { line: usize, col: usize, name: String },
    #[error("{line}:{col}: bad matrix: {message}")]
    Matrix { line: usize, col: usize, message: String },
    #[error("{line}:{col}: `{name}` is a {found}, expected a {expected}")]
    WrongKind {
        line: usize,
        col: usize,
        name: String,
        expected: &'static str,
        found: &'static str,
    },
}

impl FrontendError {
    /// The `(line, column)` of the error.
    pub fn location(&self) -> (usize, usize) {
        match *self {
            FrontendError::Syntax { line, col, .. }
            | FrontendError::Arity { line, col, .. }
            | FrontendError::EmptyTrace { line, col }
            | FrontendError::Undefined { line, col, .. }
            | FrontendError::Duplicate { line, col, .. }
            | FrontendError::Recursive { line, col, .. }
            | FrontendError::Matrix { line, col, .. }
            | FrontendError::WrongKind { line, col, .. } => (line, col),
        }
    }
}

/// A gate binding: a concrete matrix or a symbolic declaration.
#[derive(Debug, Clone, PartialEq)]
pub enum Binding {
    Matrix(CMatrix),
    Symbolic,
}

/// A parsed and elaborated module. Definitions are stored as diagrams with
/// every reference to another definition inlined.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SourceModule {
    pub bindings: Vec<(String, Binding)>,
    pub definitions: Vec<(String, Diagram)>,
    /// The default definition to act on: the last one in the file.
    pub entry: Option<String>,
}

impl SourceModule {
    pub fn binding(&self, name: &str) -> Option<&Binding> {
        self.bindings.iter().find(|(n, _)| n == name).map(|(_, b)| b)
    }

    pub fn definition(&self, name: &str) -> Option<&Diagram> {
        self.definitions.iter().find(|(n, _)| n == name).map(|(_, d)| d)
    }

    /// The definition named `name`, or the entry definition when `name` is
    /// `None`.
    pub fn resolve(&self, name: Option<&str>) -> Result<&Diagram, FrontendError> {
        let target = name.or(self.entry.as_deref()).unwrap_or("<entry>");
        self.definition(target).ok_or_else(|| FrontendError::Undefined {
            line: 1,
            col: 1,
            name: target.to_string(),
        })
    }

    /// The common dimension of all bound matrices, if any is bound.
    pub fn gate_dim(&self) -> Option<usize> {
        self.bindings.iter().find_map(|(_, b)| match b {
            Binding::Matrix(m) => Some(m.rows()),
            Binding::Symbolic => None,
        })
    }
}

/// Reserved words that cannot be used as names.
pub const KEYWORDS: [&str; 10] = ["let", "sym", "def", "id", "neg", "swap", "pbs", "gate", "tr", "empty"];
