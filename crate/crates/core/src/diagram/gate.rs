//! Elements of the gate monoid: dense matrices or formal words over named
//! gates.

use std::fmt;

use thiserror::Error;

use crate::linalg::{mat_eq, CMatrix, LinalgError};

/// Reserved gate name denoting the identity matrix.
pub const IDENTITY_NAME: &str = "I";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GateError {
    #[error("cannot compare or multiply symbolic gate `{0}` with a numeric matrix")]
    Incomparable(String),
    #[error("gate `{0}` has no numeric matrix")]
    Symbolic(String),
    #[error("gate dimension {found} does not match q = {expected}")]
    Dimension { expected: usize, found: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// A named gate, optionally carrying the matrix it stands for.
#[derive(Debug, Clone, PartialEq)]
pub struct Symbol {
    pub name: String,
    pub matrix: Option<CMatrix>,
}

impl Symbol {
    pub fn new(name: impl Into<String>) -> Self {
        Symbol {
            name: name.into(),
            matrix: None,
        }
    }

    pub fn annotated(name: impl Into<String>, matrix: CMatrix) -> Self {
        Symbol {
            name: name.into(),
            matrix: Some(matrix),
        }
    }

    pub fn is_identity(&self) -> bool {
        self.name == IDENTITY_NAME
    }
}

/// A gate label. Words list symbols left to right as in matrix notation, so
/// the rightmost symbol is the first one applied.
#[derive(Debug, Clone, PartialEq)]
pub enum GateElement {
    Numeric(CMatrix),
    Word(Vec<Symbol>),
}

impl GateElement {
    /// The empty word, neutral for every product.
    pub fn one() -> Self {
        GateElement::Word(Vec::new())
    }

    pub fn symbol(name: impl Into<String>) -> Self {
        GateElement::Word(vec![Symbol::new(name)])
    }

    pub fn annotated(name: impl Into<String>, matrix: CMatrix) -> Self {
        GateElement::Word(vec![Symbol::annotated(name, matrix)])
    }

    pub fn identity_symbol() -> Self {
        Self::symbol(IDENTITY_NAME)
    }

    pub fn numeric(matrix: CMatrix) -> Self {
        GateElement::Numeric(matrix)
    }

    /// Builds a word from a string of single-character names, e.g. `"UV"`.
    pub fn word_from_chars(names: &str) -> Self {
        GateElement::Word(names.chars().map(|c| Symbol::new(c.to_string())).collect())
    }

    pub fn is_numeric(&self) -> bool {
        matches!(self, GateElement::Numeric(_))
    }

    /// Symbol names of a word with identity symbols removed.
    pub fn reduced_names(&self) -> Option<Vec<&str>> {
        match self {
            GateElement::Numeric(_) => None,
            GateElement::Word(w) => Some(w.iter().filter(|s| !s.is_identity()).map(|s| s.name.as_str()).collect()),
        }
    }

    /// Dimension of the matrices involved, if any is known.
    pub fn dim(&self) -> Option<usize> {
        match self {
            GateElement::Numeric(m) => Some(m.rows()),
            GateElement::Word(w) => w.iter().find_map(|s| s.matrix.as_ref().map(CMatrix::rows)),
        }
    }

    /// True for the product `self · acc` being computable without a matrix
    /// collapse, i.e. both sides have the same kind.
    pub fn same_kind(&self, other: &GateElement) -> bool {
        self.is_numeric() == other.is_numeric()
    }

    /// Collapses to a q×q matrix. Identity symbols need no annotation.
    pub fn to_matrix(&self, q: usize) -> Result<CMatrix, GateError> {
        match self {
            GateElement::Numeric(m) => {
                if m.rows() != q {
                    return Err(GateError::Dimension {
                        expected: q,
                        found: m.rows(),
                    });
                }
                Ok(m.clone())
            }
            GateElement::Word(w) => {
                let mut acc = CMatrix::identity(q);
                for s in w {
                    if s.is_identity() {
                        continue;
                    }
                    let m = s.matrix.as_ref().ok_or_else(|| GateError::Symbolic(s.name.clone()))?;
                    if m.rows() != q {
                        return Err(GateError::Dimension {
                            expected: q,
                            found: m.rows(),
                        });
                    }
                    acc = acc.mul(m)?;
                }
                Ok(acc)
            }
        }
    }

    fn first_unannotated(&self) -> Option<String> {
        match self {
            GateElement::Numeric(_) => None,
            GateElement::Word(w) => w
                .iter()
                .find(|s| s.matrix.is_none() && !s.is_identity())
                .map(|s| s.name.clone()),
        }
    }

    /// The product `self · rhs`: `rhs` is applied first.
    pub fn mul(&self, rhs: &GateElement) -> Result<GateElement, GateError> {
        match (self, rhs) {
            (GateElement::Word(a), GateElement::Word(b)) => {
                let mut w = a.clone();
                w.extend(b.iter().cloned());
                Ok(GateElement::Word(w))
            }
            (GateElement::Numeric(a), GateElement::Numeric(b)) => Ok(GateElement::Numeric(a.mul(b)?)),
            (GateElement::Numeric(a), w @ GateElement::Word(_)) => {
                if let Some(name) = w.first_unannotated() {
                    return Err(GateError::Incomparable(name));
                }
                Ok(GateElement::Numeric(a.mul(&w.to_matrix(a.rows())?)?))
            }
            (w @ GateElement::Word(_), GateElement::Numeric(b)) => {
                if let Some(name) = w.first_unannotated() {
                    return Err(GateError::Incomparable(name));
                }
                Ok(GateElement::Numeric(w.to_matrix(b.rows())?.mul(b)?))
            }
        }
    }

    /// Equality in the gate monoid: words compare by symbol names (identity
    /// symbols dropped), fully annotated words and matrices entrywise at
    /// `tol`, and mixed pairs after collapsing the word. A free symbol
    /// against a concrete matrix is incomparable.
    pub fn equals(&self, other: &GateElement, tol: f64) -> Result<bool, GateError> {
        match (self, other) {
            (GateElement::Numeric(a), GateElement::Numeric(b)) => {
                if a.rows() != b.rows() {
                    return Ok(false);
                }
                Ok(mat_eq(a, b, tol)?)
            }
            (GateElement::Word(_), GateElement::Word(_)) => {
                if self.reduced_names() == other.reduced_names() {
                    return Ok(true);
                }
                match (self.first_unannotated(), other.first_unannotated()) {
                    (None, None) => match (self.dim(), other.dim()) {
                        (Some(a), Some(b)) if a != b => Ok(false),
                        (Some(q), _) | (_, Some(q)) => Ok(mat_eq(&self.to_matrix(q)?, &other.to_matrix(q)?, tol)?),
                        (None, None) => Ok(false),
                    },
                    (Some(name), None) if !other.is_identity() => Err(GateError::Incomparable(name)),
                    (None, Some(name)) if !self.is_identity() => Err(GateError::Incomparable(name)),
                    _ => Ok(false),
                }
            }
            (GateElement::Numeric(m), w @ GateElement::Word(_))
            | (w @ GateElement::Word(_), GateElement::Numeric(m)) => {
                if let Some(name) = w.first_unannotated() {
                    return Err(GateError::Incomparable(name));
                }
                Ok(mat_eq(m, &w.to_matrix(m.rows())?, tol)?)
            }
        }
    }

    /// Identity test: numeric matrices at 1e-9, words made only of `I`.
    pub fn is_identity(&self) -> bool {
        match self {
            GateElement::Numeric(m) => m.is_square() && mat_eq(m, &CMatrix::identity(m.rows()), 1e-9).unwrap_or(false),
            GateElement::Word(w) => w.iter().all(Symbol::is_identity),
        }
    }

    /// Replaces every annotated symbol by its matrix when the whole word is
    /// annotated; leaves other elements untouched.
    pub fn collapsed(&self) -> GateElement {
        match (self, self.dim()) {
            (GateElement::Word(_), Some(q)) if self.first_unannotated().is_none() => self
                .to_matrix(q)
                .map(GateElement::Numeric)
                .unwrap_or_else(|_| self.clone()),
            _ => self.clone(),
        }
    }
}

impl fmt::Display for GateElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GateElement::Numeric(m) => {
                write!(f, "[")?;
                for r in 0..m.rows() {
                    if r > 0 {
                        write!(f, ", ")?;
                    }
                    write!(f, "[")?;
                    for c in 0..m.cols() {
                        if c > 0 {
                            write!(f, ", ")?;
                        }
                        let z = m[(r, c)];
                        write!(f, "{}{:+}i", z.re, z.im)?;
                    }
                    write!(f, "]")?;
                }
                write!(f, "]")
            }
            GateElement::Word(w) => {
                if w.is_empty() {
                    return write!(f, "ε");
                }
                let short = w.iter().all(|s| s.name.chars().count() == 1);
                let sep = if short { "" } else { "·" };
                let names: Vec<&str> = w.iter().map(|s| s.name.as_str()).collect();
                write!(f, "{}", names.join(sep))
            }
        }
    }
}
