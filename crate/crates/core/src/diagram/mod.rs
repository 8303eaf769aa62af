//! The typed diagram syntax: generators, sequential and parallel composition
//! and trace, together with arity checking.

mod builders;
mod flat;
mod gate;
mod random;

use std::fmt;

use thiserror::Error;

pub use builders::{
    controlled_permutation_builder, d_u, embed, filter_builder, perm3_right, permutation_for, permutation_is_even,
    qs_builder, rebound_loop, traverse_loop,
};
pub use flat::{flatten, Flat};
pub use gate::{GateElement, GateError, Symbol, IDENTITY_NAME};
pub use random::{max_width, random_diagram, random_gate, GateSource, GenConfig};

/// Photon polarisation. `H` is horizontal (→), `V` vertical (↑).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Polarisation {
    H,
    V,
}

impl Polarisation {
    pub fn flip(self) -> Self {
        match self {
            Polarisation::H => Polarisation::V,
            Polarisation::V => Polarisation::H,
        }
    }

    pub fn bit(self) -> usize {
        match self {
            Polarisation::H => 0,
            Polarisation::V => 1,
        }
    }

    pub fn from_bit(b: usize) -> Self {
        if b == 0 {
            Polarisation::H
        } else {
            Polarisation::V
        }
    }

    pub fn arrow(self) -> &'static str {
        match self {
            Polarisation::H => "→",
            Polarisation::V => "↑",
        }
    }
}

impl fmt::Display for Polarisation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.arrow())
    }
}

impl std::str::FromStr for Polarisation {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "H" | "h" | "→" | "->" | "horizontal" => Ok(Polarisation::H),
            "V" | "v" | "↑" | "^" | "vertical" => Ok(Polarisation::V),
            _ => Err(format!("unknown polarisation `{s}`")),
        }
    }
}

/// A diagram term. `Compose(after, before)` applies `before` first.
#[derive(Debug, Clone, PartialEq)]
pub enum Diagram {
    Empty,
    Wire,
    Neg,
    Swap,
    Pbs,
    Gate(GateElement),
    Compose(Box<Diagram>, Box<Diagram>),
    Tensor(Box<Diagram>, Box<Diagram>),
    Trace(Box<Diagram>),
}

/// Child indices from the root: `Compose` has `0 = after`, `1 = before`;
/// `Tensor` has `0 = top`, `1 = bottom`; `Trace` has `0`.
pub type NodePath = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("arity {left} vs {right} in composition at {path:?}")]
    IllTyped { path: NodePath, left: usize, right: usize },
    #[error("trace of an arity-0 diagram at {path:?}")]
    EmptyTrace { path: NodePath },
    #[error("controlled permutation needs n >= 3, got {0}")]
    ArityTooSmall(usize),
    #[error("expected {expected} gates, got {found}")]
    GateCount { expected: usize, found: usize },
}

impl Diagram {
    pub fn gate(g: GateElement) -> Self {
        Diagram::Gate(g)
    }

    pub fn sym(name: &str) -> Self {
        Diagram::Gate(GateElement::symbol(name))
    }

    /// `after ∘ before`.
    pub fn compose(after: Diagram, before: Diagram) -> Self {
        Diagram::Compose(Box::new(after), Box::new(before))
    }

    /// Dataflow sequencing: `first` then `then`.
    pub fn then(self, then: Diagram) -> Self {
        Diagram::compose(then, self)
    }

    pub fn tensor(top: Diagram, bottom: Diagram) -> Self {
        Diagram::Tensor(Box::new(top), Box::new(bottom))
    }

    pub fn trace(inner: Diagram) -> Self {
        Diagram::Trace(Box::new(inner))
    }

    /// Sequence in dataflow order; an empty list gives `Empty`.
    pub fn seq<I: IntoIterator<Item = Diagram>>(items: I) -> Self {
        let mut it = items.into_iter();
        let first = it.next().unwrap_or(Diagram::Empty);
        it.fold(first, Diagram::then)
    }

    /// Parallel composition from top to bottom; an empty list gives `Empty`.
    pub fn par<I: IntoIterator<Item = Diagram>>(items: I) -> Self {
        let mut it = items.into_iter();
        let first = it.next().unwrap_or(Diagram::Empty);
        it.fold(first, Diagram::tensor)
    }

    /// `n` parallel wires.
    pub fn wires(n: usize) -> Self {
        Diagram::par(std::iter::repeat_n(Diagram::Wire, n))
    }

    /// The arity, or the first typing error found in preorder.
    pub fn arity(&self) -> Result<usize, DiagramError> {
        let mut path = Vec::new();
        arity_at(self, &mut path)
    }

    /// Every typing error of the term.
    pub fn validate(&self) -> Result<(), Vec<DiagramError>> {
        let mut errors = Vec::new();
        collect_errors(self, &mut Vec::new(), &mut errors);
        if errors.is_empty() {
            Ok(())
        } else {
            Err(errors)
        }
    }

    pub fn children(&self) -> Vec<&Diagram> {
        match self {
            Diagram::Compose(a, b) | Diagram::Tensor(a, b) => vec![a, b],
            Diagram::Trace(a) => vec![a],
            _ => Vec::new(),
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Diagram> {
        let mut node = self;
        for &i in path {
            node = *node.children().get(i)?;
        }
        Some(node)
    }

    /// Gate occurrences with their paths, in preorder.
    pub fn gates(&self) -> Vec<(NodePath, &GateElement)> {
        let mut out = Vec::new();
        fn walk<'a>(d: &'a Diagram, path: &mut NodePath, out: &mut Vec<(NodePath, &'a GateElement)>) {
            if let Diagram::Gate(g) = d {
                out.push((path.clone(), g));
            }
            for (i, c) in d.children().into_iter().enumerate() {
                path.push(i);
                walk(c, path, out);
                path.pop();
            }
        }
        walk(self, &mut Vec::new(), &mut out);
        out
    }

    pub fn count_traces(&self) -> usize {
        usize::from(matches!(self, Diagram::Trace(_)))
            + self.children().into_iter().map(Diagram::count_traces).sum::<usize>()
    }

    /// Number of generator leaves, `Empty` excluded.
    pub fn generator_count(&self) -> usize {
        match self {
            Diagram::Empty => 0,
            Diagram::Wire | Diagram::Neg | Diagram::Swap | Diagram::Pbs | Diagram::Gate(_) => 1,
            _ => self.children().into_iter().map(Diagram::generator_count).sum(),
        }
    }

    /// Applies `f` to every gate label.
    pub fn map_gates(&self, f: &mut dyn FnMut(&GateElement) -> GateElement) -> Diagram {
        match self {
            Diagram::Gate(g) => Diagram::Gate(f(g)),
            Diagram::Compose(a, b) => Diagram::compose(a.map_gates(f), b.map_gates(f)),
            Diagram::Tensor(a, b) => Diagram::tensor(a.map_gates(f), b.map_gates(f)),
            Diagram::Trace(a) => Diagram::trace(a.map_gates(f)),
            other => other.clone(),
        }
    }

    /// True iff every gate is numeric or a fully annotated word.
    pub fn is_numeric(&self) -> bool {
        self.gates()
            .iter()
            .all(|(_, g)| g.collapsed().is_numeric() || g.is_identity())
    }
}

fn arity_at(d: &Diagram, path: &mut NodePath) -> Result<usize, DiagramError> {
    match d {
        Diagram::Empty => Ok(0),
        Diagram::Wire | Diagram::Neg | Diagram::Gate(_) => Ok(1),
        Diagram::Swap | Diagram::Pbs => Ok(2),
        Diagram::Compose(a, b) => {
            path.push(0);
            let l = arity_at(a, path)?;
            path.pop();
            path.push(1);
            let r = arity_at(b, path)?;
            path.pop();
            if l != r {
                return Err(DiagramError::IllTyped {
                    path: path.clone(),
                    left: l,
                    right: r,
                });
            }
            Ok(l)
        }
        Diagram::Tensor(a, b) => {
            path.push(0);
            let l = arity_at(a, path)?;
            path.pop();
            path.push(1);
            let r = arity_at(b, path)?;
            path.pop();
            Ok(l + r)
        }
        Diagram::Trace(a) => {
            path.push(0);
            let k = arity_at(a, path)?;
            path.pop();
            if k == 0 {
                return Err(DiagramError::EmptyTrace { path: path.clone() });
            }
            Ok(k - 1)
        }
    }
}

/// Returns the arity if the subtree is well typed, recording every error.
fn collect_errors(d: &Diagram, path: &mut NodePath, errors: &mut Vec<DiagramError>) -> Option<usize> {
    let mut child = |i: usize, c: &Diagram, errors: &mut Vec<DiagramError>| {
        path.push(i);
        let r = collect_errors(c, path, errors);
        path.pop();
        r
    };
    match d {
        Diagram::Empty => Some(0),
        Diagram::Wire | Diagram::Neg | Diagram::Gate(_) => Some(1),
        Diagram::Swap | Diagram::Pbs => Some(2),
        Diagram::Compose(a, b) => {
            let l = child(0, a, errors);
            let r = child(1, b, errors);
            match (l, r) {
                (Some(l), Some(r)) if l == r => Some(l),
                (Some(l), Some(r)) => {
                    errors.push(DiagramError::IllTyped {
                        path: path.clone(),
                        left: l,
                        right: r,
                    });
                    None
                }
                _ => None,
            }
        }
        Diagram::Tensor(a, b) => {
            let l = child(0, a, errors);
            let r = child(1, b, errors);
            Some(l? + r?)
        }
        Diagram::Trace(a) => match child(0, a, errors) {
            Some(0) => {
                errors.push(DiagramError::EmptyTrace { path: path.clone() });
                None
            }
            Some(k) => Some(k - 1),
            None => None,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generator_arities() {
        assert_eq!(Diagram::Pbs.arity(), Ok(2));
        assert_eq!(Diagram::Empty.arity(), Ok(0));
        assert_eq!(
            Diagram::trace(Diagram::tensor(Diagram::Wire, Diagram::Swap)).arity(),
            Ok(2)
        );
    }

    #[test]
    fn ill_typed_composition_is_located() {
        let d = Diagram::compose(Diagram::Wire, Diagram::Swap);
        let errs = d.validate().unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].to_string().contains("arity 1 vs 2"));
        let nested = Diagram::tensor(Diagram::Wire, Diagram::compose(Diagram::Wire, Diagram::Swap));
        assert_eq!(
            nested.arity(),
            Err(DiagramError::IllTyped {
                path: vec![1],
                left: 1,
                right: 2
            })
        );
    }

    #[test]
    fn trace_of_wire_has_arity_zero() {
        let d = Diagram::trace(Diagram::Wire);
        assert!(d.validate().is_ok());
        assert_eq!(d.arity(), Ok(0));
        assert!(Diagram::trace(Diagram::Empty).validate().is_err());
    }

    #[test]
    fn builders_are_well_typed() {
        let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
        assert!(qs.validate().is_ok());
        assert_eq!(qs.arity(), Ok(1));
    }

    #[test]
    fn polarisation_flip_is_involution() {
        for c in [Polarisation::H, Polarisation::V] {
            assert_eq!(c.flip().flip(), c);
            assert_ne!(c.flip(), c);
        }
    }

    #[test]
    fn seq_and_par_helpers() {
        let d = Diagram::seq([Diagram::Neg, Diagram::sym("U")]);
        assert_eq!(d, Diagram::compose(Diagram::sym("U"), Diagram::Neg));
        assert_eq!(Diagram::wires(3).arity(), Ok(3));
        assert_eq!(Diagram::wires(0), Diagram::Empty);
    }
}
