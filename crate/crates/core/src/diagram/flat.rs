//! Flattened diagrams: n-ary sequential and parallel composition with units
//! absorbed, so that associativity and unit laws hold on the nose.

use super::{Diagram, GateElement};

/// A flattened diagram. `Seq` lists layers in dataflow order and has at
/// least two non-identity layers; `Par` lists at least two components of
/// nonzero arity from top to bottom, none of them a `Par`.
#[derive(Debug, Clone, PartialEq)]
pub enum Flat {
    Empty,
    Wire,
    Neg,
    Swap,
    Pbs,
    Gate(GateElement),
    Seq(Vec<Flat>),
    Par(Vec<Flat>),
    Trace(Box<Flat>),
}

impl Flat {
    pub fn arity(&self) -> usize {
        match self {
            Flat::Empty => 0,
            Flat::Wire | Flat::Neg | Flat::Gate(_) => 1,
            Flat::Swap | Flat::Pbs => 2,
            Flat::Seq(items) => items[0].arity(),
            Flat::Par(items) => items.iter().map(Flat::arity).sum(),
            Flat::Trace(inner) => inner.arity() - 1,
        }
    }

    /// The canonical identity on `n` wires.
    pub fn identity(n: usize) -> Flat {
        match n {
            0 => Flat::Empty,
            1 => Flat::Wire,
            _ => Flat::Par(vec![Flat::Wire; n]),
        }
    }

    /// True for `Empty`, `Wire` and parallel wires.
    pub fn is_identity(&self) -> bool {
        match self {
            Flat::Empty | Flat::Wire => true,
            Flat::Par(items) => items.iter().all(Flat::is_identity),
            Flat::Seq(items) => items.iter().all(Flat::is_identity),
            _ => false,
        }
    }

    /// Smart sequential constructor on `n` wires: splices nested sequences and
    /// drops identity layers.
    pub fn seq(items: Vec<Flat>, n: usize) -> Flat {
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it {
                Flat::Seq(inner) => out.extend(inner),
                x if x.is_identity() => {}
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Flat::identity(n),
            1 => out.pop().unwrap(),
            _ => Flat::Seq(out),
        }
    }

    /// Smart parallel constructor: splices nested `Par` and drops `Empty`.
    pub fn par(items: Vec<Flat>) -> Flat {
        let mut out = Vec::with_capacity(items.len());
        for it in items {
            match it {
                Flat::Par(inner) => out.extend(inner),
                Flat::Empty => {}
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Flat::Empty,
            1 => out.pop().unwrap(),
            _ => Flat::Par(out),
        }
    }

    pub fn trace(inner: Flat) -> Flat {
        Flat::Trace(Box::new(inner))
    }

    /// Re-applies the smart constructors bottom-up.
    pub fn normalize(self) -> Flat {
        match self {
            Flat::Seq(items) => {
                let n = items.first().map_or(0, Flat::arity);
                Flat::seq(items.into_iter().map(Flat::normalize).collect(), n)
            }
            Flat::Par(items) => Flat::par(items.into_iter().map(Flat::normalize).collect()),
            Flat::Trace(inner) => Flat::trace(inner.normalize()),
            other => other,
        }
    }

    /// Layers of a sequence; any other node is a single layer.
    pub fn layers(&self) -> &[Flat] {
        match self {
            Flat::Seq(items) => items,
            other => std::slice::from_ref(other),
        }
    }

    /// Components of a parallel node; any other node is a single component.
    pub fn components(&self) -> &[Flat] {
        match self {
            Flat::Par(items) => items,
            other => std::slice::from_ref(other),
        }
    }

    pub fn children(&self) -> &[Flat] {
        match self {
            Flat::Seq(items) | Flat::Par(items) => items,
            Flat::Trace(inner) => std::slice::from_ref(inner.as_ref()),
            _ => &[],
        }
    }

    pub fn children_mut(&mut self) -> &mut [Flat] {
        match self {
            Flat::Seq(items) | Flat::Par(items) => items,
            Flat::Trace(inner) => std::slice::from_mut(inner.as_mut()),
            _ => &mut [],
        }
    }

    pub fn at(&self, path: &[usize]) -> Option<&Flat> {
        let mut node = self;
        for &i in path {
            node = node.children().get(i)?;
        }
        Some(node)
    }

    pub fn at_mut(&mut self, path: &[usize]) -> Option<&mut Flat> {
        let mut node = self;
        for &i in path {
            node = node.children_mut().get_mut(i)?;
        }
        Some(node)
    }

    /// Rebuilds a binary term; `flatten` maps it back to `self`.
    pub fn to_diagram(&self) -> Diagram {
        match self {
            Flat::Empty => Diagram::Empty,
            Flat::Wire => Diagram::Wire,
            Flat::Neg => Diagram::Neg,
            Flat::Swap => Diagram::Swap,
            Flat::Pbs => Diagram::Pbs,
            Flat::Gate(g) => Diagram::Gate(g.clone()),
            Flat::Seq(items) => Diagram::seq(items.iter().map(Flat::to_diagram)),
            Flat::Par(items) => Diagram::par(items.iter().map(Flat::to_diagram)),
            Flat::Trace(inner) => Diagram::trace(inner.to_diagram()),
        }
    }

    pub fn count_traces(&self) -> usize {
        usize::from(matches!(self, Flat::Trace(_))) + self.children().iter().map(Flat::count_traces).sum::<usize>()
    }

    pub fn gates(&self) -> Vec<&GateElement> {
        let mut out = Vec::new();
        fn walk<'a>(f: &'a Flat, out: &mut Vec<&'a GateElement>) {
            if let Flat::Gate(g) = f {
                out.push(g);
            }
            for c in f.children() {
                walk(c, out);
            }
        }
        walk(self, &mut out);
        out
    }

    pub fn generator_count(&self) -> usize {
        match self {
            Flat::Empty => 0,
            Flat::Wire | Flat::Neg | Flat::Swap | Flat::Pbs | Flat::Gate(_) => 1,
            _ => self.children().iter().map(Flat::generator_count).sum(),
        }
    }
}

/// Flattens a well-typed diagram.
pub fn flatten(d: &Diagram) -> Flat {
    match d {
        Diagram::Empty => Flat::Empty,
        Diagram::Wire => Flat::Wire,
        Diagram::Neg => Flat::Neg,
        Diagram::Swap => Flat::Swap,
        Diagram::Pbs => Flat::Pbs,
        Diagram::Gate(g) => Flat::Gate(g.clone()),
        Diagram::Compose(after, before) => {
            let b = flatten(before);
            let n = b.arity();
            Flat::seq(vec![b, flatten(after)], n)
        }
        Diagram::Tensor(top, bottom) => Flat::par(vec![flatten(top), flatten(bottom)]),
        Diagram::Trace(inner) => Flat::trace(flatten(inner)),
    }
}
