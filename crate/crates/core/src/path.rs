//! Path semantics: the big-step relation `(D, c, p) ⇒U (c', p')` that follows
//! a single photon through a diagram, and the routed map it induces.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::diagram::{Diagram, DiagramError, Flat, GateElement, GateError, NodePath, Polarisation};

/// A classical input or output: polarisation and wire position.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Config {
    pub pol: Polarisation,
    pub pos: usize,
}

impl Config {
    pub fn new(pol: Polarisation, pos: usize) -> Self {
        Config { pol, pos }
    }

    /// Position in the state order `(H,0), (V,0), (H,1), …`.
    pub fn index(self) -> usize {
        2 * self.pos + self.pol.bit()
    }

    pub fn from_index(i: usize) -> Self {
        Config {
            pol: Polarisation::from_bit(i % 2),
            pos: i / 2,
        }
    }

    /// All `2n` configurations in state order.
    pub fn all(n: usize) -> impl Iterator<Item = Config> {
        (0..2 * n).map(Config::from_index)
    }
}

impl PartialOrd for Config {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Config {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.index().cmp(&other.index())
    }
}

impl fmt::Display for Config {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.pol, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PathError {
    #[error("position {pos} out of range for arity {arity}")]
    InvalidPosition { pos: usize, arity: usize },
    #[error("trace at {0:?} traversed more than twice")]
    InternalTraceBound(NodePath),
    #[error("ill-typed diagram: {0}")]
    IllTyped(#[from] DiagramError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("path outputs are not a permutation")]
    NotBijective,
}

/// Result of evaluating one configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PathResult {
    pub out: Config,
    pub accumulated: GateElement,
    /// One entry per execution of a trace node: its path and how many times
    /// the loop wire was fed back.
    pub trace_counts: Vec<(NodePath, usize)>,
    /// Paths of the gate occurrences traversed, in order.
    pub visited_gates: Vec<NodePath>,
}

struct Walker {
    acc: GateElement,
    trace_counts: Vec<(NodePath, usize)>,
    visited: Vec<NodePath>,
}

impl Walker {
    fn eval(&mut self, d: &Diagram, c: Polarisation, p: usize, path: &mut NodePath) -> Result<Config, PathError> {
        Ok(match d {
            Diagram::Empty => unreachable!("no configuration enters an empty diagram"),
            Diagram::Wire => Config::new(c, p),
            Diagram::Neg => Config::new(c.flip(), p),
            Diagram::Swap => Config::new(c, 1 - p),
            Diagram::Pbs => match c {
                Polarisation::H => Config::new(c, p),
                Polarisation::V => Config::new(c, 1 - p),
            },
            Diagram::Gate(g) => {
                self.acc = g.mul(&self.acc)?;
                self.visited.push(path.clone());
                Config::new(c, p)
            }
            Diagram::Compose(after, before) => {
                path.push(1);
                let mid = self.eval(before, c, p, path)?;
                path.pop();
                path.push(0);
                let out = self.eval(after, mid.pol, mid.pos, path)?;
                path.pop();
                out
            }
            Diagram::Tensor(top, bottom) => {
                let na = top.arity()?;
                if p < na {
                    path.push(0);
                    let out = self.eval(top, c, p, path)?;
                    path.pop();
                    out
                } else {
                    path.push(1);
                    let out = self.eval(bottom, c, p - na, path)?;
                    path.pop();
                    Config::new(out.pol, out.pos + na)
                }
            }
            Diagram::Trace(inner) => {
                let n = inner.arity()? - 1;
                path.push(0);
                let mut cur = self.eval(inner, c, p, path)?;
                let mut k = 0;
                while cur.pos == n {
                    k += 1;
                    if k > 2 {
                        path.pop();
                        return Err(PathError::InternalTraceBound(path.clone()));
                    }
                    cur = self.eval(inner, cur.pol, n, path)?;
                }
                path.pop();
                self.trace_counts.push((path.clone(), k));
                cur
            }
        })
    }
}

/// Evaluates the path of input `(c, p)`.
pub fn eval_path(d: &Diagram, c: Polarisation, p: usize) -> Result<PathResult, PathError> {
    let arity = d.arity()?;
    if p >= arity {
        return Err(PathError::InvalidPosition { pos: p, arity });
    }
    let mut w = Walker {
        acc: GateElement::one(),
        trace_counts: Vec::new(),
        visited: Vec::new(),
    };
    let out = w.eval(d, c, p, &mut Vec::new())?;
    Ok(PathResult {
        out,
        accumulated: w.acc,
        trace_counts: w.trace_counts,
        visited_gates: w.visited,
    })
}

/// The semantic object of a diagram: a permutation of configurations and
/// one gate element per input configuration, both indexed in state order.
#[derive(Debug, Clone, PartialEq)]
pub struct RoutedMap {
    pub n: usize,
    pub tau: Vec<Config>,
    pub table: Vec<GateElement>,
}

impl RoutedMap {
    pub fn identity(n: usize) -> Self {
        RoutedMap {
            n,
            tau: Config::all(n).collect(),
            table: vec![GateElement::one(); 2 * n],
        }
    }

    pub fn tau_of(&self, c: Config) -> Config {
        self.tau[c.index()]
    }

    pub fn entry(&self, c: Config) -> &GateElement {
        &self.table[c.index()]
    }

    pub fn is_bijective(&self) -> bool {
        let set: BTreeSet<Config> = self.tau.iter().copied().collect();
        set.len() == 2 * self.n && self.tau.iter().all(|c| c.pos < self.n)
    }

    /// `τ⁻¹` in state order.
    pub fn inverse_tau(&self) -> Vec<Config> {
        let mut inv = vec![Config::new(Polarisation::H, 0); 2 * self.n];
        for (i, t) in self.tau.iter().enumerate() {
            inv[t.index()] = Config::from_index(i);
        }
        inv
    }

    /// The first input configuration at which the two maps differ, with a
    /// description of the difference.
    pub fn first_difference(&self, other: &RoutedMap, tol: f64) -> Result<Option<(Config, String)>, GateError> {
        if self.n != other.n {
            return Ok(Some((
                Config::new(Polarisation::H, 0),
                format!("arity {} vs {}", self.n, other.n),
            )));
        }
        for c in Config::all(self.n) {
            let (a, b) = (self.tau_of(c), other.tau_of(c));
            if a != b {
                return Ok(Some((c, format!("routes to {a} vs {b}"))));
            }
            if !self.entry(c).equals(other.entry(c), tol)? {
                return Ok(Some((c, format!("matrix {} vs {}", self.entry(c), other.entry(c)))));
            }
        }
        Ok(None)
    }

    /// Exact equality of `τ`, gate equality at `tol`.
    pub fn equals(&self, other: &RoutedMap, tol: f64) -> Result<bool, GateError> {
        Ok(self.first_difference(other, tol)?.is_none())
    }

    /// Collapses every fully annotated word to its matrix.
    pub fn collapsed(&self) -> RoutedMap {
        RoutedMap {
            n: self.n,
            tau: self.tau.clone(),
            table: self.table.iter().map(GateElement::collapsed).collect(),
        }
    }
}

impl fmt::Display for RoutedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in Config::all(self.n) {
            writeln!(f, "{} ↦ {} : {}", c, self.tau_of(c), self.entry(c))?;
        }
        Ok(())
    }
}

/// Evaluates all `2n` configurations and checks that `τ` is a bijection.
pub fn routed_map(d: &Diagram) -> Result<RoutedMap, PathError> {
    let n = d.arity()?;
    let mut tau = Vec::with_capacity(2 * n);
    let mut table = Vec::with_capacity(2 * n);
    for c in Config::all(n) {
        let r = eval_path(d, c.pol, c.pos)?;
        tau.push(r.out);
        table.push(r.accumulated);
    }
    let m = RoutedMap { n, tau, table };
    if !m.is_bijective() {
        return Err(PathError::NotBijective);
    }
    Ok(m)
}

pub fn routed_map_flat(f: &Flat) -> Result<RoutedMap, PathError> {
    routed_map(&f.to_diagram())
}

/// The configuration whose path ends at `(c, p)`, with its matrix.
pub fn invert_path(d: &Diagram, c: Polarisation, p: usize) -> Result<(Config, GateElement), PathError> {
    let m = routed_map(d)?;
    if p >= m.n {
        return Err(PathError::InvalidPosition { pos: p, arity: m.n });
    }
    let src = m.inverse_tau()[Config::new(c, p).index()];
    Ok((src, m.entry(src).clone()))
}

/// For every gate occurrence, the input configurations whose paths traverse it.
pub fn gate_usage(d: &Diagram) -> Result<BTreeMap<NodePath, BTreeSet<Config>>, PathError> {
    let n = d.arity()?;
    let mut usage: BTreeMap<NodePath, BTreeSet<Config>> =
        d.gates().into_iter().map(|(p, _)| (p, BTreeSet::new())).collect();
    for c in Config::all(n) {
        for g in eval_path(d, c.pol, c.pos)?.visited_gates {
            usage.entry(g).or_default().insert(c);
        }
    }
    Ok(usage)
}

/// Largest trace traversal count over all paths of `d` (0 without traces).
pub fn max_trace_count(d: &Diagram) -> Result<usize, PathError> {
    let n = d.arity()?;
    let mut best = 0;
    for c in Config::all(n) {
        let r = eval_path(d, c.pol, c.pos)?;
        best = r.trace_counts.iter().map(|(_, k)| *k).fold(best, usize::max);
    }
    Ok(best)
}
