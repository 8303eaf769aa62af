//! PBS-diagrams: a graphical language for coherently controlled quantum
//! operations built from polarising beam splitters, polarisation flips,
//! gates, wires and feedback loops.
//!
//! The crate provides the typed syntax ([`diagram`]), the path and
//! denotational semantics ([`path`], [`denot`]), the equational theory as
//! rewrite rules ([`rules`]), canonical forms and equivalence
//! ([`canonical`]), loop unrolling ([`unroll`]) and a small textual
//! language with renderers ([`frontend`]).

pub mod canonical;
pub mod denot;
pub mod diagram;
pub mod frontend;
pub mod linalg;
pub mod path;
pub mod rules;
pub mod unroll;

pub use diagram::{flatten, Diagram, Flat, GateElement, Polarisation};
pub use linalg::CMatrix;
pub use path::{eval_path, routed_map, Config, PathResult, RoutedMap};
