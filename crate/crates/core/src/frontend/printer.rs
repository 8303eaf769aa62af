//! Pretty-printer producing `.pbs` text. Parentheses appear only where the
//! grammar needs them and around parallel blocks inside a sequence.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;

use crate::canonical::CanonicalForm;
use crate::diagram::{flatten, Diagram, Flat, GateElement, Symbol, IDENTITY_NAME};
use crate::linalg::{mat_eq, CMatrix};

/// Printing context: how each gate is named.
#[derive(Default)]
struct Names {
    symbols: BTreeMap<String, Option<CMatrix>>,
    order: Vec<String>,
    numeric: Vec<(String, CMatrix)>,
}

impl Names {
    fn collect(flats: &[&Flat]) -> Self {
        let mut names = Names::default();
        for f in flats {
            for g in f.gates() {
                if let GateElement::Word(w) = g {
                    for s in w.iter().filter(|s| !s.is_identity()) {
                        if !names.symbols.contains_key(&s.name) {
                            names.order.push(s.name.clone());
                            names.symbols.insert(s.name.clone(), s.matrix.clone());
                        }
                    }
                }
            }
        }
        let mut counter = 0;
        for f in flats {
            for g in f.gates() {
                if let GateElement::Numeric(m) = g {
                    if names.numeric_name(m).is_some() {
                        continue;
                    }
                    let fresh = loop {
                        let candidate = format!("g{counter}");
                        counter += 1;
                        if !names.symbols.contains_key(&candidate) {
                            break candidate;
                        }
                    };
                    names.numeric.push((fresh, m.clone()));
                }
            }
        }
        names
    }

    fn numeric_name(&self, m: &CMatrix) -> Option<&str> {
        self.numeric
            .iter()
            .find(|(_, n)| n.rows() == m.rows() && mat_eq(n, m, 0.0).unwrap_or(false))
            .map(|(name, _)| name.as_str())
    }

    fn bindings(&self) -> String {
        let mut out = String::new();
        for name in &self.order {
            match &self.symbols[name] {
                Some(m) => out += &format!("let {name} = {}\n", print_matrix(m)),
                None => out += &format!("sym {name}\n"),
            }
        }
        for (name, m) in &self.numeric {
            out += &format!("let {name} = {}\n", print_matrix(m));
        }
        out
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Level {
    /// Top level or a trace body: no parentheses needed.
    Expr,
    /// A layer of a sequence: parallel blocks are parenthesised for
    /// readability.
    Layer,
    /// A component of a parallel block: sequences need parentheses.
    Term,
}

fn gate_text(g: &GateElement, names: &Names) -> (String, bool) {
    match g {
        GateElement::Numeric(m) => (
            format!("gate {}", names.numeric_name(m).expect("numeric gate was collected")),
            false,
        ),
        GateElement::Word(w) if w.is_empty() => (format!("gate {IDENTITY_NAME}"), false),
        GateElement::Word(w) => {
            let parts: Vec<String> = w.iter().rev().map(|s: &Symbol| format!("gate {}", s.name)).collect();
            (parts.join(" ; "), parts.len() > 1)
        }
    }
}

fn write_flat(f: &Flat, level: Level, names: &Names, out: &mut String) {
    let wrap = |is_seq: bool| is_seq && level == Level::Term;
    match f {
        Flat::Empty => out.push_str("empty"),
        Flat::Wire => out.push_str("id"),
        Flat::Neg => out.push_str("neg"),
        Flat::Swap => out.push_str("swap"),
        Flat::Pbs => out.push_str("pbs"),
        Flat::Gate(g) => {
            let (text, is_seq) = gate_text(g, names);
            if wrap(is_seq) {
                out.push('(');
                out.push_str(&text);
                out.push(')');
            } else {
                out.push_str(&text);
            }
        }
        Flat::Seq(items) => {
            let paren = wrap(true);
            if paren {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" ; ");
                }
                write_flat(item, Level::Layer, names, out);
            }
            if paren {
                out.push(')');
            }
        }
        Flat::Par(items) => {
            let paren = level == Level::Layer;
            if paren {
                out.push('(');
            }
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(" & ");
                }
                write_flat(item, Level::Term, names, out);
            }
            if paren {
                out.push(')');
            }
        }
        Flat::Trace(inner) => {
            out.push_str("tr( ");
            write_flat(inner, Level::Expr, names, out);
            out.push_str(" )");
        }
    }
}

/// The expression text of a flattened diagram. Anonymous numeric gates are
/// named `g0`, `g1`, … in order of first occurrence.
pub fn print_flat(f: &Flat) -> String {
    let names = Names::collect(&[f]);
    let mut out = String::new();
    write_flat(f, Level::Expr, &names, &mut out);
    out
}

/// The expression text of `d`, e.g. `neg ; neg`.
pub fn print(d: &Diagram) -> String {
    print_flat(&flatten(d))
}

/// A complete module: the bindings `d` needs followed by `def name = …`.
/// Parsing the result yields a diagram with the same flattening, except
/// that anonymous numeric gates come back as named annotated gates and
/// multi-symbol words come back as sequences of single gates.
pub fn print_module(d: &Diagram, name: &str) -> String {
    print_definitions(&[(name, d)])
}

fn print_definitions(defs: &[(&str, &Diagram)]) -> String {
    let flats: Vec<Flat> = defs.iter().map(|(_, d)| flatten(d)).collect();
    let refs: Vec<&Flat> = flats.iter().collect();
    let names = Names::collect(&refs);
    let mut out = names.bindings();
    for ((name, _), f) in defs.iter().zip(&flats) {
        let mut body = String::new();
        write_flat(f, Level::Expr, &names, &mut body);
        out += &format!("def {name} = {body}\n");
    }
    out
}

/// Text for a canonical form: a header listing the filter table, then the
/// definitions `filters`, `routing` and `canonical = filters ; routing`.
pub fn print_canonical(cf: &CanonicalForm) -> String {
    let mut header = format!("# canonical form on {} wire(s)\n", cf.n);
    for (p, (u, v)) in cf.filters.iter().enumerate() {
        header += &format!("# wire {p}: H collects {u}, V collects {v}\n");
    }
    let filters = Diagram::par(
        cf.filters
            .iter()
            .map(|(u, v)| crate::diagram::filter_builder(u.clone(), v.clone())),
    );
    let canonical = cf.as_diagram();
    header
        + &print_definitions(&[
            ("filters", &filters),
            ("routing", &cf.routing),
            ("canonical", &canonical),
        ])
}

/// Shortest round-trip text of a complex number, e.g. `0.5-2i`.
pub fn format_complex(z: Complex64) -> String {
    if z.im == 0.0 && !z.im.is_sign_negative() {
        return format!("{}", z.re);
    }
    let sign = if z.im.is_sign_negative() { '-' } else { '+' };
    format!("{}{}{}i", z.re, sign, z.im.abs())
}

/// A matrix literal `[[a, b], [c, d]]`.
pub fn print_matrix(m: &CMatrix) -> String {
    let rows: Vec<String> = (0..m.rows())
        .map(|r| {
            let cells: Vec<String> = m.row(r).iter().map(|&z| format_complex(z)).collect();
            format!("[{}]", cells.join(", "))
        })
        .collect();
    format!("[{}]", rows.join(", "))
}

impl fmt::Display for Flat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print_flat(self))
    }
}

impl fmt::Display for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&print(self))
    }
}
