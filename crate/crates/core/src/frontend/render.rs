//! DOT and TikZ renderers. Both draw the same graph: wires flow left to
//! right, beam splitters are diamonds, gates are boxes, negations are small
//! circles, swaps are just crossing edges and every trace contributes one
//! dashed back edge into its feedback point.

use std::fmt::Write;

use crate::diagram::{flatten, Diagram, Flat, GateElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderFormat {
    Dot,
    Tikz,
}

impl std::str::FromStr for RenderFormat {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "dot" => Ok(RenderFormat::Dot),
            "tikz" => Ok(RenderFormat::Tikz),
            other => Err(format!("unknown render format `{other}` (expected dot or tikz)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Shape {
    Input,
    Output,
    Pbs,
    Gate,
    Neg,
    Feedback,
}

struct Node {
    id: String,
    shape: Shape,
    label: String,
    x: usize,
    y: usize,
}

#[derive(Clone)]
struct Port {
    node: usize,
    compass: Option<&'static str>,
}

struct Edge {
    from: Port,
    to: Port,
    back: bool,
}

#[derive(Default)]
struct Graph {
    nodes: Vec<Node>,
    edges: Vec<Edge>,
    column: usize,
    counters: [usize; 6],
}

impl Graph {
    fn node(&mut self, shape: Shape, label: String, y: usize) -> usize {
        let prefix = match shape {
            Shape::Input => "in",
            Shape::Output => "out",
            Shape::Pbs => "pbs",
            Shape::Gate => "gate",
            Shape::Neg => "neg",
            Shape::Feedback => "tr",
        };
        let k = &mut self.counters[shape as usize];
        let id = format!("{prefix}{k}");
        *k += 1;
        let x = match shape {
            Shape::Input => 0,
            Shape::Output => usize::MAX,
            _ => {
                self.column += 1;
                self.column
            }
        };
        self.nodes.push(Node { id, shape, label, x, y });
        self.nodes.len() - 1
    }

    fn edge(&mut self, from: Port, to: Port) {
        self.edges.push(Edge { from, to, back: false });
    }

    fn at(node: usize, compass: Option<&'static str>) -> Port {
        Port { node, compass }
    }

    /// Draws `f` with its inputs attached to `ins` (top to bottom, starting
    /// at wire `y`) and returns its output ports.
    fn walk(&mut self, f: &Flat, ins: Vec<Port>, y: usize) -> Vec<Port> {
        match f {
            Flat::Empty | Flat::Wire => ins,
            Flat::Swap => vec![ins[1].clone(), ins[0].clone()],
            Flat::Neg => {
                let n = self.node(Shape::Neg, "¬".into(), y);
                self.edge(ins[0].clone(), Self::at(n, None));
                vec![Self::at(n, None)]
            }
            Flat::Gate(g) => {
                let n = self.node(Shape::Gate, gate_label(g), y);
                self.edge(ins[0].clone(), Self::at(n, None));
                vec![Self::at(n, None)]
            }
            Flat::Pbs => {
                let n = self.node(Shape::Pbs, String::new(), y);
                self.edge(ins[0].clone(), Self::at(n, Some("nw")));
                self.edge(ins[1].clone(), Self::at(n, Some("sw")));
                vec![Self::at(n, Some("ne")), Self::at(n, Some("se"))]
            }
            Flat::Seq(items) => items.iter().fold(ins, |ports, item| self.walk(item, ports, y)),
            Flat::Par(items) => {
                let mut outs = Vec::with_capacity(ins.len());
                let mut offset = 0;
                for item in items {
                    let k = item.arity();
                    outs.extend(self.walk(item, ins[offset..offset + k].to_vec(), y + offset));
                    offset += k;
                }
                outs
            }
            Flat::Trace(inner) => {
                let k = ins.len();
                let point = self.node(Shape::Feedback, String::new(), y + k);
                let mut ports = ins;
                ports.push(Self::at(point, None));
                let mut outs = self.walk(inner, ports, y);
                let last = outs.pop().expect("trace body has a wire");
                self.edges.push(Edge {
                    from: last,
                    to: Self::at(point, None),
                    back: true,
                });
                outs
            }
        }
    }
}

fn gate_label(g: &GateElement) -> String {
    match g {
        GateElement::Numeric(m) => format!("{}×{} matrix", m.rows(), m.cols()),
        GateElement::Word(_) => g.to_string(),
    }
}

fn build(d: &Diagram) -> Graph {
    let f = flatten(d);
    let n = f.arity();
    let mut g = Graph::default();
    let ins: Vec<Port> = (0..n)
        .map(|p| {
            let id = g.node(Shape::Input, format!("in {p}"), p);
            Graph::at(id, None)
        })
        .collect();
    let outs = g.walk(&f, ins, 0);
    for (p, port) in outs.into_iter().enumerate() {
        let id = g.node(Shape::Output, format!("out {p}"), p);
        g.edge(port, Graph::at(id, None));
    }
    let last = g.column + 1;
    for node in &mut g.nodes {
        if node.x == usize::MAX {
            node.x = last;
        }
    }
    g
}

fn dot_port(g: &Graph, p: &Port) -> String {
    match p.compass {
        Some(c) => format!("{}:{c}", g.nodes[p.node].id),
        None => g.nodes[p.node].id.clone(),
    }
}

fn escape(s: &str) -> String {
    s.replace('\\', "\\\\").replace('"', "\\\"")
}

fn to_dot(g: &Graph) -> String {
    let mut out = String::from("digraph pbs {\n  rankdir=LR;\n");
    for n in &g.nodes {
        let attrs = match n.shape {
            Shape::Input | Shape::Output => format!("shape=plaintext, label=\"{}\"", escape(&n.label)),
            Shape::Pbs => "shape=diamond, label=\"\"".to_string(),
            Shape::Gate => format!("shape=box, label=\"{}\"", escape(&n.label)),
            Shape::Neg => format!("shape=circle, width=0.3, label=\"{}\"", n.label),
            Shape::Feedback => "shape=point".to_string(),
        };
        let _ = writeln!(out, "  {} [{attrs}];", n.id);
    }
    for e in &g.edges {
        let attrs = if e.back {
            " [style=dashed, dir=back, constraint=false]"
        } else {
            ""
        };
        let _ = writeln!(out, "  {} -> {}{attrs};", dot_port(g, &e.from), dot_port(g, &e.to));
    }
    out.push_str("}\n");
    out
}

fn tikz_anchor(p: &Port) -> &'static str {
    match p.compass {
        Some("nw") => ".north west",
        Some("sw") => ".south west",
        Some("ne") => ".north east",
        Some("se") => ".south east",
        _ => "",
    }
}

fn to_tikz(g: &Graph) -> String {
    let mut out = String::from("\\begin{tikzpicture}[x=1.2cm, y=-1cm]\n");
    for n in &g.nodes {
        let style = match n.shape {
            Shape::Input | Shape::Output => "",
            Shape::Pbs => "draw, diamond, minimum size=6mm",
            Shape::Gate => "draw, rectangle",
            Shape::Neg => "draw, circle, inner sep=1pt",
            Shape::Feedback => "circle, fill, inner sep=1pt",
        };
        let label = match n.shape {
            Shape::Neg => "$\\neg$".to_string(),
            _ => n.label.replace('_', "\\_"),
        };
        let _ = writeln!(out, "  \\node[{style}] ({}) at ({}, {}) {{{label}}};", n.id, n.x, n.y);
    }
    for e in &g.edges {
        let style = if e.back { "[dashed, <-]" } else { "[->]" };
        let _ = writeln!(
            out,
            "  \\draw{style} ({}{}) -- ({}{});",
            g.nodes[e.from.node].id,
            tikz_anchor(&e.from),
            g.nodes[e.to.node].id,
            tikz_anchor(&e.to)
        );
    }
    out.push_str("\\end{tikzpicture}\n");
    out
}

/// Renders a well-typed diagram. The output depends only on `d`.
pub fn render(d: &Diagram, format: RenderFormat) -> String {
    let g = build(d);
    match format {
        RenderFormat::Dot => to_dot(&g),
        RenderFormat::Tikz => to_tikz(&g),
    }
}
