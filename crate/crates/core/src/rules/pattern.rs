//! Diagram patterns with gate and diagram metavariables, matching modulo
//! flattening, match sites and replacement.

use std::collections::BTreeMap;

use crate::diagram::{Flat, GateElement};
use crate::linalg::DEFAULT_TOL;

/// A gate position in a pattern.
#[derive(Debug, Clone, PartialEq)]
pub enum GatePat {
    /// A gate metavariable.
    Meta(String),
    /// The identity gate.
    Identity,
    /// A product of metavariables in matrix order: `["V", "U"]` is `VU`,
    /// i.e. `U` applied first.
    Product(Vec<String>),
}

/// How many wires a diagram metavariable may stand for.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HoleArity {
    Exactly(usize),
    AtLeast(usize),
}

impl HoleArity {
    pub fn admits(self, n: usize) -> bool {
        match self {
            HoleArity::Exactly(k) => n == k,
            HoleArity::AtLeast(k) => n >= k,
        }
    }
}

/// A diagram pattern. Use the smart constructors [`Pat::seq`] and
/// [`Pat::par`] so that patterns are flat in the same sense as [`Flat`].
#[derive(Debug, Clone, PartialEq)]
pub enum Pat {
    Empty,
    Wire,
    Neg,
    Swap,
    Pbs,
    Gate(GatePat),
    Seq(Vec<Pat>),
    Par(Vec<Pat>),
    Trace(Box<Pat>),
    /// A diagram metavariable.
    Hole(String, HoleArity),
    /// The identity on as many wires as the named hole.
    IdOf(String),
}

impl Pat {
    pub fn gate(name: &str) -> Pat {
        Pat::Gate(GatePat::Meta(name.to_string()))
    }

    pub fn identity_gate() -> Pat {
        Pat::Gate(GatePat::Identity)
    }

    /// The gate product `names[0] · names[1] · …`.
    pub fn product(names: &[&str]) -> Pat {
        Pat::Gate(GatePat::Product(names.iter().map(|s| s.to_string()).collect()))
    }

    pub fn hole(name: &str, arity: HoleArity) -> Pat {
        Pat::Hole(name.to_string(), arity)
    }

    pub fn id_of(name: &str) -> Pat {
        Pat::IdOf(name.to_string())
    }

    pub fn trace(inner: Pat) -> Pat {
        Pat::Trace(Box::new(inner))
    }

    /// `n` parallel wires.
    pub fn wires(n: usize) -> Pat {
        match n {
            0 => Pat::Empty,
            1 => Pat::Wire,
            _ => Pat::Par(vec![Pat::Wire; n]),
        }
    }

    /// Sequence in dataflow order, with nested sequences spliced and
    /// identity layers dropped.
    pub fn seq(items: Vec<Pat>) -> Pat {
        let n = items.first().and_then(Pat::arity);
        let mut out = Vec::new();
        for it in items {
            match it {
                Pat::Seq(inner) => out.extend(inner),
                x if x.is_identity() => {}
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Pat::wires(n.expect("identity sequence of known arity")),
            1 => out.pop().unwrap(),
            _ => Pat::Seq(out),
        }
    }

    /// Parallel composition, with nested blocks spliced and `Empty` dropped.
    pub fn par(items: Vec<Pat>) -> Pat {
        let mut out = Vec::new();
        for it in items {
            match it {
                Pat::Par(inner) => out.extend(inner),
                Pat::Empty => {}
                x => out.push(x),
            }
        }
        match out.len() {
            0 => Pat::Empty,
            1 => out.pop().unwrap(),
            _ => Pat::Par(out),
        }
    }

    /// True for `Empty`, `Wire` and parallel wires.
    pub fn is_identity(&self) -> bool {
        match self {
            Pat::Empty | Pat::Wire => true,
            Pat::Par(items) => items.iter().all(Pat::is_identity),
            _ => false,
        }
    }

    /// The arity, when it does not depend on a hole.
    pub fn arity(&self) -> Option<usize> {
        match self {
            Pat::Empty => Some(0),
            Pat::Wire | Pat::Neg | Pat::Gate(_) => Some(1),
            Pat::Swap | Pat::Pbs => Some(2),
            Pat::Seq(items) => items.iter().find_map(Pat::arity),
            Pat::Par(items) => items.iter().map(Pat::arity).sum(),
            Pat::Trace(inner) => inner.arity().map(|n| n - 1),
            Pat::Hole(_, HoleArity::Exactly(k)) => Some(*k),
            Pat::Hole(..) | Pat::IdOf(_) => None,
        }
    }

    /// Gate metavariables in order of first occurrence.
    pub fn gate_vars(&self) -> Vec<String> {
        let mut out = Vec::new();
        self.walk(&mut |p| {
            let names: Vec<&String> = match p {
                Pat::Gate(GatePat::Meta(n)) => vec![n],
                Pat::Gate(GatePat::Product(ns)) => ns.iter().collect(),
                _ => vec![],
            };
            for n in names {
                if !out.contains(n) {
                    out.push(n.clone());
                }
            }
        });
        out
    }

    /// Diagram metavariables with their arity constraints.
    pub fn holes(&self) -> Vec<(String, HoleArity)> {
        let mut out: Vec<(String, HoleArity)> = Vec::new();
        self.walk(&mut |p| {
            if let Pat::Hole(n, a) = p {
                if !out.iter().any(|(m, _)| m == n) {
                    out.push((n.clone(), *a));
                }
            }
        });
        out
    }

    pub fn has_identity_gate(&self) -> bool {
        let mut found = false;
        self.walk(&mut |p| found |= matches!(p, Pat::Gate(GatePat::Identity)));
        found
    }

    pub fn has_product(&self) -> bool {
        let mut found = false;
        self.walk(&mut |p| found |= matches!(p, Pat::Gate(GatePat::Product(ns)) if ns.len() > 1));
        found
    }

    fn walk(&self, f: &mut dyn FnMut(&Pat)) {
        f(self);
        match self {
            Pat::Seq(items) | Pat::Par(items) => items.iter().for_each(|p| p.walk(f)),
            Pat::Trace(inner) => inner.walk(f),
            _ => {}
        }
    }
}

/// The value bound to a metavariable.
#[derive(Debug, Clone, PartialEq)]
pub enum Bound {
    Gate(GateElement),
    Diagram(Flat),
    /// Only the arity of a hole is known so far, from an `IdOf`.
    Arity(usize),
}

pub type Bindings = BTreeMap<String, Bound>;

/// An unbound metavariable needed to instantiate a pattern.
#[derive(Debug, Clone, PartialEq)]
pub struct Underdetermined(pub String);

fn gate_consistent(a: &GateElement, b: &GateElement) -> bool {
    a == b || a.equals(b, DEFAULT_TOL).unwrap_or(false)
}

/// Binds a gate metavariable, checking consistency with an earlier binding.
fn bind_gate(b: &Bindings, name: &str, g: &GateElement) -> Option<Bindings> {
    match b.get(name) {
        Some(Bound::Gate(prev)) => gate_consistent(prev, g).then(|| b.clone()),
        Some(_) => None,
        None => {
            let mut out = b.clone();
            out.insert(name.to_string(), Bound::Gate(g.clone()));
            Some(out)
        }
    }
}

fn bind_hole(b: &Bindings, name: &str, arity: HoleArity, f: Flat) -> Option<Bindings> {
    let n = f.arity();
    if !arity.admits(n) {
        return None;
    }
    match b.get(name) {
        Some(Bound::Diagram(prev)) => (*prev == f).then(|| b.clone()),
        Some(Bound::Arity(k)) if *k != n => None,
        Some(Bound::Gate(_)) => None,
        _ => {
            let mut out = b.clone();
            out.insert(name.to_string(), Bound::Diagram(f));
            Some(out)
        }
    }
}

fn bind_identity(b: &Bindings, name: &str, n: usize) -> Option<Bindings> {
    match b.get(name) {
        Some(Bound::Diagram(d)) => (d.arity() == n).then(|| b.clone()),
        Some(Bound::Arity(k)) => (*k == n).then(|| b.clone()),
        Some(Bound::Gate(_)) => None,
        None => {
            let mut out = b.clone();
            out.insert(name.to_string(), Bound::Arity(n));
            Some(out)
        }
    }
}

/// All ways to split a word into `k` consecutive nonempty factors.
fn word_splits(g: &GateElement, k: usize) -> Vec<Vec<GateElement>> {
    let GateElement::Word(w) = g else {
        return Vec::new();
    };
    fn go(rest: &[crate::diagram::Symbol], k: usize, acc: &mut Vec<GateElement>, out: &mut Vec<Vec<GateElement>>) {
        if k == 1 {
            if !rest.is_empty() {
                acc.push(GateElement::Word(rest.to_vec()));
                out.push(acc.clone());
                acc.pop();
            }
            return;
        }
        for cut in 1..rest.len() {
            acc.push(GateElement::Word(rest[..cut].to_vec()));
            go(&rest[cut..], k - 1, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    go(w, k, &mut Vec::new(), &mut out);
    out
}

fn product(names: &[String], b: &Bindings) -> Result<GateElement, Underdetermined> {
    let mut acc = GateElement::one();
    for n in names {
        match b.get(n) {
            Some(Bound::Gate(g)) => acc = acc.mul(g).map_err(|_| Underdetermined(n.clone()))?,
            _ => return Err(Underdetermined(n.clone())),
        }
    }
    Ok(acc)
}

fn match_gate(p: &GatePat, g: &GateElement, b: &Bindings) -> Vec<Bindings> {
    match p {
        GatePat::Meta(n) => bind_gate(b, n, g).into_iter().collect(),
        GatePat::Identity => {
            if g.is_identity() {
                vec![b.clone()]
            } else {
                vec![]
            }
        }
        GatePat::Product(names) if names.len() == 1 => bind_gate(b, &names[0], g).into_iter().collect(),
        GatePat::Product(names) => {
            if let Ok(prod) = product(names, b) {
                return if gate_consistent(&prod, g) {
                    vec![b.clone()]
                } else {
                    vec![]
                };
            }
            let mut out = Vec::new();
            for parts in word_splits(g, names.len()) {
                let mut cur = Some(b.clone());
                for (n, part) in names.iter().zip(&parts) {
                    cur = cur.and_then(|c| bind_gate(&c, n, part));
                }
                if let Some(c) = cur {
                    out.push(c);
                }
            }
            out
        }
    }
}

#[derive(Clone, Copy)]
enum ListKind {
    Seq,
    Par,
}

fn combine(kind: ListKind, items: &[Flat]) -> Flat {
    match kind {
        ListKind::Seq => Flat::seq(items.to_vec(), items[0].arity()),
        ListKind::Par => Flat::par(items.to_vec()),
    }
}

fn match_list(pats: &[Pat], items: &[Flat], kind: ListKind, b: &Bindings, out: &mut Vec<Bindings>) {
    let Some(first) = pats.first() else {
        if items.is_empty() {
            out.push(b.clone());
        }
        return;
    };
    match (first, kind) {
        (Pat::Hole(name, arity), _) => {
            for len in 1..=items.len() {
                let chunk = combine(kind, &items[..len]);
                if let Some(b2) = bind_hole(b, name, *arity, chunk) {
                    match_list(&pats[1..], &items[len..], kind, &b2, out);
                }
            }
        }
        (Pat::IdOf(name), ListKind::Par) => {
            let mut width = 0;
            for len in 1..=items.len() {
                if !items[len - 1].is_identity() {
                    break;
                }
                width += items[len - 1].arity();
                if let Some(b2) = bind_identity(b, name, width) {
                    match_list(&pats[1..], &items[len..], kind, &b2, out);
                }
            }
        }
        (p, _) => {
            if let Some(item) = items.first() {
                for b2 in match_node(p, item, b) {
                    match_list(&pats[1..], &items[1..], kind, &b2, out);
                }
            }
        }
    }
}

/// Every binding extending `b` under which `p` matches `f` as a whole.
pub fn match_node(p: &Pat, f: &Flat, b: &Bindings) -> Vec<Bindings> {
    let unit = |ok: bool| if ok { vec![b.clone()] } else { vec![] };
    match (p, f) {
        (Pat::Empty, Flat::Empty)
        | (Pat::Wire, Flat::Wire)
        | (Pat::Neg, Flat::Neg)
        | (Pat::Swap, Flat::Swap)
        | (Pat::Pbs, Flat::Pbs) => vec![b.clone()],
        (Pat::Gate(gp), Flat::Gate(g)) => match_gate(gp, g, b),
        (Pat::Trace(pi), Flat::Trace(fi)) => match_node(pi, fi, b),
        (Pat::Hole(name, arity), _) => bind_hole(b, name, *arity, f.clone()).into_iter().collect(),
        (Pat::IdOf(name), _) => {
            if f.is_identity() {
                bind_identity(b, name, f.arity()).into_iter().collect()
            } else {
                vec![]
            }
        }
        (Pat::Seq(ps), _) => {
            let mut out = Vec::new();
            match_list(ps, f.layers(), ListKind::Seq, b, &mut out);
            out
        }
        (Pat::Par(ps), _) => {
            let mut out = Vec::new();
            match_list(ps, f.components(), ListKind::Par, b, &mut out);
            out
        }
        (Pat::Wire | Pat::Empty, _) => unit(false),
        _ => vec![],
    }
}

/// Builds the diagram a pattern denotes under `b`.
pub fn instantiate(p: &Pat, b: &Bindings) -> Result<Flat, Underdetermined> {
    Ok(match p {
        Pat::Empty => Flat::Empty,
        Pat::Wire => Flat::Wire,
        Pat::Neg => Flat::Neg,
        Pat::Swap => Flat::Swap,
        Pat::Pbs => Flat::Pbs,
        Pat::Gate(GatePat::Identity) => Flat::Gate(GateElement::identity_symbol()),
        Pat::Gate(GatePat::Meta(n)) => match b.get(n) {
            Some(Bound::Gate(g)) => Flat::Gate(g.clone()),
            _ => return Err(Underdetermined(n.clone())),
        },
        Pat::Gate(GatePat::Product(ns)) => Flat::Gate(product(ns, b)?),
        Pat::Hole(n, _) => match b.get(n) {
            Some(Bound::Diagram(d)) => d.clone(),
            _ => return Err(Underdetermined(n.clone())),
        },
        Pat::IdOf(n) => match b.get(n) {
            Some(Bound::Diagram(d)) => Flat::identity(d.arity()),
            Some(Bound::Arity(k)) => Flat::identity(*k),
            _ => return Err(Underdetermined(n.clone())),
        },
        Pat::Seq(items) => {
            let parts = items.iter().map(|i| instantiate(i, b)).collect::<Result<Vec<_>, _>>()?;
            let n = parts[0].arity();
            Flat::seq(parts, n)
        }
        Pat::Par(items) => Flat::par(items.iter().map(|i| instantiate(i, b)).collect::<Result<Vec<_>, _>>()?),
        Pat::Trace(inner) => Flat::trace(instantiate(inner, b)?),
    })
}

/// Where a match occurs in a flattened subject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Location {
    /// Layers `first..=last` of the context node, restricted to wires
    /// `wires.0..wires.1`. In the first layer the region is exactly the
    /// components `comps.0..comps.1`.
    Region {
        context: Vec<usize>,
        first: usize,
        last: usize,
        comps: (usize, usize),
        wires: (usize, usize),
    },
    /// The identity on wires `offset..offset + width` before layer `gap`
    /// of the context node.
    Gap {
        context: Vec<usize>,
        gap: usize,
        offset: usize,
        width: usize,
    },
    /// Next to (below) the node at `node`, for patterns with no wires.
    Beside { node: Vec<usize> },
}

/// A match of one side of a rule: where, and with which bindings.
#[derive(Debug, Clone, PartialEq)]
pub struct MatchSite {
    pub location: Location,
    pub bindings: Bindings,
}

/// Nodes that are not layers of a sequence, in preorder.
fn contexts(f: &Flat) -> Vec<Vec<usize>> {
    fn go(f: &Flat, path: &mut Vec<usize>, is_context: bool, out: &mut Vec<Vec<usize>>) {
        if is_context {
            out.push(path.clone());
        }
        let child_is_context = !matches!(f, Flat::Seq(_));
        for (i, c) in f.children().iter().enumerate() {
            path.push(i);
            go(c, path, child_is_context, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), true, &mut out);
    out
}

fn all_nodes(f: &Flat) -> Vec<Vec<usize>> {
    fn go(f: &Flat, path: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        out.push(path.clone());
        for (i, c) in f.children().iter().enumerate() {
            path.push(i);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(f, &mut Vec::new(), &mut out);
    out
}

/// Wire offset of each component of a layer.
fn offsets(layer: &Flat) -> Vec<usize> {
    let mut acc = 0;
    layer
        .components()
        .iter()
        .map(|c| {
            let s = acc;
            acc += c.arity();
            s
        })
        .collect()
}

/// The component range of `layer` covering exactly wires `a..b`, taking
/// zero-width components only strictly inside the range.
fn comps_for(layer: &Flat, a: usize, b: usize) -> Option<(usize, usize)> {
    let comps = layer.components();
    let offs = offsets(layer);
    let mut lo = None;
    let mut hi = 0;
    for (i, c) in comps.iter().enumerate() {
        let (s, e) = (offs[i], offs[i] + c.arity());
        if s < a && e > a || s < b && e > b {
            return None;
        }
        let inside = if s == e { a < s && s < b } else { a <= s && e <= b };
        if inside {
            if lo.is_none() {
                lo = Some(i);
            }
            hi = i + 1;
        }
    }
    let lo = lo?;
    let covered: usize = comps[lo..hi].iter().map(Flat::arity).sum();
    (covered == b - a && offs[lo] == a).then_some((lo, hi))
}

fn slice(layer: &Flat, (lo, hi): (usize, usize)) -> Flat {
    Flat::par(layer.components()[lo..hi].to_vec())
}

/// The subterm a region location denotes, if it still exists.
fn region_subject(root: &Flat, loc: &Location) -> Option<(Vec<(usize, usize)>, Flat)> {
    let Location::Region {
        context,
        first,
        last,
        comps,
        wires,
    } = loc
    else {
        return None;
    };
    let ctx = root.at(context)?;
    let layers = ctx.layers();
    if *last >= layers.len() || first > last {
        return None;
    }
    let (a, b) = *wires;
    let anchor = layers[*first].components();
    if comps.1 > anchor.len() || comps.0 >= comps.1 {
        return None;
    }
    let offs = offsets(&layers[*first]);
    let width: usize = anchor[comps.0..comps.1].iter().map(Flat::arity).sum();
    if offs[comps.0] != a || width != b - a {
        return None;
    }
    let mut ranges = vec![*comps];
    for layer in &layers[first + 1..=*last] {
        ranges.push(comps_for(layer, a, b)?);
    }
    let slices: Vec<Flat> = layers[*first..=*last]
        .iter()
        .zip(&ranges)
        .map(|(l, r)| slice(l, *r))
        .collect();
    Some((ranges, Flat::seq(slices, b - a)))
}

/// Every match site of `p` in `root`, in a deterministic order: contexts in
/// preorder, then by first layer, component range and last layer.
pub fn find_sites(p: &Pat, root: &Flat) -> Vec<MatchSite> {
    let mut out = Vec::new();
    let empty = Bindings::new();
    if *p == Pat::Empty {
        for node in all_nodes(root) {
            out.push(MatchSite {
                location: Location::Beside { node },
                bindings: empty.clone(),
            });
        }
        return out;
    }
    if p.is_identity() {
        let w = p.arity().unwrap();
        for context in contexts(root) {
            let ctx = root.at(&context).unwrap();
            let n = ctx.arity();
            if w > n {
                continue;
            }
            let gaps = if ctx.is_identity() { 1 } else { ctx.layers().len() + 1 };
            for gap in 0..gaps {
                for offset in 0..=n - w {
                    out.push(MatchSite {
                        location: Location::Gap {
                            context: context.clone(),
                            gap,
                            offset,
                            width: w,
                        },
                        bindings: empty.clone(),
                    });
                }
            }
        }
        return out;
    }
    let width = p.arity();
    for context in contexts(root) {
        let ctx = root.at(&context).unwrap();
        let layers = ctx.layers();
        for first in 0..layers.len() {
            let comps = layers[first].components();
            let offs = offsets(&layers[first]);
            for lo in 0..comps.len() {
                for hi in lo + 1..=comps.len() {
                    let a = offs[lo];
                    let b = a + comps[lo..hi].iter().map(Flat::arity).sum::<usize>();
                    if width.is_some_and(|w| w != b - a) {
                        continue;
                    }
                    let owned = hi == lo + 1 && comps.len() > 1;
                    for last in first..layers.len() {
                        if a == b && last > first {
                            break;
                        }
                        let loc = Location::Region {
                            context: context.clone(),
                            first,
                            last,
                            comps: (lo, hi),
                            wires: (a, b),
                        };
                        let Some((ranges, subject)) = region_subject(root, &loc) else {
                            break;
                        };
                        if first == last && owned {
                            continue;
                        }
                        let first_slice = slice(&layers[first], ranges[0]);
                        let last_slice = slice(&layers[last], *ranges.last().unwrap());
                        if first_slice.is_identity() || last_slice.is_identity() {
                            continue;
                        }
                        for bindings in match_node(p, &subject, &empty) {
                            out.push(MatchSite {
                                location: loc.clone(),
                                bindings,
                            });
                        }
                    }
                }
            }
        }
    }
    out
}

/// Re-checks that `site` is a match of `p` in `root`.
pub fn site_matches(p: &Pat, root: &Flat, site: &MatchSite) -> bool {
    match &site.location {
        Location::Beside { node } => *p == Pat::Empty && root.at(node).is_some(),
        Location::Gap {
            context,
            gap,
            offset,
            width,
        } => {
            p.is_identity()
                && p.arity() == Some(*width)
                && root
                    .at(context)
                    .is_some_and(|c| *gap <= c.layers().len() && offset + width <= c.arity())
        }
        loc @ Location::Region { .. } => region_subject(root, loc)
            .is_some_and(|(_, subject)| match_node(p, &subject, &Bindings::new()).contains(&site.bindings)),
    }
}

fn expand(inst: Flat, a: usize, rest: usize) -> Vec<Flat> {
    let wrap = |x: Flat| Flat::par(vec![Flat::identity(a), x, Flat::identity(rest)]);
    match inst {
        Flat::Seq(items) => items.into_iter().map(wrap).collect(),
        other => vec![wrap(other)],
    }
}

/// Replaces the site in `root` by `inst` and renormalises.
pub fn replace(root: &Flat, loc: &Location, inst: Flat) -> Option<Flat> {
    let mut out = root.clone();
    match loc {
        Location::Beside { node } => {
            let target = out.at_mut(node)?;
            let old = std::mem::replace(target, Flat::Empty);
            *target = Flat::par(vec![old, inst]);
        }
        Location::Gap {
            context,
            gap,
            offset,
            width,
        } => {
            let ctx = out.at_mut(context)?;
            let n = ctx.arity();
            let mut layers: Vec<Flat> = if ctx.is_identity() {
                vec![]
            } else {
                ctx.layers().to_vec()
            };
            let new = expand(inst, *offset, n - offset - width);
            let at = (*gap).min(layers.len());
            layers.splice(at..at, new);
            *ctx = Flat::seq(layers, n);
        }
        Location::Region {
            context,
            first,
            last,
            wires: (a, b),
            ..
        } => {
            let (ranges, _) = region_subject(root, loc)?;
            let ctx = out.at_mut(context)?;
            let n = ctx.arity();
            let layers = ctx.layers().to_vec();
            let mut lefts = Vec::new();
            let mut rights = Vec::new();
            for (layer, (lo, hi)) in layers[*first..=*last].iter().zip(&ranges) {
                let comps = layer.components();
                lefts.push(Flat::par(comps[..*lo].to_vec()));
                rights.push(Flat::par(comps[*hi..].to_vec()));
            }
            let left = Flat::seq(lefts, *a);
            let right = Flat::seq(rights, n - b);
            let new = if left.is_identity() && right.is_identity() {
                expand(inst, *a, n - b)
            } else {
                vec![Flat::par(vec![left, inst, right])]
            };
            let mut items = layers[..*first].to_vec();
            items.extend(new);
            items.extend_from_slice(&layers[last + 1..]);
            *ctx = Flat::seq(items, n);
        }
    }
    Some(out.normalize())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nnn() -> Flat {
        Flat::Seq(vec![Flat::Neg, Flat::Neg, Flat::Neg])
    }

    #[test]
    fn overlapping_sites() {
        let p = Pat::seq(vec![Pat::Neg, Pat::Neg]);
        let sites = find_sites(&p, &nnn());
        assert_eq!(sites.len(), 2);
        let firsts: Vec<usize> = sites
            .iter()
            .map(|s| match s.location {
                Location::Region { first, .. } => first,
                _ => unreachable!(),
            })
            .collect();
        assert_eq!(firsts, vec![0, 1]);
    }

    #[test]
    fn region_inside_parallel_block() {
        let subject = Flat::Seq(vec![
            Flat::Par(vec![Flat::Neg, Flat::Wire]),
            Flat::Par(vec![Flat::Neg, Flat::Gate(GateElement::symbol("U"))]),
        ]);
        let p = Pat::seq(vec![Pat::Neg, Pat::Neg]);
        let sites = find_sites(&p, &subject);
        assert_eq!(sites.len(), 1);
        let out = replace(&subject, &sites[0].location, Flat::Wire).unwrap();
        assert_eq!(out, Flat::Par(vec![Flat::Wire, Flat::Gate(GateElement::symbol("U"))]));
    }

    #[test]
    fn gate_metavariables_bind_consistently() {
        let u = GateElement::symbol("U");
        let v = GateElement::symbol("V");
        let p = Pat::par(vec![Pat::gate("A"), Pat::gate("A")]);
        let same = Flat::Par(vec![Flat::Gate(u.clone()), Flat::Gate(u.clone())]);
        let diff = Flat::Par(vec![Flat::Gate(u), Flat::Gate(v)]);
        assert_eq!(match_node(&p, &same, &Bindings::new()).len(), 1);
        assert!(match_node(&p, &diff, &Bindings::new()).is_empty());
    }

    #[test]
    fn products_split_words() {
        let p = Pat::product(&["V", "U"]);
        let f = Flat::Gate(GateElement::word_from_chars("ABC"));
        let ms = match_node(&p, &f, &Bindings::new());
        assert_eq!(ms.len(), 2);
        let inst = instantiate(&Pat::product(&["V", "U"]), &ms[0]).unwrap();
        assert_eq!(inst, f);
    }

    #[test]
    fn holes_match_runs() {
        let p = Pat::par(vec![
            Pat::hole("A", HoleArity::AtLeast(1)),
            Pat::hole("B", HoleArity::AtLeast(1)),
        ]);
        let f = Flat::Par(vec![Flat::Neg, Flat::Wire, Flat::Pbs]);
        assert_eq!(match_node(&p, &f, &Bindings::new()).len(), 2);
    }

    #[test]
    fn identity_of_hole() {
        let p = Pat::seq(vec![
            Pat::par(vec![Pat::hole("A", HoleArity::AtLeast(1)), Pat::id_of("B")]),
            Pat::par(vec![Pat::id_of("A"), Pat::hole("B", HoleArity::AtLeast(1))]),
        ]);
        let f = Flat::Seq(vec![
            Flat::Par(vec![Flat::Neg, Flat::Wire]),
            Flat::Par(vec![Flat::Wire, Flat::Neg]),
        ]);
        let ms = match_node(&p, &f, &Bindings::new());
        assert_eq!(ms.len(), 1);
        assert_eq!(ms[0]["B"], Bound::Diagram(Flat::Neg));
    }

    #[test]
    fn gap_sites_cover_every_segment() {
        let f = Flat::Seq(vec![Flat::Neg, Flat::Gate(GateElement::symbol("U"))]);
        assert_eq!(find_sites(&Pat::Wire, &f).len(), 3);
        let out = replace(
            &f,
            &Location::Gap {
                context: vec![],
                gap: 1,
                offset: 0,
                width: 1,
            },
            Flat::Gate(GateElement::identity_symbol()),
        )
        .unwrap();
        assert_eq!(out.layers().len(), 3);
    }
}
