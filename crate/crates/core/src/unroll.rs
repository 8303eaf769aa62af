//! Loop unrolling: trace-free equivalents of diagrams with invertible
//! numeric gates on at least two wires, and the determinant diagnostics that
//! explain why the hypotheses are needed.

use std::fmt;

use thiserror::Error;

use crate::canonical::{canonicalize, CanonError};
use crate::diagram::{embed, Diagram, GateElement, NodePath, Polarisation};
use crate::linalg::{is_invertible, polar, principal_root_detailed, CMatrix, LinalgError, C64, DEFAULT_TOL, ROOT_TOL};
use crate::path::{routed_map, Config, PathError, RoutedMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum UnrollError {
    #[error("diagram cannot be unrolled: {}", reasons_text(.0))]
    Ineligible(Vec<Reason>),
    #[error("gate `{0}` has no numeric matrix")]
    SymbolicGate(String),
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("numerical failure: {0}")]
    NumericFailure(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error(transparent)]
    Canon(#[from] CanonError),
    #[error(transparent)]
    Path(#[from] PathError),
}

fn reasons_text(r: &[Reason]) -> String {
    r.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

/// Why a diagram is not eligible for unrolling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Reason {
    ArityBelowTwo,
    NonInvertibleGate(NodePath),
    SymbolicGate(NodePath),
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::ArityBelowTwo => write!(f, "arity<2"),
            Reason::NonInvertibleGate(p) => write!(f, "non-invertible gate at {p:?}"),
            Reason::SymbolicGate(p) => write!(f, "symbolic gate at {p:?}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnrollReport {
    pub eligible: bool,
    pub reasons: Vec<Reason>,
    pub det_product_before: Option<C64>,
    pub det_product_after: Option<C64>,
    pub gate_count_delta: Option<i64>,
    pub notes: Vec<String>,
}

/// Numeric matrix of a gate label, or `None` if it is symbolic.
fn gate_matrix(g: &GateElement, q: usize) -> Option<CMatrix> {
    g.collapsed().to_matrix(q).ok()
}

/// The matrix dimension used by the numeric gates of `d` (1 if gate-free).
pub fn infer_q(d: &Diagram) -> usize {
    d.gates()
        .into_iter()
        .find_map(|(_, g)| g.collapsed().dim())
        .unwrap_or(1)
}

/// Eligible iff the arity is at least 2 and every gate is numeric and
/// invertible.
pub fn check_unrollable(d: &Diagram) -> Result<UnrollReport, UnrollError> {
    let n = d.arity().map_err(PathError::from)?;
    let q = infer_q(d);
    let mut reasons = Vec::new();
    if n < 2 {
        reasons.push(Reason::ArityBelowTwo);
    }
    for (path, g) in d.gates() {
        match gate_matrix(g, q) {
            None => reasons.push(Reason::SymbolicGate(path)),
            Some(m) if !is_invertible(&m, DEFAULT_TOL) => reasons.push(Reason::NonInvertibleGate(path)),
            Some(_) => {}
        }
    }
    let det_product_before = det_product(d).ok();
    Ok(UnrollReport {
        eligible: reasons.is_empty(),
        reasons,
        det_product_before,
        det_product_after: None,
        gate_count_delta: None,
        notes: Vec::new(),
    })
}

fn entry_matrix(m: &RoutedMap, c: Config, q: usize) -> Result<CMatrix, UnrollError> {
    let g = m.entry(c).collapsed();
    g.to_matrix(q)
        .map_err(|_| UnrollError::SymbolicGate(g.reduced_names().map(|n| n.concat()).unwrap_or_default()))
}

/// `|D|`: the product of the determinants of the `2n` path matrices.
pub fn det_product(d: &Diagram) -> Result<C64, UnrollError> {
    let q = infer_q(d);
    let m = routed_map(d)?;
    let mut acc = C64::new(1.0, 0.0);
    for c in Config::all(m.n) {
        acc *= entry_matrix(&m, c, q)?.det();
    }
    Ok(acc)
}

/// `∏ det(gate)²` over the gate occurrences of `d`.
pub fn gate_det_square_product(d: &Diagram) -> Result<C64, UnrollError> {
    let q = infer_q(d);
    let mut acc = C64::new(1.0, 0.0);
    for (_, g) in d.gates() {
        let m = gate_matrix(g, q).ok_or_else(|| UnrollError::SymbolicGate(g.to_string()))?;
        let det = m.det();
        acc *= det * det;
    }
    Ok(acc)
}

/// Number of configurations whose path matrix is singular.
pub fn noninvertible_path_count(d: &Diagram) -> Result<usize, UnrollError> {
    let q = infer_q(d);
    let m = routed_map(d)?;
    let mut count = 0;
    for c in Config::all(m.n) {
        if !is_invertible(&entry_matrix(&m, c, q)?, DEFAULT_TOL) {
            count += 1;
        }
    }
    Ok(count)
}

/// Three partition blocks applying `b R⁴` to `(H,0)` and `b` to `(V,0)`
/// while wire 1 collects the identity.
fn pair_gadget(b: &CMatrix, r: &CMatrix) -> Result<Diagram, UnrollError> {
    let r_inv = r.inverse().map_err(|_| UnrollError::NotInvertible)?;
    let x = b.mul(&r.mul(r)?)?;
    let g = |m: &CMatrix| Diagram::Gate(GateElement::Numeric(m.clone()));
    let neg1 = || Diagram::tensor(Diagram::Wire, Diagram::Neg);
    let block3 = Diagram::seq([Diagram::Pbs, Diagram::tensor(g(r), g(&r_inv)), Diagram::Pbs]);
    let block2 = Diagram::seq([
        neg1(),
        Diagram::Pbs,
        Diagram::tensor(g(r), g(&r_inv)),
        Diagram::Pbs,
        neg1(),
    ]);
    let block1 = Diagram::tensor(g(&x), Diagram::Wire);
    Ok(Diagram::seq([block3, block2, block1]))
}

fn check_gadget(d: &Diagram, u: &CMatrix, v: &CMatrix) -> Result<(), UnrollError> {
    let q = u.rows();
    let m = routed_map(d)?;
    let id = CMatrix::identity(q);
    let expected = [u, v, &id, &id];
    for c in Config::all(2) {
        if m.tau_of(c) != c {
            return Err(UnrollError::NumericFailure(format!("gadget moves {c}")));
        }
        let got = entry_matrix(&m, c, q)?;
        if !crate::linalg::mat_eq(&got, expected[c.index()], ROOT_TOL)? {
            return Err(UnrollError::NumericFailure(format!("gadget path {c} is off")));
        }
    }
    Ok(())
}

/// A trace-free two-wire diagram with identity routing whose wire-0 paths
/// collect `u` (horizontal) and `v` (vertical) and whose wire-1 paths collect
/// the identity. Built from the polar factors of `u` and `v`.
pub fn tracefree_filter_gadget(u: &CMatrix, v: &CMatrix) -> Result<Diagram, UnrollError> {
    tracefree_filter_gadget_noted(u, v).map(|(d, _)| d)
}

fn tracefree_filter_gadget_noted(u: &CMatrix, v: &CMatrix) -> Result<(Diagram, Vec<String>), UnrollError> {
    if !is_invertible(u, DEFAULT_TOL) || !is_invertible(v, DEFAULT_TOL) {
        return Err(UnrollError::NotInvertible);
    }
    let mut notes = Vec::new();
    let pu = polar(u)?;
    let pv = polar(v)?;
    // Positive factors: R = S'^{-1/2} (S'^{-1/2} S S'^{-1/2})^{1/4} S'^{1/2}.
    let (s, s2) = (&pu.s_factor, &pv.s_factor);
    let s2_half = principal_root_detailed(s2, 2)?.root;
    let s2_half_inv = s2_half.inverse()?;
    let mid = s2_half_inv.mul(s)?.mul(&s2_half_inv)?;
    let mid = mid.add(&mid.adjoint())?.scale(C64::new(0.5, 0.0));
    let mid_root = principal_root_detailed(&mid, 4)?.root;
    let r_s = s2_half_inv.mul(&mid_root)?.mul(&s2_half)?;
    let positive = pair_gadget(s2, &r_s)?;
    // Unitary factors: R = (Q'^† Q)^{1/4}.
    let (qa, qb) = (&pu.q_factor, &pv.q_factor);
    let ratio = qb.adjoint().mul(qa)?;
    let root = principal_root_detailed(&ratio, 4)?;
    if root.branch_shifted {
        notes.push("eigenvalue on the negative real axis: branch shifted to +π".to_string());
    }
    let unitary = pair_gadget(qb, &root.root)?;
    let d = Diagram::seq([positive, unitary]);
    check_gadget(&d, u, v)?;
    Ok((d, notes))
}

/// A trace-free diagram with the same routed map as `d`.
pub fn unroll(d: &Diagram) -> Result<Diagram, UnrollError> {
    unroll_with_report(d).map(|(out, _)| out)
}

/// Unrolls `d` and reports determinant bookkeeping and gate counts.
pub fn unroll_with_report(d: &Diagram) -> Result<(Diagram, UnrollReport), UnrollError> {
    let mut report = check_unrollable(d)?;
    if !report.eligible {
        return Err(UnrollError::Ineligible(report.reasons));
    }
    let q = infer_q(d);
    let cf = canonicalize(d)?;
    let n = cf.n;
    let mut layers = Vec::new();
    for (p, (u, v)) in cf.filters.iter().enumerate() {
        if u.is_identity() && v.is_identity() {
            continue;
        }
        let um = gate_matrix(u, q).ok_or_else(|| UnrollError::SymbolicGate(u.to_string()))?;
        let vm = gate_matrix(v, q).ok_or_else(|| UnrollError::SymbolicGate(v.to_string()))?;
        let (gadget, notes) = tracefree_filter_gadget_noted(&um, &vm)?;
        report.notes.extend(notes.into_iter().map(|s| format!("wire {p}: {s}")));
        if p + 1 < n {
            layers.push(embed(gadget, p, n));
        } else {
            let routed = Diagram::seq([Diagram::Swap, gadget, Diagram::Swap]);
            layers.push(embed(routed, n - 2, n));
        }
    }
    layers.push(cf.routing.clone());
    let out = Diagram::seq(layers);
    let before = routed_map(d)?;
    let after = routed_map(&out)?;
    if let Some((c, why)) = after
        .collapsed()
        .first_difference(&before.collapsed(), ROOT_TOL)
        .map_err(|e| UnrollError::NumericFailure(e.to_string()))?
    {
        return Err(UnrollError::NumericFailure(format!(
            "unrolled diagram differs at {c}: {why}"
        )));
    }
    report.det_product_after = det_product(&out).ok();
    report.gate_count_delta = Some(out.gates().len() as i64 - d.gates().len() as i64);
    Ok((out, report))
}

/// Path matrices of a two-wire diagram in state order, for reporting.
pub fn path_matrices(d: &Diagram) -> Result<Vec<(Config, CMatrix)>, UnrollError> {
    let q = infer_q(d);
    let m = routed_map(d)?;
    Config::all(m.n).map(|c| Ok((c, entry_matrix(&m, c, q)?))).collect()
}

/// The horizontal wire-1 path matrix of `D_U`, which equals `U`.
pub fn d_u_witness(d: &Diagram) -> Result<CMatrix, UnrollError> {
    let q = infer_q(d);
    entry_matrix(&routed_map(d)?, Config::new(Polarisation::H, 1), q)
}
