//! Denotational semantics on `H_n = C^{H,V} ⊗ C^n ⊗ C^q`: the literal
//! inductive evaluator, the structured map derived from paths, the adequacy
//! check between the two, and the commutation experiment.

use thiserror::Error;

use crate::diagram::{qs_builder, Diagram, DiagramError, GateElement, GateError, Polarisation};
use crate::linalg::{mat_eq, CMatrix, LinalgError, C64};
use crate::path::{routed_map, Config, PathError, RoutedMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DenotError {
    #[error("gate `{0}` has no numeric matrix")]
    SymbolicGate(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("matrix is not unitary at tolerance 1e-8")]
    NotUnitary,
    #[error("trace series term {0} is nonzero")]
    TraceSeries(usize),
    #[error("denotation leaves the routed-map monoid: {0}")]
    NotRouted(String),
    #[error("ill-typed diagram: {0}")]
    IllTyped(#[from] DiagramError),
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

impl From<GateError> for DenotError {
    fn from(e: GateError) -> Self {
        match e {
            GateError::Symbolic(n) | GateError::Incomparable(n) => DenotError::SymbolicGate(n),
            other => DenotError::DimensionMismatch(other.to_string()),
        }
    }
}

/// Index of the basis vector `|c, p, x⟩` in `H_n`.
pub fn basis_index(n: usize, q: usize, c: Polarisation, p: usize, x: usize) -> usize {
    ((c.bit() * n) + p) * q + x
}

fn decode(n: usize, q: usize, i: usize) -> (Polarisation, usize, usize) {
    let x = i % q;
    let cp = i / q;
    (Polarisation::from_bit(cp / n), cp % n, x)
}

/// A dense linear map on `H_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMap {
    pub n: usize,
    pub q: usize,
    pub matrix: CMatrix,
}

/// A linear map in one of its two representations.
#[derive(Debug, Clone, PartialEq)]
pub enum LinearMap {
    Dense(DenseMap),
    Structured { q: usize, map: RoutedMap },
}

impl LinearMap {
    pub fn n(&self) -> usize {
        match self {
            LinearMap::Dense(d) => d.n,
            LinearMap::Structured { map, .. } => map.n,
        }
    }

    pub fn q(&self) -> usize {
        match self {
            LinearMap::Dense(d) => d.q,
            LinearMap::Structured { q, .. } => *q,
        }
    }

    /// The dense matrix, expanding a structured map by the adequacy formula.
    pub fn to_dense(&self) -> Result<DenseMap, DenotError> {
        match self {
            LinearMap::Dense(d) => Ok(d.clone()),
            LinearMap::Structured { q, map } => dense_from_routed(map, *q),
        }
    }
}

/// A state vector on `H_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub n: usize,
    pub q: usize,
    pub amplitudes: Vec<C64>,
}

impl StateVector {
    pub fn zero(n: usize, q: usize) -> Self {
        StateVector {
            n,
            q,
            amplitudes: vec![C64::new(0.0, 0.0); 2 * n * q],
        }
    }

    pub fn basis(n: usize, q: usize, c: Polarisation, p: usize, x: usize) -> Self {
        let mut s = Self::zero(n, q);
        s.amplitudes[basis_index(n, q, c, p, x)] = C64::new(1.0, 0.0);
        s
    }

    pub fn amp(&self, c: Polarisation, p: usize, x: usize) -> C64 {
        self.amplitudes[basis_index(self.n, self.q, c, p, x)]
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }
}

fn permutation_map(n: usize, q: usize, f: impl Fn(Polarisation, usize) -> (Polarisation, usize)) -> CMatrix {
    let dim = 2 * n * q;
    let mut m = CMatrix::zeros(dim, dim);
    for i in 0..dim {
        let (c, p, x) = decode(n, q, i);
        let (c2, p2) = f(c, p);
        m[(basis_index(n, q, c2, p2, x), i)] = C64::new(1.0, 0.0);
    }
    m
}

/// The literal inductive semantics, with the trace series summed over its
/// first three terms after checking that the fourth vanishes.
pub fn denote_raw(d: &Diagram, q: usize) -> Result<DenseMap, DenotError> {
    let n = d.arity()?;
    let matrix = raw(d, q)?;
    check_routed(&matrix, n, q)?;
    Ok(DenseMap { n, q, matrix })
}

fn raw(d: &Diagram, q: usize) -> Result<CMatrix, DenotError> {
    Ok(match d {
        Diagram::Empty => CMatrix::zeros(0, 0),
        Diagram::Wire => CMatrix::identity(2 * q),
        Diagram::Neg => permutation_map(1, q, |c, p| (c.flip(), p)),
        Diagram::Swap => permutation_map(2, q, |c, p| (c, 1 - p)),
        Diagram::Pbs => permutation_map(2, q, |c, p| match c {
            Polarisation::H => (c, p),
            Polarisation::V => (c, 1 - p),
        }),
        Diagram::Gate(g) => {
            let u = g.to_matrix(q)?;
            let mut m = CMatrix::zeros(2 * q, 2 * q);
            for c in [Polarisation::H, Polarisation::V] {
                for y in 0..q {
                    for x in 0..q {
                        m[(basis_index(1, q, c, 0, y), basis_index(1, q, c, 0, x))] = u[(y, x)];
                    }
                }
            }
            m
        }
        Diagram::Compose(after, before) => raw(after, q)?.mul(&raw(before, q)?)?,
        Diagram::Tensor(top, bottom) => {
            let (n1, n2) = (top.arity()?, bottom.arity()?);
            block_sum(&raw(top, q)?, n1, &raw(bottom, q)?, n2, q)
        }
        Diagram::Trace(inner) => {
            let m = inner.arity()?;
            trace_operator(&raw(inner, q)?, m - 1, q)?
        }
    })
}

/// `f ⊞ g`: the direct sum reindexed so that the wires of `g` follow those
/// of `f`.
pub fn block_sum(f: &CMatrix, n1: usize, g: &CMatrix, n2: usize, q: usize) -> CMatrix {
    let n = n1 + n2;
    let dim = 2 * n * q;
    let mut m = CMatrix::zeros(dim, dim);
    let embed = |i: usize, k: usize, off: usize| {
        let (c, p, x) = decode(k, q, i);
        basis_index(n, q, c, p + off, x)
    };
    for i in 0..2 * n1 * q {
        for j in 0..2 * n1 * q {
            m[(embed(i, n1, 0), embed(j, n1, 0))] = f[(i, j)];
        }
    }
    for i in 0..2 * n2 * q {
        for j in 0..2 * n2 * q {
            m[(embed(i, n2, n1), embed(j, n2, n1))] = g[(i, j)];
        }
    }
    m
}

/// The terms `π₁ (f π₀)^k f ι` of the trace series for `k = 0..=k_max`, for
/// `f` on `H_{n+1}` with the last wire as the loop wire.
pub fn trace_series_terms(f: &CMatrix, n: usize, q: usize, k_max: usize) -> Result<Vec<CMatrix>, DenotError> {
    let big = 2 * (n + 1) * q;
    let small = 2 * n * q;
    let outer: Vec<usize> = (0..small)
        .map(|i| {
            let (c, p, x) = decode(n, q, i);
            basis_index(n + 1, q, c, p, x)
        })
        .collect();
    let is_loop = |i: usize| decode(n + 1, q, i).1 == n;
    // a = f ι, a (big × small)
    let mut a = CMatrix::zeros(big, small);
    for r in 0..big {
        for (j, &src) in outer.iter().enumerate() {
            a[(r, j)] = f[(r, src)];
        }
    }
    let mut terms = Vec::with_capacity(k_max + 1);
    for k in 0..=k_max {
        let mut term = CMatrix::zeros(small, small);
        for (i, &row) in outer.iter().enumerate() {
            for j in 0..small {
                term[(i, j)] = a[(row, j)];
            }
        }
        terms.push(term);
        if k == k_max {
            break;
        }
        for r in 0..big {
            if !is_loop(r) {
                for j in 0..small {
                    a[(r, j)] = C64::new(0.0, 0.0);
                }
            }
        }
        a = f.mul(&a)?;
    }
    Ok(terms)
}

/// `T(f) = Σ_k π₁ (f π₀)^k f ι` for `f` on `H_{n+1}`, with the last wire as
/// the loop wire. The series stops after `k = 2`; the `k = 3` term is
/// required to be exactly zero.
pub fn trace_operator(f: &CMatrix, n: usize, q: usize) -> Result<CMatrix, DenotError> {
    let terms = trace_series_terms(f, n, q, 3)?;
    if terms[3].data().iter().any(|z| z.re != 0.0 || z.im != 0.0) {
        return Err(DenotError::TraceSeries(3));
    }
    let mut total = CMatrix::zeros(2 * n * q, 2 * n * q);
    for t in &terms[..3] {
        total = total.add(t)?;
    }
    Ok(total)
}

/// Checks that every basis vector is sent into a single `(c', p')` block and
/// that distinct input blocks reach distinct output blocks.
fn check_routed(m: &CMatrix, n: usize, q: usize) -> Result<(), DenotError> {
    let mut targets = vec![None; 2 * n];
    for col in 0..2 * n * q {
        let (c, p, _) = decode(n, q, col);
        let src = c.bit() * n + p;
        let mut block = None;
        for row in 0..2 * n * q {
            let z = m[(row, col)];
            if z.re != 0.0 || z.im != 0.0 {
                let b = row / q;
                if block.is_some_and(|x| x != b) {
                    return Err(DenotError::NotRouted(format!(
                        "column {col} spreads over several blocks"
                    )));
                }
                block = Some(b);
            }
        }
        if let Some(b) = block {
            if targets[src].is_some_and(|t| t != b) {
                return Err(DenotError::NotRouted(format!("block {src} splits")));
            }
            targets[src] = Some(b);
        }
    }
    let mut hit = vec![false; 2 * n];
    for t in targets.into_iter().flatten() {
        if hit[t] {
            return Err(DenotError::NotRouted("two blocks reach the same output".into()));
        }
        hit[t] = true;
    }
    Ok(())
}

/// The structured map read off the path semantics.
pub fn denote_structured(d: &Diagram, q: usize) -> Result<LinearMap, DenotError> {
    let map = routed_map(d)?;
    Ok(LinearMap::Structured {
        q,
        map: map.collapsed(),
    })
}

/// Expands `|c,p,x⟩ ↦ |τ(c,p)⟩ ⊗ U_{c,p}|x⟩` into a dense matrix.
pub fn dense_from_routed(map: &RoutedMap, q: usize) -> Result<DenseMap, DenotError> {
    let n = map.n;
    let mut m = CMatrix::zeros(2 * n * q, 2 * n * q);
    for s in Config::all(n) {
        let t = map.tau_of(s);
        let u = map.entry(s).to_matrix(q)?;
        for y in 0..q {
            for x in 0..q {
                m[(basis_index(n, q, t.pol, t.pos, y), basis_index(n, q, s.pol, s.pos, x))] = u[(y, x)];
            }
        }
    }
    Ok(DenseMap { n, q, matrix: m })
}

/// Compares the literal denotation with the path-derived one.
pub fn adequacy_check(d: &Diagram, q: usize, tol: f64) -> Result<bool, DenotError> {
    let raw = denote_raw(d, q)?;
    let structured = denote_structured(d, q)?.to_dense()?;
    Ok(mat_eq(&raw.matrix, &structured.matrix, tol)?)
}

/// Applies a linear map to a state.
pub fn apply(m: &LinearMap, s: &StateVector) -> Result<StateVector, DenotError> {
    if m.n() != s.n || m.q() != s.q {
        return Err(DenotError::DimensionMismatch(format!(
            "map on (n={}, q={}) applied to state on (n={}, q={})",
            m.n(),
            m.q(),
            s.n,
            s.q
        )));
    }
    let (n, q) = (s.n, s.q);
    match m {
        LinearMap::Dense(d) => Ok(StateVector {
            n,
            q,
            amplitudes: d.matrix.mul_vec(&s.amplitudes)?,
        }),
        LinearMap::Structured { map, .. } => {
            let mut out = StateVector::zero(n, q);
            for c in Config::all(n) {
                let t = map.tau_of(c);
                let u = map.entry(c).to_matrix(q)?;
                let block: Vec<C64> = (0..q).map(|x| s.amp(c.pol, c.pos, x)).collect();
                let img = u.mul_vec(&block)?;
                for (y, z) in img.into_iter().enumerate() {
                    out.amplitudes[basis_index(n, q, t.pol, t.pos, y)] += z;
                }
            }
            Ok(out)
        }
    }
}

/// Outcome of the commutation experiment.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Commutation {
    pub p_plus: f64,
    pub p_minus: f64,
    /// Set when the output norm drifted from 1 by more than 1e-9 and the
    /// probabilities were renormalised.
    pub renormalized: bool,
}

/// Runs the quantum switch of `u` and `v` on `(|H⟩+|V⟩)/√2 ⊗ |0, x⟩` and
/// returns the weights of the control outcomes `(|H⟩ ± |V⟩)/√2`.
pub fn commutation_test(u: &CMatrix, v: &CMatrix, x: usize) -> Result<Commutation, DenotError> {
    let q = u.rows();
    if v.rows() != q || x >= q {
        return Err(DenotError::DimensionMismatch(format!(
            "q = {q}, v is {}x{}, x = {x}",
            v.rows(),
            v.cols()
        )));
    }
    if !u.is_unitary(1e-8) || !v.is_unitary(1e-8) {
        return Err(DenotError::NotUnitary);
    }
    let qs = qs_builder(GateElement::Numeric(u.clone()), GateElement::Numeric(v.clone()));
    let map = LinearMap::Dense(denote_raw(&qs, q)?);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut input = StateVector::zero(1, q);
    input.amplitudes[basis_index(1, q, Polarisation::H, 0, x)] = C64::new(h, 0.0);
    input.amplitudes[basis_index(1, q, Polarisation::V, 0, x)] = C64::new(h, 0.0);
    let out = apply(&map, &input)?;
    let (mut plus, mut minus) = (0.0, 0.0);
    for y in 0..q {
        let a = out.amp(Polarisation::H, 0, y);
        let b = out.amp(Polarisation::V, 0, y);
        plus += ((a + b) * h).norm_sqr();
        minus += ((a - b) * h).norm_sqr();
    }
    let norm2 = out.norm().powi(2);
    let renormalized = (norm2.sqrt() - 1.0).abs() > 1e-9;
    if renormalized {
        plus /= norm2;
        minus /= norm2;
    }
    Ok(Commutation {
        p_plus: plus,
        p_minus: minus,
        renormalized,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{random_diagram, GateSource, GenConfig};
    use crate::linalg::{pauli_x, pauli_z, random_unitary};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use Polarisation::{H, V};

    fn num(m: &CMatrix) -> GateElement {
        GateElement::Numeric(m.clone())
    }

    #[test]
    fn pbs_reflects_vertical() {
        let d = denote_raw(&Diagram::Pbs, 2).unwrap();
        for p in 0..2 {
            for x in 0..2 {
                let s = StateVector::basis(2, 2, V, p, x);
                let out = apply(&LinearMap::Dense(d.clone()), &s).unwrap();
                assert_eq!(out, StateVector::basis(2, 2, V, 1 - p, x));
            }
        }
    }

    #[test]
    fn empty_is_zero_dimensional() {
        let d = denote_raw(&Diagram::Empty, 3).unwrap();
        assert_eq!((d.matrix.rows(), d.matrix.cols()), (0, 0));
    }

    #[test]
    fn quantum_switch_on_paulis() {
        let (x, z) = (pauli_x(), pauli_z());
        let d = denote_raw(&qs_builder(num(&x), num(&z)), 2).unwrap();
        let xz = x.mul(&z).unwrap();
        for b in 0..2 {
            let out = apply(&LinearMap::Dense(d.clone()), &StateVector::basis(1, 2, V, 0, b)).unwrap();
            for y in 0..2 {
                assert!((out.amp(V, 0, y) - xz[(y, b)]).norm() < 1e-12);
                assert_eq!(out.amp(H, 0, y), C64::new(0.0, 0.0));
            }
        }
    }

    #[test]
    fn structured_map_of_switch() {
        let x = GateElement::symbol("U");
        let y = GateElement::symbol("V");
        match denote_structured(&qs_builder(x, y), 2).unwrap() {
            LinearMap::Structured { map, .. } => {
                assert_eq!(map.entry(Config::new(V, 0)).to_string(), "UV");
                assert_eq!(map.entry(Config::new(H, 0)).to_string(), "VU");
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn generators_are_adequate() {
        let u = num(&random_unitary(2, 1));
        for d in [
            Diagram::Empty,
            Diagram::Wire,
            Diagram::Neg,
            Diagram::Swap,
            Diagram::Pbs,
            Diagram::Gate(u),
        ] {
            assert!(adequacy_check(&d, 2, 1e-12).unwrap());
        }
    }

    #[test]
    fn switch_of_random_unitaries_is_adequate() {
        let d = qs_builder(num(&random_unitary(2, 5)), num(&random_unitary(2, 6)));
        assert!(adequacy_check(&d, 2, 1e-10).unwrap());
    }

    #[test]
    fn random_diagrams_are_adequate_and_unitary() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for i in 0..100 {
            let q = 1 + i % 3;
            let cfg = GenConfig::new(5, 25, GateSource::Unitary(q));
            let d = random_diagram(1 + i % 4, &cfg, &mut rng);
            assert!(adequacy_check(&d, q, 1e-9).unwrap());
            assert!(denote_raw(&d, q).unwrap().matrix.is_unitary(1e-9));
        }
    }

    #[test]
    fn dense_and_structured_application_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(22);
        let cfg = GenConfig::new(4, 15, GateSource::Gaussian(2));
        for _ in 0..20 {
            let d = random_diagram(3, &cfg, &mut rng);
            let dense = LinearMap::Dense(denote_raw(&d, 2).unwrap());
            let st = denote_structured(&d, 2).unwrap();
            let s = StateVector {
                n: 3,
                q: 2,
                amplitudes: crate::linalg::random_gaussian(12, &mut rng).row(0).to_vec(),
            };
            let (a, b) = (apply(&dense, &s).unwrap(), apply(&st, &s).unwrap());
            for (x, y) in a.amplitudes.iter().zip(&b.amplitudes) {
                assert!((x - y).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn block_sum_restricts_to_components() {
        let u = num(&random_unitary(2, 8));
        let top = Diagram::seq([Diagram::Pbs, Diagram::tensor(Diagram::Gate(u), Diagram::Neg)]);
        let joint = denote_raw(&Diagram::tensor(top.clone(), Diagram::Neg), 2).unwrap();
        let alone = denote_raw(&top, 2).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let (ci, pi, xi) = decode(2, 2, i);
                let (cj, pj, xj) = decode(2, 2, j);
                let big = joint.matrix[(basis_index(3, 2, ci, pi, xi), basis_index(3, 2, cj, pj, xj))];
                assert_eq!(big, alone.matrix[(i, j)]);
            }
        }
    }

    #[test]
    fn commutation_outcomes() {
        let (x, z) = (pauli_x(), pauli_z());
        let r = commutation_test(&x, &z, 0).unwrap();
        assert!(r.p_plus.abs() < 1e-9 && (r.p_minus - 1.0).abs() < 1e-9);
        let d1 = CMatrix::diag(&[C64::new(0.0, 1.0), C64::new(1.0, 0.0)]);
        let d2 = CMatrix::diag(&[C64::new(-1.0, 0.0), C64::from_polar(1.0, 0.3)]);
        let r = commutation_test(&d1, &d2, 1).unwrap();
        assert!((r.p_plus - 1.0).abs() < 1e-9 && r.p_minus.abs() < 1e-9);
        let u = random_unitary(3, 2);
        let r = commutation_test(&u, &u, 2).unwrap();
        assert!((r.p_plus - 1.0).abs() < 1e-9);
        let bad = CMatrix::diag(&[C64::new(2.0, 0.0), C64::new(1.0, 0.0)]);
        assert_eq!(commutation_test(&bad, &x, 0), Err(DenotError::NotUnitary));
    }
}
