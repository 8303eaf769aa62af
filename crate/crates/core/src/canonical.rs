//! Canonical forms `P ∘ E`: a gate-free routing diagram `P` synthesised from
//! the permutation `τ`, after one filter `E(U_p, V_p)` per wire. Two diagrams
//! are equivalent exactly when their canonical forms coincide.

use thiserror::Error;

use crate::diagram::{embed, filter_builder, Diagram, Flat, GateElement, GateError, Polarisation};
use crate::path::{routed_map, Config, PathError, RoutedMap};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CanonError {
    #[error("routing is not a bijection")]
    NotBijective,
    #[error(transparent)]
    Path(#[from] PathError),
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error("canonical form does not reproduce the routed map: {0}")]
    RoundTrip(String),
    #[error("canonical and routed-map equivalence tests disagree")]
    Disagreement,
}

/// A diagram in canonical form on `n` wires.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalForm {
    pub n: usize,
    pub routing: Diagram,
    /// `(U_p, V_p)`: the matrices collected by horizontal and vertical input
    /// on wire `p`.
    pub filters: Vec<(GateElement, GateElement)>,
}

/// The adjacent transpositions, in application order, that realise `tau`
/// when applied left to right. Transposition `j` exchanges states `j` and
/// `j + 1` of the order `(H,0), (V,0), (H,1), …`.
pub fn transpositions(tau: &[Config]) -> Result<Vec<usize>, CanonError> {
    let mut arr: Vec<usize> = tau.iter().map(|c| c.index()).collect();
    let mut seen = vec![false; arr.len()];
    for &a in &arr {
        if a >= arr.len() || seen[a] {
            return Err(CanonError::NotBijective);
        }
        seen[a] = true;
    }
    let mut out = Vec::new();
    loop {
        let mut swapped = false;
        for j in 0..arr.len().saturating_sub(1) {
            if arr[j] > arr[j + 1] {
                arr.swap(j, j + 1);
                out.push(j);
                swapped = true;
            }
        }
        if !swapped {
            return Ok(out);
        }
    }
}

/// The diagram exchanging states `j` and `j + 1` on `n` wires and fixing
/// every other state.
pub fn transposition_gadget(j: usize, n: usize) -> Diagram {
    let p = j / 2;
    if j.is_multiple_of(2) {
        embed(Diagram::Neg, p, n)
    } else {
        let neg = Diagram::tensor(Diagram::Wire, Diagram::Neg);
        embed(Diagram::seq([neg.clone(), Diagram::Pbs, neg]), p, n)
    }
}

/// A gate-free, trace-free diagram whose routing is `tau`.
pub fn synthesize_routing(tau: &[Config]) -> Result<Diagram, CanonError> {
    if !tau.len().is_multiple_of(2) {
        return Err(CanonError::NotBijective);
    }
    let n = tau.len() / 2;
    let ts = transpositions(tau)?;
    if ts.is_empty() {
        return Ok(Diagram::wires(n));
    }
    Ok(Diagram::seq(ts.into_iter().map(|j| transposition_gadget(j, n))))
}

/// Drops identity symbols from words; the empty word becomes `I`.
fn normalise_entry(g: &GateElement) -> GateElement {
    match g {
        GateElement::Word(w) => {
            let reduced: Vec<_> = w.iter().filter(|s| !s.is_identity()).cloned().collect();
            if reduced.is_empty() {
                GateElement::identity_symbol()
            } else {
                GateElement::Word(reduced)
            }
        }
        other => other.clone(),
    }
}

/// The canonical form of a routed map.
pub fn canonical_of(map: &RoutedMap) -> Result<CanonicalForm, CanonError> {
    let routing = synthesize_routing(&map.tau)?;
    let filters = (0..map.n)
        .map(|p| {
            (
                normalise_entry(map.entry(Config::new(Polarisation::H, p))),
                normalise_entry(map.entry(Config::new(Polarisation::V, p))),
            )
        })
        .collect();
    Ok(CanonicalForm {
        n: map.n,
        routing,
        filters,
    })
}

/// Canonicalises `d` and checks that the result has the same routed map.
pub fn canonicalize(d: &Diagram) -> Result<CanonicalForm, CanonError> {
    let map = routed_map(d)?;
    let cf = canonical_of(&map)?;
    let back = routed_map(&cf.as_diagram())?;
    if let Some((c, why)) = back.first_difference(&map, crate::linalg::DEFAULT_TOL)? {
        return Err(CanonError::RoundTrip(format!("{c}: {why}")));
    }
    Ok(cf)
}

impl CanonicalForm {
    /// `routing ∘ (E(U_0,V_0) ⊗ … ⊗ E(U_{n-1},V_{n-1}))`.
    pub fn as_diagram(&self) -> Diagram {
        let filters = Diagram::par(self.filters.iter().map(|(u, v)| filter_builder(u.clone(), v.clone())));
        Diagram::seq([filters, self.routing.clone()])
    }

    /// Structural equality with gate comparison at `tol`.
    pub fn same_as(&self, other: &CanonicalForm, tol: f64) -> Result<bool, GateError> {
        if self.n != other.n || crate::flatten(&self.routing) != crate::flatten(&other.routing) {
            return Ok(false);
        }
        for ((u1, v1), (u2, v2)) in self.filters.iter().zip(&other.filters) {
            if !u1.equals(u2, tol)? || !v1.equals(v2, tol)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    pub fn routing_flat(&self) -> Flat {
        crate::flatten(&self.routing)
    }
}

/// Semantic equivalence, decided twice: by canonical forms and by routed
/// maps. The two answers must agree.
pub fn equivalent(d1: &Diagram, d2: &Diagram, tol: f64) -> Result<bool, CanonError> {
    let (m1, m2) = (routed_map(d1)?, routed_map(d2)?);
    if m1.n != m2.n {
        return Ok(false);
    }
    let by_map = m1.equals(&m2, tol)?;
    let by_form = canonical_of(&m1)?.same_as(&canonical_of(&m2)?, tol)?;
    if by_map != by_form {
        return Err(CanonError::Disagreement);
    }
    Ok(by_map)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagram::{qs_builder, random_diagram, GateSource, GenConfig};
    use crate::path::eval_path;
    use rand::seq::SliceRandom;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use Polarisation::{H, V};

    fn random_tau(n: usize, rng: &mut ChaCha8Rng) -> Vec<Config> {
        let mut v: Vec<Config> = Config::all(n).collect();
        v.shuffle(rng);
        v
    }

    #[test]
    fn identity_routing_is_wires() {
        let tau: Vec<Config> = Config::all(3).collect();
        assert_eq!(synthesize_routing(&tau).unwrap(), Diagram::wires(3));
    }

    #[test]
    fn polarisation_flip_is_neg() {
        let tau = vec![Config::new(V, 0), Config::new(H, 0)];
        assert_eq!(synthesize_routing(&tau).unwrap(), Diagram::Neg);
    }

    #[test]
    fn gadgets_fix_all_other_states() {
        for j in 0..3 {
            let g = transposition_gadget(j, 2);
            for s in Config::all(2) {
                let out = eval_path(&g, s.pol, s.pos).unwrap().out;
                let expected = if s.index() == j {
                    Config::from_index(j + 1)
                } else if s.index() == j + 1 {
                    Config::from_index(j)
                } else {
                    s
                };
                assert_eq!(out, expected, "gadget {j} on {s}");
            }
        }
    }

    #[test]
    fn synthesis_realises_random_permutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for i in 0..48 {
            let n = 1 + i % 4;
            let tau = random_tau(n, &mut rng);
            let d = synthesize_routing(&tau).unwrap();
            let m = routed_map(&d).unwrap();
            assert_eq!(m.tau, tau);
            assert!(m.table.iter().all(GateElement::is_identity));
            assert!(d.gates().is_empty() && d.count_traces() == 0);
            assert!(d.generator_count() <= 3 * n * (2 * n) * (2 * n));
        }
    }

    #[test]
    fn non_bijective_is_rejected() {
        let tau = vec![Config::new(H, 0), Config::new(H, 0)];
        assert_eq!(synthesize_routing(&tau), Err(CanonError::NotBijective));
    }

    #[test]
    fn canonical_examples() {
        let cf = canonicalize(&Diagram::Wire).unwrap();
        assert_eq!(cf.routing, Diagram::Wire);
        assert!(cf.filters[0].0.is_identity() && cf.filters[0].1.is_identity());
        let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
        let cf = canonicalize(&qs).unwrap();
        assert_eq!(cf.routing, Diagram::Wire);
        assert_eq!(cf.filters[0].0.to_string(), "VU");
        assert_eq!(cf.filters[0].1.to_string(), "UV");
        let m1 = routed_map(&cf.as_diagram()).unwrap();
        assert!(m1.equals(&routed_map(&qs).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn identity_form_on_two_wires() {
        let cf = canonicalize(&Diagram::wires(2)).unwrap();
        let expect = Diagram::seq([
            Diagram::par([
                filter_builder(GateElement::identity_symbol(), GateElement::identity_symbol()),
                filter_builder(GateElement::identity_symbol(), GateElement::identity_symbol()),
            ]),
            Diagram::wires(2),
        ]);
        assert_eq!(cf.as_diagram(), expect);
    }

    #[test]
    fn equivalence_examples() {
        let nn = Diagram::seq([Diagram::Neg, Diagram::Neg]);
        assert!(equivalent(&nn, &Diagram::Wire, 1e-9).unwrap());
        assert!(!equivalent(&Diagram::Pbs, &Diagram::Swap, 1e-9).unwrap());
    }

    #[test]
    fn canonical_round_trip_on_random_diagrams() {
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        let cfg = GenConfig::new(6, 30, GateSource::Symbolic(vec!["A".into(), "B".into()]));
        for i in 0..200 {
            let d = random_diagram(1 + i % 5, &cfg, &mut rng);
            let cf = canonicalize(&d).unwrap();
            let again = canonicalize(&cf.as_diagram()).unwrap();
            assert!(cf.same_as(&again, 0.0).unwrap());
        }
    }
}
