//! Constructors for the named diagrams used throughout the toolkit: the
//! quantum switch, the filter `E(U,V)`, the two loop shapes, controlled
//! permutations and the two-wire obstruction example `D_U`.

use super::{Diagram, DiagramError, GateElement, Polarisation};

/// Quantum switch: `Tr(Swap ∘ Pbs ∘ (U ⊗ V) ∘ Pbs)`.
pub fn qs_builder(u: GateElement, v: GateElement) -> Diagram {
    Diagram::trace(Diagram::seq([
        Diagram::Pbs,
        Diagram::tensor(Diagram::Gate(u), Diagram::Gate(v)),
        Diagram::Pbs,
        Diagram::Swap,
    ]))
}

/// The filter `E(U,V)`: horizontal input collects `u` on wire 0, vertical
/// input crosses to the loop wire, collects `v` and crosses back. The loop
/// wire is never fed back.
pub fn filter_builder(u: GateElement, v: GateElement) -> Diagram {
    Diagram::trace(Diagram::seq([
        Diagram::Pbs,
        Diagram::tensor(Diagram::Gate(u), Diagram::Gate(v)),
        Diagram::Pbs,
    ]))
}

/// The traversing loop `Tr(Pbs ; (Wire ⊗ U))`: vertical input goes once
/// around the loop through `u`, horizontal input passes untouched.
pub fn traverse_loop(u: GateElement) -> Diagram {
    Diagram::trace(Diagram::seq([
        Diagram::Pbs,
        Diagram::tensor(Diagram::Wire, Diagram::Gate(u)),
    ]))
}

/// The rebounding loop `Tr(Pbs ; Swap ; (Wire ⊗ U))`: horizontal input goes
/// once around the loop through `u`, vertical input passes untouched.
pub fn rebound_loop(u: GateElement) -> Diagram {
    Diagram::trace(Diagram::seq([
        Diagram::Pbs,
        Diagram::Swap,
        Diagram::tensor(Diagram::Wire, Diagram::Gate(u)),
    ]))
}

/// Places `d` on wires `offset..offset + arity(d)` of an `n`-wire diagram.
pub fn embed(d: Diagram, offset: usize, n: usize) -> Diagram {
    let k = d.arity().expect("embed needs a well-typed diagram");
    assert!(offset + k <= n, "embedding exceeds the wire count");
    let parts = [Diagram::wires(offset), d, Diagram::wires(n - offset - k)];
    Diagram::par(parts.into_iter().filter(|p| *p != Diagram::Empty))
}

/// `Wire ⊗ E(U, I)`: a two-wire diagram whose only non-identity path is
/// horizontal input on wire 1, which collects `u`.
pub fn d_u(u: GateElement) -> Diagram {
    Diagram::tensor(Diagram::Wire, filter_builder(u, GateElement::identity_symbol()))
}

fn layer(gates: &[GateElement]) -> Diagram {
    Diagram::par(gates.iter().cloned().map(Diagram::Gate))
}

fn b(p: usize) -> Diagram {
    embed(Diagram::Pbs, p, 3)
}

fn x(p: usize) -> Diagram {
    embed(Diagram::Swap, p, 3)
}

fn negs(mask: [bool; 3]) -> Diagram {
    Diagram::par(mask.map(|m| if m { Diagram::Neg } else { Diagram::Wire }))
}

/// Controlled permutation of `gates`. For three gates this is the
/// three-wire diagram whose routing block moves horizontal photons one wire
/// down and vertical photons one wire up (cyclically) between the three
/// gate layers. For `n ≥ 4` gates it is the parallel family of two-wire
/// motifs on `n!/2` wires, one motif per permutation with both trailing
/// pairs in increasing order.
pub fn controlled_permutation_builder(n: usize, gates: &[GateElement]) -> Result<Diagram, DiagramError> {
    if n < 3 {
        return Err(DiagramError::ArityTooSmall(n));
    }
    if gates.len() != n {
        return Err(DiagramError::GateCount {
            expected: n,
            found: gates.len(),
        });
    }
    if n == 3 {
        let routing = || Diagram::seq([b(1), x(1), b(0), x(0), b(0), b(1)]);
        let g = || layer(gates);
        return Ok(Diagram::seq([g(), routing(), g(), routing(), g(), routing()]));
    }
    let motifs = motif_permutations(n).into_iter().map(|sigma| motif(&sigma, gates));
    Ok(Diagram::par(motifs))
}

/// The second three-wire controlled permutation, with the same semantics as
/// `controlled_permutation_builder(3, gates)` but a routing block made of
/// beam splitters conjugated by negations instead of swaps.
pub fn perm3_right(gates: &[GateElement]) -> Result<Diagram, DiagramError> {
    if gates.len() != 3 {
        return Err(DiagramError::GateCount {
            expected: 3,
            found: gates.len(),
        });
    }
    let routing = || {
        Diagram::seq([
            negs([false, true, true]),
            b(1),
            negs([true, false, true]),
            b(0),
            negs([true, true, false]),
            b(0),
            b(1),
        ])
    };
    let g = || layer(gates);
    Ok(Diagram::seq([g(), routing(), g(), routing(), g(), routing()]))
}

fn motif_permutations(n: usize) -> Vec<Vec<usize>> {
    all_permutations(n)
        .into_iter()
        .filter(|s| s[n - 4] < s[n - 3] && s[n - 2] < s[n - 1])
        .collect()
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    fn go(prefix: &mut Vec<usize>, used: &mut [bool], out: &mut Vec<Vec<usize>>) {
        if prefix.len() == used.len() {
            out.push(prefix.clone());
            return;
        }
        for i in 0..used.len() {
            if !used[i] {
                used[i] = true;
                prefix.push(i);
                go(prefix, used, out);
                prefix.pop();
                used[i] = false;
            }
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), &mut vec![false; n], &mut out);
    out
}

fn is_even(perm: &[usize]) -> bool {
    let mut inversions = 0;
    for i in 0..perm.len() {
        for j in i + 1..perm.len() {
            if perm[i] > perm[j] {
                inversions += 1;
            }
        }
    }
    inversions % 2 == 0
}

fn motif(sigma: &[usize], gates: &[GateElement]) -> Diagram {
    let n = sigma.len();
    let g = |i: usize| Diagram::Gate(gates[sigma[i]].clone());
    let pair = |i: usize, j: usize| Diagram::tensor(g(i), g(j));
    let mut layers: Vec<Diagram> = (0..n - 4).map(|i| pair(i, i)).collect();
    layers.extend([
        pair(n - 4, n - 3),
        Diagram::Swap,
        pair(n - 4, n - 3),
        Diagram::Pbs,
        pair(n - 2, n - 1),
        Diagram::Swap,
        pair(n - 2, n - 1),
        Diagram::Pbs,
    ]);
    if is_even(sigma) {
        let nn = || Diagram::tensor(Diagram::Neg, Diagram::Neg);
        layers.insert(0, nn());
        layers.push(nn());
    }
    Diagram::seq(layers)
}

/// Gate indices in application order along the path of input `(c, x)` in
/// `controlled_permutation_builder(n, ..)`. Horizontal input always yields
/// an even permutation and vertical input an odd one.
pub fn permutation_for(n: usize, c: Polarisation, x: usize) -> Vec<usize> {
    if n == 3 {
        return (0..3)
            .map(|k| match c {
                Polarisation::H => (x + k) % 3,
                Polarisation::V => (x + 3 - k) % 3,
            })
            .collect();
    }
    let sigma = &motif_permutations(n)[x / 2];
    let local = x % 2;
    let eff = if is_even(sigma) { c.flip() } else { c };
    let (a, b, d, e) = (sigma[n - 4], sigma[n - 3], sigma[n - 2], sigma[n - 1]);
    let mut order: Vec<usize> = sigma[..n - 4].to_vec();
    order.extend(match (eff, local) {
        (Polarisation::H, 0) => [a, b, e, d],
        (Polarisation::H, _) => [b, a, d, e],
        (Polarisation::V, 0) => [a, b, d, e],
        (Polarisation::V, _) => [b, a, e, d],
    });
    order
}

/// The sign of the permutation of gate indices; `true` for even.
pub fn permutation_is_even(order: &[usize]) -> bool {
    is_even(order)
}
