//! Seeded random diagrams for property tests, acceptance runs and soundness
//! fuzzing.

use rand::Rng;

use super::{Diagram, GateElement};
use crate::linalg::{random_gaussian, random_unitary_with};

/// Where gate labels come from.
#[derive(Debug, Clone, PartialEq)]
pub enum GateSource {
    /// No gates at all.
    None,
    /// Unannotated symbols drawn from the list.
    Symbolic(Vec<String>),
    /// Complex Gaussian q×q matrices (invertible with probability one).
    Gaussian(usize),
    /// Haar-random q×q unitaries.
    Unitary(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub max_wires: usize,
    pub max_gens: usize,
    pub trace_prob: f64,
    pub gates: GateSource,
}

impl GenConfig {
    pub fn new(max_wires: usize, max_gens: usize, gates: GateSource) -> Self {
        GenConfig {
            max_wires,
            max_gens,
            trace_prob: 0.35,
            gates,
        }
    }
}

/// A random well-typed diagram of the given arity with at most
/// `max(cfg.max_gens, arity)` generators and at most `cfg.max_wires` wires
/// at any point, trace wires included.
pub fn random_diagram<R: Rng + ?Sized>(arity: usize, cfg: &GenConfig, rng: &mut R) -> Diagram {
    let budget = cfg.max_gens.max(arity);
    gen(arity, budget, 0, cfg, rng)
}

/// `outside` counts the wires in use next to this subterm.
fn gen<R: Rng + ?Sized>(arity: usize, budget: usize, outside: usize, cfg: &GenConfig, rng: &mut R) -> Diagram {
    if arity == 0 {
        if budget >= 1 && outside < cfg.max_wires && rng.random_bool(0.5) {
            return Diagram::trace(gen(1, budget, outside, cfg, rng));
        }
        return Diagram::Empty;
    }
    if budget < arity + 1 || rng.random_bool(0.2) {
        return leaf(arity, cfg, rng);
    }
    let can_trace = arity + outside < cfg.max_wires && budget > arity;
    let can_compose = budget >= 2 * arity;
    let can_tensor = arity >= 2;
    loop {
        let roll: f64 = rng.random();
        if can_trace && roll < cfg.trace_prob {
            return Diagram::trace(gen(arity + 1, budget, outside, cfg, rng));
        }
        if can_compose && roll < 0.75 {
            let b1 = rng.random_range(arity..=budget - arity);
            let first = gen(arity, b1, outside, cfg, rng);
            let second = gen(arity, budget - b1, outside, cfg, rng);
            return first.then(second);
        }
        if can_tensor {
            let a1 = rng.random_range(1..arity);
            let b1 = budget * a1 / arity;
            let top = gen(a1, b1, outside + arity - a1, cfg, rng);
            let bottom = gen(arity - a1, budget - b1, outside + a1, cfg, rng);
            return Diagram::tensor(top, bottom);
        }
        if !can_trace && !can_compose {
            return leaf(arity, cfg, rng);
        }
    }
}

fn leaf<R: Rng + ?Sized>(arity: usize, cfg: &GenConfig, rng: &mut R) -> Diagram {
    let mut parts = Vec::new();
    let mut left = arity;
    while left > 0 {
        if left >= 2 && rng.random_bool(0.4) {
            parts.push(if rng.random_bool(0.5) {
                Diagram::Pbs
            } else {
                Diagram::Swap
            });
            left -= 2;
        } else {
            parts.push(match rng.random_range(0..3) {
                0 => Diagram::Wire,
                1 => Diagram::Neg,
                _ => random_gate(&cfg.gates, rng).map_or(Diagram::Wire, Diagram::Gate),
            });
            left -= 1;
        }
    }
    Diagram::par(parts)
}

/// A gate label from the source, or `None` for a gate-free source.
pub fn random_gate<R: Rng + ?Sized>(source: &GateSource, rng: &mut R) -> Option<GateElement> {
    match source {
        GateSource::None => None,
        GateSource::Symbolic(names) if names.is_empty() => None,
        GateSource::Symbolic(names) => Some(GateElement::symbol(names[rng.random_range(0..names.len())].clone())),
        GateSource::Gaussian(q) => Some(GateElement::Numeric(random_gaussian(*q, rng))),
        GateSource::Unitary(q) => Some(GateElement::Numeric(random_unitary_with(*q, rng))),
    }
}

/// Maximum number of simultaneous wires, trace wires included.
pub fn max_width(d: &Diagram) -> usize {
    let own = d.arity().unwrap_or(0);
    let inner = match d {
        Diagram::Trace(a) => max_width(a),
        Diagram::Compose(a, b) => max_width(a).max(max_width(b)),
        Diagram::Tensor(a, b) => {
            let (la, lb) = (a.arity().unwrap_or(0), b.arity().unwrap_or(0));
            (max_width(a) + lb).max(max_width(b) + la)
        }
        _ => 0,
    };
    own.max(inner)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generated_diagrams_respect_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let cfg = GenConfig::new(6, 30, GateSource::Symbolic(vec!["U".into(), "V".into()]));
        let mut traces = 0;
        for _ in 0..500 {
            let n = rng.random_range(1..=5);
            let d = random_diagram(n, &cfg, &mut rng);
            assert_eq!(d.arity(), Ok(n));
            assert!(d.generator_count() <= 30);
            assert!(max_width(&d) <= 6);
            traces += d.count_traces();
        }
        assert!(traces > 0);
    }
}
