//! Shared fixtures for the pbs-core benchmarks.

use pbs_core::diagram::{random_diagram, GateSource, GenConfig};
use pbs_core::Diagram;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// `count` seeded random diagrams of the given arity. `q = 0` gives
/// symbolic gates, otherwise Gaussian q×q matrices.
pub fn corpus(seed: u64, count: usize, arity: usize, max_gens: usize, q: usize) -> Vec<Diagram> {
    let gates = if q == 0 {
        GateSource::Symbolic(vec!["U".into(), "V".into(), "W".into()])
    } else {
        GateSource::Gaussian(q)
    };
    let cfg = GenConfig::new(arity + 2, max_gens, gates);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_diagram(arity, &cfg, &mut rng)).collect()
}
