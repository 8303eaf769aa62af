//! Property tests over seeded random diagrams.

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use pbs_core::canonical::{canonical_of, canonicalize, synthesize_routing};
use pbs_core::denot::adequacy_check;
use pbs_core::diagram::{random_diagram, GateSource, GenConfig};
use pbs_core::frontend::{parse, print_module};
use pbs_core::path::{gate_usage, max_trace_count};
use pbs_core::rules::{random_rewrites, replay_flat};
use pbs_core::unroll::{check_unrollable, unroll};
use pbs_core::{eval_path, flatten, routed_map, Config, Diagram};

fn symbolic(seed: u64, arity: usize) -> Diagram {
    let cfg = GenConfig::new(5, 20, GateSource::Symbolic(vec!["U".into(), "V".into(), "W".into()]));
    random_diagram(arity, &cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

fn numeric(seed: u64, arity: usize, q: usize) -> Diagram {
    let cfg = GenConfig::new(5, 20, GateSource::Gaussian(q));
    random_diagram(arity, &cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn print_parse_round_trip(seed in any::<u64>(), arity in 0usize..5) {
        let d = symbolic(seed, arity);
        let back = parse(&print_module(&d, "d")).unwrap();
        prop_assert_eq!(flatten(back.definition("d").unwrap()), flatten(&d));
    }

    #[test]
    fn adequacy_holds(seed in any::<u64>(), arity in 1usize..4, q in 1usize..3) {
        prop_assert!(adequacy_check(&numeric(seed, arity, q), q, 1e-9).unwrap());
    }

    #[test]
    fn path_invariants(seed in any::<u64>(), arity in 1usize..5) {
        let d = symbolic(seed, arity);
        prop_assert!(routed_map(&d).unwrap().is_bijective());
        prop_assert!(max_trace_count(&d).unwrap() <= 2);
        prop_assert!(gate_usage(&d).unwrap().values().all(|s| s.len() <= 2));
    }

    #[test]
    fn flattening_preserves_semantics(seed in any::<u64>(), arity in 1usize..4) {
        let d = symbolic(seed, arity);
        let back = flatten(&d).to_diagram();
        prop_assert!(routed_map(&back).unwrap().equals(&routed_map(&d).unwrap(), 0.0).unwrap());
    }

    #[test]
    fn rewriting_preserves_canonical_form(seed in any::<u64>(), arity in 1usize..4, steps in 1usize..12) {
        let d = symbolic(seed, arity);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        let (out, script) = random_rewrites(&flatten(&d), steps, 60, &mut rng).unwrap();
        let replayed = replay_flat(&script, &flatten(&d)).unwrap();
        prop_assert_eq!(replayed.result(), &out);
        let (c1, c2) = (canonicalize(&d).unwrap(), canonicalize(&out.to_diagram()).unwrap());
        prop_assert_eq!(flatten(&c1.as_diagram()), flatten(&c2.as_diagram()));
    }

    #[test]
    fn canonical_form_is_a_fixed_point(seed in any::<u64>(), arity in 1usize..4) {
        let cf = canonicalize(&symbolic(seed, arity)).unwrap();
        let again = canonical_of(&routed_map(&cf.as_diagram()).unwrap()).unwrap();
        prop_assert_eq!(flatten(&again.as_diagram()), flatten(&cf.as_diagram()));
    }

    #[test]
    fn synthesis_realises_permutation(perm in Just((0..8).collect::<Vec<usize>>()).prop_shuffle()) {
        let tau: Vec<Config> = perm.iter().map(|&i| Config::from_index(i)).collect();
        let d = synthesize_routing(&tau).unwrap();
        for c in Config::all(4) {
            prop_assert_eq!(eval_path(&d, c.pol, c.pos).unwrap().out, tau[c.index()]);
        }
    }

    #[test]
    fn unrolling_preserves_the_map(seed in any::<u64>(), arity in 2usize..4) {
        let d = numeric(seed, arity, 2);
        prop_assume!(check_unrollable(&d).unwrap().eligible);
        let out = unroll(&d).unwrap();
        prop_assert_eq!(out.count_traces(), 0);
        let (a, b) = (routed_map(&d).unwrap().collapsed(), routed_map(&out).unwrap().collapsed());
        prop_assert!(a.equals(&b, 1e-8).unwrap());
    }
}
