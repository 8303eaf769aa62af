//! Replaying derivations: sequences of rule applications whose every
//! intermediate diagram keeps the routed map of the start.

use rand::seq::IndexedRandom;
use rand::Rng;

use super::pattern::{find_sites, Bindings, Bound};
use super::{apply_flat, rule, rule_library, Direction, RulesError};
use crate::diagram::{flatten, Diagram, Flat, GateElement};
use crate::linalg::DEFAULT_TOL;
use crate::path::routed_map_flat;

/// One rewriting step: apply `rule` in `direction` at the `occurrence`-th
/// site (in [`find_sites`] order), with `extra` bindings for metavariables
/// the matched side leaves open.
#[derive(Debug, Clone, PartialEq)]
pub struct Step {
    pub rule: String,
    pub direction: Direction,
    pub occurrence: usize,
    pub extra: Bindings,
}

impl Step {
    pub fn forward(rule: &str, occurrence: usize) -> Self {
        Step {
            rule: rule.to_string(),
            direction: Direction::Forward,
            occurrence,
            extra: Bindings::new(),
        }
    }

    pub fn backward(rule: &str, occurrence: usize) -> Self {
        Step {
            direction: Direction::Backward,
            ..Step::forward(rule, occurrence)
        }
    }

    pub fn with_gate(mut self, name: &str, g: GateElement) -> Self {
        self.extra.insert(name.to_string(), Bound::Gate(g));
        self
    }
}

/// A replayed derivation with every intermediate diagram.
#[derive(Debug, Clone, PartialEq)]
pub struct Derivation {
    /// `diagrams[0]` is the start and `diagrams[k]` the result of step `k`.
    pub diagrams: Vec<Flat>,
}

impl Derivation {
    pub fn result(&self) -> &Flat {
        self.diagrams.last().expect("a derivation has a start")
    }
}

/// Replays `steps` from `start`, checking the routed map after each step.
pub fn replay_flat(steps: &[Step], start: &Flat) -> Result<Derivation, RulesError> {
    let reference = routed_map_flat(start)?;
    let mut diagrams = vec![start.clone()];
    for (k, step) in steps.iter().enumerate() {
        let wrap = |e: RulesError| RulesError::Step {
            step: k,
            source: Box::new(e),
        };
        let r = rule(&step.rule).map_err(wrap)?;
        let current = diagrams.last().unwrap();
        let sites = find_sites(r.sides(step.direction).0, current);
        let site = sites.get(step.occurrence).ok_or_else(|| RulesError::NoSuchOccurrence {
            step: k,
            rule: step.rule.clone(),
            wanted: step.occurrence,
            found: sites.len(),
        })?;
        let next = apply_flat(r, current, site, step.direction, &step.extra).map_err(wrap)?;
        let map = routed_map_flat(&next).map_err(|e| wrap(e.into()))?;
        let diff = map
            .first_difference(&reference, DEFAULT_TOL)
            .map_err(|e| RulesError::MapChanged {
                step: k,
                rule: step.rule.clone(),
                detail: e.to_string(),
            })?;
        if let Some((c, why)) = diff {
            return Err(RulesError::MapChanged {
                step: k,
                rule: step.rule.clone(),
                detail: format!("{c}: {why}"),
            });
        }
        diagrams.push(next);
    }
    Ok(Derivation { diagrams })
}

/// Replays `steps` on `d` and returns the final diagram.
pub fn replay_derivation(steps: &[Step], d: &Diagram) -> Result<Diagram, RulesError> {
    Ok(replay_flat(steps, &flatten(d))?.result().to_diagram())
}

/// Applies `steps` random library rewrites to `start`: a random rule, a
/// random direction and a random site, with open metavariables bound to a
/// gate already present in the diagram or to the identity. Rewrites that
/// fail or push the diagram past `max_generators` generators are skipped;
/// the search gives up after `50 * steps` attempts.
pub fn random_rewrites<R: Rng>(
    start: &Flat,
    steps: usize,
    max_generators: usize,
    rng: &mut R,
) -> Result<(Flat, Vec<Step>), RulesError> {
    let library = rule_library()?;
    let mut current = start.clone();
    let mut script = Vec::new();
    for _ in 0..50 * steps {
        if script.len() == steps {
            break;
        }
        let r = library.choose(rng).expect("the library is not empty");
        let direction = if rng.random_bool(0.5) {
            Direction::Forward
        } else {
            Direction::Backward
        };
        let sites = find_sites(r.sides(direction).0, &current);
        if sites.is_empty() {
            continue;
        }
        let occurrence = rng.random_range(0..sites.len());
        let site = &sites[occurrence];
        let mut gates: Vec<GateElement> = current.gates().into_iter().cloned().collect();
        gates.push(GateElement::identity_symbol());
        let mut extra = Bindings::new();
        for v in r.metavars() {
            if !site.bindings.contains_key(&v) {
                let g = gates.choose(rng).expect("identity is always available").clone();
                extra.insert(v, Bound::Gate(g));
            }
        }
        let Ok(next) = apply_flat(r, &current, site, direction, &extra) else {
            continue;
        };
        if next.generator_count() > max_generators {
            continue;
        }
        current = next;
        script.push(Step {
            rule: r.name.clone(),
            direction,
            occurrence,
            extra,
        });
    }
    Ok((current, script))
}

/// Rewrites `Neg ; Neg` into `Wire` using only axioms and structural rules.
/// The negations are moved under a fresh loop, replaced by beam splitters
/// conjugated by negations, and the loop is removed again.
pub fn double_negation_script() -> Vec<Step> {
    use Step as S;
    vec![
        // Introduce an empty loop next to the diagram and make it a wire.
        S::backward("loopemptysimple", 0).with_gate("U", GateElement::identity_symbol()),
        S::forward("idbox", 0),
        S::forward("superpose", 0),
        // Insert Pbs ; Swap ; Swap ; Pbs after the negations.
        S::backward("bsbs", 1),
        S::backward("swapswap", 2),
        S::backward("bsnnnn", 0),
        // Spread the negations over single layers.
        S::forward("par_seq_split", 0),
        S::forward("interchange_rev", 2),
        S::forward("interchange", 4),
        S::backward("bsnbsh", 0),
        S::backward("interchange", 0),
        S::forward("interchange_rev", 1),
        S::backward("bsnbsh", 0),
        S::forward("bsbs", 0),
        // Collect the remaining negations and cancel everything.
        S::backward("interchange", 0),
        S::backward("interchange", 0),
        S::forward("bsnnnn", 0),
        S::forward("swapswap", 0),
        S::forward("bsbs", 0),
        // Remove the loop.
        S::backward("superpose", 0),
        S::backward("idbox", 3),
        S::forward("loopemptysimple", 0),
    ]
}

/// Rewrites `controlled_permutation_builder(3, [U1, U2, U3])` into
/// `perm3_right([U1, U2, U3])`. Each routing block `Pbs ; Swap` is unfolded into negations around a beam
/// splitter, after which adjacent negations cancel.
pub fn controlled_permutation_script() -> Vec<Step> {
    let mut steps = vec![Step::backward("bsnnnn", 0); 6];
    steps.extend(vec![Step::forward("negneg", 0); 3]);
    steps
}
