//! The equational theory as data: axioms, derived equations and a few
//! structural rules, each a pair of patterns. Rules are matched modulo
//! flattening, applied at a site in either direction, and verified sound by
//! randomised comparison of routed maps.

mod derivation;
mod library;
mod pattern;

use std::fmt;
use std::sync::OnceLock;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::diagram::{flatten, random_diagram, Diagram, Flat, GateElement, GateSource, GenConfig};
use crate::linalg::{random_gaussian, DEFAULT_TOL};
use crate::path::{routed_map_flat, Config, PathError};

pub use derivation::{
    controlled_permutation_script, double_negation_script, random_rewrites, replay_derivation, replay_flat, Derivation,
    Step,
};
pub use library::{planted_unsound_rule, rule_catalogue, unverified_library, CatalogueEntry};
pub use pattern::{
    find_sites, instantiate, match_node, replace, site_matches, Bindings, Bound, GatePat, HoleArity, Location,
    MatchSite, Pat, Underdetermined,
};

/// Where a rule comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RuleStatus {
    Axiom,
    Derived,
    /// Laws of traced monoidal categories that flattening does not absorb,
    /// used to shuffle wires in derivations.
    Structural,
}

impl fmt::Display for RuleStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuleStatus::Axiom => "axiom",
            RuleStatus::Derived => "derived",
            RuleStatus::Structural => "structural",
        })
    }
}

/// Constraints on the gates of a rule beyond plain metavariables.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SideCondition {
    None,
    /// Some position must hold the identity gate.
    RequiresIdentityGate,
    /// Some gate is a product of metavariables.
    DerivedGateExpression,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Self {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }
}

/// An equation `lhs = rhs` between patterns.
#[derive(Debug, Clone, PartialEq)]
pub struct RewriteRule {
    pub name: String,
    pub lhs: Pat,
    pub rhs: Pat,
    pub status: RuleStatus,
    /// Rules used to derive this one, for documentation.
    pub depends_on: Vec<String>,
}

impl RewriteRule {
    pub fn new(name: &str, status: RuleStatus, lhs: Pat, rhs: Pat) -> Self {
        RewriteRule {
            name: name.to_string(),
            lhs,
            rhs,
            status,
            depends_on: Vec::new(),
        }
    }

    pub fn depending_on(mut self, names: &[&str]) -> Self {
        self.depends_on = names.iter().map(|s| s.to_string()).collect();
        self
    }

    /// Gate metavariables of both sides.
    pub fn metavars(&self) -> Vec<String> {
        let mut vars = self.lhs.gate_vars();
        for v in self.rhs.gate_vars() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars
    }

    pub fn holes(&self) -> Vec<(String, HoleArity)> {
        let mut holes = self.lhs.holes();
        for h in self.rhs.holes() {
            if !holes.iter().any(|(n, _)| *n == h.0) {
                holes.push(h);
            }
        }
        holes
    }

    pub fn side_condition(&self) -> SideCondition {
        if self.lhs.has_product() || self.rhs.has_product() {
            SideCondition::DerivedGateExpression
        } else if self.lhs.has_identity_gate() || self.rhs.has_identity_gate() {
            SideCondition::RequiresIdentityGate
        } else {
            SideCondition::None
        }
    }

    /// The arity of the rule, when it does not depend on holes.
    pub fn arity(&self) -> Option<usize> {
        self.lhs.arity().or(self.rhs.arity())
    }

    /// `(matched side, produced side)` for a direction.
    pub fn sides(&self, dir: Direction) -> (&Pat, &Pat) {
        match dir {
            Direction::Forward => (&self.lhs, &self.rhs),
            Direction::Backward => (&self.rhs, &self.lhs),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RulesError {
    #[error("site no longer matches rule `{rule}`")]
    StaleSite { rule: String },
    #[error("step {step}: {source}")]
    Step {
        step: usize,
        #[source]
        source: Box<RulesError>,
    },
    #[error("step {step}: rule `{rule}` has {found} site(s), occurrence {wanted} requested")]
    NoSuchOccurrence {
        step: usize,
        rule: String,
        wanted: usize,
        found: usize,
    },
    #[error("unknown rule `{0}`")]
    UnknownRule(String),
    #[error("metavariable `{0}` is not determined by the match")]
    Underdetermined(String),
    #[error("step {step}: routed map changed after `{rule}`: {detail}")]
    MapChanged { step: usize, rule: String, detail: String },
    #[error("library rules failed verification: {0:?}")]
    LibraryUnsound(Vec<String>),
    #[error(transparent)]
    Path(#[from] PathError),
}

/// Every site of the matched side of `rule` in `flatten(d)`.
pub fn find_matches(rule: &RewriteRule, d: &Diagram, dir: Direction) -> Vec<MatchSite> {
    find_sites(rule.sides(dir).0, &flatten(d))
}

/// Applies `rule` at `site` of a flattened subject. `extra` supplies
/// metavariables the matched side does not determine.
pub fn apply_flat(
    rule: &RewriteRule,
    subject: &Flat,
    site: &MatchSite,
    dir: Direction,
    extra: &Bindings,
) -> Result<Flat, RulesError> {
    let (matched, produced) = rule.sides(dir);
    if !site_matches(matched, subject, site) {
        return Err(RulesError::StaleSite {
            rule: rule.name.clone(),
        });
    }
    let mut bindings = site.bindings.clone();
    for (k, v) in extra {
        bindings.entry(k.clone()).or_insert_with(|| v.clone());
    }
    let inst = instantiate(produced, &bindings).map_err(|Underdetermined(n)| RulesError::Underdetermined(n))?;
    let out = replace(subject, &site.location, inst).ok_or_else(|| RulesError::StaleSite {
        rule: rule.name.clone(),
    })?;
    #[cfg(debug_assertions)]
    if let (Ok(before), Ok(after)) = (routed_map_flat(subject), routed_map_flat(&out)) {
        debug_assert!(
            after.equals(&before, 1e-8).unwrap_or(true),
            "rule `{}` changed the routed map",
            rule.name
        );
    }
    Ok(out)
}

/// Applies `rule` at `site` of `d` (a site from [`find_matches`]).
pub fn apply_rule(
    rule: &RewriteRule,
    d: &Diagram,
    site: &MatchSite,
    dir: Direction,
    extra: &Bindings,
) -> Result<Diagram, RulesError> {
    apply_flat(rule, &flatten(d), site, dir, extra).map(|f| f.to_diagram())
}

/// A failed soundness trial.
#[derive(Debug, Clone, PartialEq)]
pub struct Counterexample {
    pub trial: usize,
    pub bindings: String,
    pub config: Option<Config>,
    pub detail: String,
}

/// Result of randomised soundness verification.
#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessReport {
    pub rule: String,
    pub q: usize,
    pub trials: usize,
    pub counterexample: Option<Counterexample>,
}

impl SoundnessReport {
    pub fn passed(&self) -> bool {
        self.counterexample.is_none()
    }
}

fn describe(b: &Bindings) -> String {
    let parts: Vec<String> = b
        .iter()
        .map(|(k, v)| match v {
            Bound::Gate(g) => format!("{k} = {g}"),
            Bound::Diagram(d) => format!("{k} = {d}"),
            Bound::Arity(n) => format!("{k} : {n} wires"),
        })
        .collect();
    parts.join(", ")
}

fn random_bindings(rule: &RewriteRule, q: usize, symbolic: bool, rng: &mut ChaCha8Rng) -> Bindings {
    let mut b = Bindings::new();
    for v in rule.metavars() {
        let g = if symbolic {
            GateElement::symbol(v.clone())
        } else {
            GateElement::numeric(random_gaussian(q, rng))
        };
        b.insert(v, Bound::Gate(g));
    }
    let source = if symbolic {
        GateSource::Symbolic(vec!["P".into(), "Q".into()])
    } else {
        GateSource::Gaussian(q)
    };
    let cfg = GenConfig::new(4, 6, source);
    for (name, arity) in rule.holes() {
        let n = match arity {
            HoleArity::Exactly(k) => k,
            HoleArity::AtLeast(k) => rng.random_range(k.max(1)..=k.max(1) + 1),
        };
        b.insert(name, Bound::Diagram(flatten(&random_diagram(n, &cfg, rng))));
    }
    b
}

/// Instantiates both sides of `rule` `trials` times and compares their
/// routed maps: `τ` exactly and matrices at 1e-9. Trial 0 uses distinct
/// symbols, so products are checked as words; the others use Gaussian
/// q×q matrices.
pub fn verify_soundness(rule: &RewriteRule, q: usize, trials: usize, seed: u64) -> SoundnessReport {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut report = SoundnessReport {
        rule: rule.name.clone(),
        q,
        trials,
        counterexample: None,
    };
    for trial in 0..trials {
        // Holes get independent random arities; redraw until both sides are
        // well typed, which ties together holes composed in sequence.
        let mut b = random_bindings(rule, q, trial == 0, &mut rng);
        for _ in 0..100 {
            let typed = |p: &Pat| {
                instantiate(p, &b)
                    .map(|f| f.to_diagram().arity().is_ok())
                    .unwrap_or(true)
            };
            if typed(&rule.lhs) && typed(&rule.rhs) {
                break;
            }
            b = random_bindings(rule, q, trial == 0, &mut rng);
        }
        let fail = |config: Option<Config>, detail: String| Counterexample {
            trial,
            bindings: describe(&b),
            config,
            detail,
        };
        let sides = instantiate(&rule.lhs, &b).and_then(|l| Ok((l, instantiate(&rule.rhs, &b)?)));
        let (l, r) = match sides {
            Ok(s) => s,
            Err(Underdetermined(n)) => {
                report.counterexample = Some(fail(None, format!("metavariable `{n}` is undetermined")));
                return report;
            }
        };
        let outcome = match (routed_map_flat(&l), routed_map_flat(&r)) {
            (Ok(ml), Ok(mr)) => match ml.first_difference(&mr, DEFAULT_TOL) {
                Ok(None) => None,
                Ok(Some((c, why))) => Some(fail(Some(c), why)),
                Err(e) => Some(fail(None, e.to_string())),
            },
            (Err(e), _) | (_, Err(e)) => Some(fail(None, e.to_string())),
        };
        if outcome.is_some() {
            report.counterexample = outcome;
            return report;
        }
    }
    report
}

/// The verified library: every rule passes [`verify_soundness`] with 100
/// trials at q = 1 and q = 2. Verification runs once per process.
pub fn rule_library() -> Result<&'static [RewriteRule], RulesError> {
    static LIBRARY: OnceLock<Result<Vec<RewriteRule>, RulesError>> = OnceLock::new();
    LIBRARY
        .get_or_init(|| {
            let rules = unverified_library();
            let failed: Vec<String> = rules
                .iter()
                .enumerate()
                .flat_map(|(i, r)| {
                    [1, 2].map(|q| {
                        let rep = verify_soundness(r, q, 100, 1000 + i as u64);
                        rep.counterexample
                            .map(|c| format!("{} (q={q}, trial {}): {} [{}]", r.name, c.trial, c.detail, c.bindings))
                    })
                })
                .flatten()
                .collect();
            if failed.is_empty() {
                Ok(rules)
            } else {
                Err(RulesError::LibraryUnsound(failed))
            }
        })
        .as_ref()
        .map(Vec::as_slice)
        .map_err(Clone::clone)
}

/// Looks up a rule of the verified library by name.
pub fn rule(name: &str) -> Result<&'static RewriteRule, RulesError> {
    rule_library()?
        .iter()
        .find(|r| r.name == name)
        .ok_or_else(|| RulesError::UnknownRule(name.to_string()))
}
