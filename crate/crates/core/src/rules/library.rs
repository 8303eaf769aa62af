//! The rule tables: ten axioms, the derived equations and the structural
//! rules used by derivation scripts.

use super::pattern::{HoleArity, Pat};
use super::{verify_soundness, RewriteRule, RuleStatus, SideCondition, SoundnessReport};

const W: Pat = Pat::Wire;
const N: Pat = Pat::Neg;
const X: Pat = Pat::Swap;
const B: Pat = Pat::Pbs;

fn g(name: &str) -> Pat {
    Pat::gate(name)
}

fn i() -> Pat {
    Pat::identity_gate()
}

fn seq<const K: usize>(items: [Pat; K]) -> Pat {
    Pat::seq(items.into())
}

fn par<const K: usize>(items: [Pat; K]) -> Pat {
    Pat::par(items.into())
}

fn tr(inner: Pat) -> Pat {
    Pat::trace(inner)
}

/// The filter `E(u, v)`.
fn e(u: Pat, v: Pat) -> Pat {
    tr(seq([B, par([u, v]), B]))
}

/// The traversing loop: vertical input collects `u`.
fn trav(u: Pat) -> Pat {
    tr(seq([B, par([W, u])]))
}

/// The rebounding loop: horizontal input collects `u`.
fn reb(u: Pat) -> Pat {
    tr(seq([B, X, par([W, u])]))
}

/// A two-wire generator placed on wires `p, p + 1` of three.
fn on3(p: usize, gen: Pat) -> Pat {
    if p == 0 {
        par([gen, W])
    } else {
        par([W, gen])
    }
}

fn b3(p: usize) -> Pat {
    on3(p, B)
}

fn x3(p: usize) -> Pat {
    on3(p, X)
}

fn n3(p: usize) -> Pat {
    let mut wires = [W, W, W];
    wires[p] = N;
    Pat::par(wires.into())
}

fn hole(name: &str) -> Pat {
    Pat::hole(name, HoleArity::AtLeast(1))
}

fn one_wire_hole(name: &str) -> Pat {
    Pat::hole(name, HoleArity::Exactly(1))
}

fn axiom(name: &str, lhs: Pat, rhs: Pat) -> RewriteRule {
    RewriteRule::new(name, RuleStatus::Axiom, lhs, rhs)
}

fn derived(name: &str, lhs: Pat, rhs: Pat) -> RewriteRule {
    RewriteRule::new(name, RuleStatus::Derived, lhs, rhs)
}

fn structural(name: &str, lhs: Pat, rhs: Pat) -> RewriteRule {
    RewriteRule::new(name, RuleStatus::Structural, lhs, rhs)
}

fn axioms() -> Vec<RewriteRule> {
    vec![
        axiom("idbox", i(), W),
        axiom("negu", seq([N, g("U")]), seq([g("U"), N])),
        axiom("bsuu", seq([par([g("U"), g("U")]), B]), seq([B, par([g("U"), g("U")])])),
        axiom(
            "duplicateloop",
            tr(seq([B, par([W, g("U")]), B, par([W, g("V")])])),
            trav(g("U")),
        ),
        axiom("bsnnnn", seq([par([N, N]), B, par([N, N])]), seq([B, X])),
        axiom("fusion", seq([g("U"), g("V")]), Pat::product(&["V", "U"])),
        axiom("loopemptysimple", tr(g("U")), Pat::Empty),
        axiom("bsbs", seq([B, B]), Pat::wires(2)),
        axiom("bsbsbs", seq([b3(0), b3(1), b3(0)]), seq([x3(0), b3(1), x3(0)])),
        axiom("bsnbsh", seq([B, par([N, W]), B]), seq([par([N, W]), B, par([N, W])])),
    ]
}

fn derived_rules() -> Vec<RewriteRule> {
    let (u, v) = (|| g("U"), || g("V"));
    vec![
        derived("negneg", seq([N, N]), W).depending_on(&["loopemptysimple", "idbox", "bsbs", "bsnnnn", "bsnbsh"]),
        derived("neguv", seq([N, e(u(), v())]), seq([e(v(), u()), N])),
        derived(
            "bsuvh",
            seq([par([e(u(), v()), W]), B]),
            seq([B, par([e(u(), i()), e(i(), v())])]),
        ),
        derived(
            "bsuvb",
            seq([par([W, e(u(), v())]), B]),
            seq([B, par([e(i(), v()), e(u(), i())])]),
        ),
        derived(
            "fusionuv",
            seq([e(u(), v()), e(g("U'"), g("V'"))]),
            e(Pat::product(&["U'", "U"]), Pat::product(&["V'", "V"])),
        ),
        derived("nbs", seq([par([W, N]), B]), seq([par([N, W]), B, par([N, N]), X])),
        derived("swapbsx", seq([X, B]), seq([B, X])).depending_on(&["bsnnnn", "negneg", "bsbs"]),
        derived("swapbsbsvar", seq([b3(1), b3(0)]), seq([x3(0), b3(0), b3(1), x3(0)])),
        derived(
            "bsnbsesc",
            seq([b3(1), n3(1), b3(0)]),
            seq([n3(0), b3(0), n3(1), x3(0), b3(1), n3(1)]),
        )
        .depending_on(&["nbs", "swapbsbsvar", "swapbsx"]),
        derived("bsxbs", seq([b3(0), x3(1), b3(0)]), seq([b3(1), b3(0), x3(1)]))
            .depending_on(&["swapbsx", "swapbsbsbvar"]),
        derived(
            "bsnbsb",
            seq([B, par([W, N]), B]),
            seq([par([N, W]), B, par([W, N]), X]),
        ),
        derived("bsnnbs", seq([B, par([N, N]), B]), seq([par([N, N]), X])),
        derived("bsbsbsvar", seq([b3(1), b3(0), b3(1)]), seq([x3(1), b3(0), x3(1)]))
            .depending_on(&["swapbsx", "bsbsbs"]),
        derived("swapbsbsbvar", seq([b3(1), b3(0)]), seq([x3(1), b3(0), b3(1), x3(1)])),
        derived("bsxbsvar", seq([b3(1), x3(0), b3(1)]), seq([x3(0), b3(1), b3(0)])),
        derived("loopI", trav(i()), W),
        derived("splituv", seq([reb(u()), trav(v())]), e(u(), v())),
        derived(
            "rebondisbsb",
            seq([par([W, reb(u())]), B]),
            seq([B, par([W, reb(u())])]),
        ),
        derived(
            "traversebshb",
            seq([par([trav(u()), W]), B]),
            seq([B, par([W, trav(u())])]),
        ),
        derived(
            "rebondisbsh",
            seq([par([reb(u()), W]), B]),
            seq([B, par([reb(u()), W])]),
        ),
        derived(
            "traversebsbh",
            seq([par([W, trav(u())]), B]),
            seq([B, par([trav(u()), W])]),
        ),
        derived(
            "bouclesrebondistraversecommutent",
            seq([reb(u()), trav(v())]),
            seq([trav(v()), reb(u())]),
        ),
        derived(
            "fusionboucletraverse",
            seq([trav(u()), trav(v())]),
            trav(Pat::product(&["V", "U"])),
        ),
        derived(
            "fusionbouclerebondis",
            seq([reb(u()), reb(v())]),
            reb(Pat::product(&["V", "U"])),
        ),
        derived("loopempty", tr(e(u(), v())), Pat::Empty),
        derived("loopnegempty", tr(seq([e(u(), v()), N])), Pat::Empty),
        derived("truvbs", tr(seq([par([W, e(u(), v())]), B])), e(i(), v())),
        derived(
            "truvbsnb",
            tr(seq([par([W, e(u(), v())]), B, par([W, N])])),
            e(i(), Pat::product(&["V", "U"])),
        ),
        derived("truvbsx", tr(seq([par([W, e(u(), v())]), B, X])), e(u(), i())),
        derived(
            "truvbsnhx",
            tr(seq([par([W, e(u(), v())]), B, par([N, W]), X])),
            e(Pat::product(&["U", "V"]), i()),
        ),
        derived("spliti", W, e(i(), i())),
        derived("NFneg", N, seq([e(i(), i()), N])),
        derived("splitu", g("U"), e(u(), u())).depending_on(&["loopemptysimple", "bsbs", "bsuu"]),
        derived("NFswap", X, seq([par([e(i(), i()), e(i(), i())]), X])),
        derived("NFbs", B, seq([par([e(i(), i()), e(i(), i())]), B])),
        derived("loopid", tr(B), W),
        derived("rebondisnegtraverse", seq([reb(u()), N]), seq([N, trav(u())]))
            .depending_on(&["bsnnnn", "negneg", "negu"]),
        derived("traversenegrebondis", seq([trav(u()), N]), seq([N, reb(u())]))
            .depending_on(&["negneg", "negu", "bsnnnn"]),
    ]
}

fn structural_rules() -> Vec<RewriteRule> {
    let (a, b, c) = (|| hole("A"), || hole("B"), || hole("C"));
    vec![
        structural("swapswap", seq([X, X]), Pat::wires(2)),
        structural("yanking", tr(X), W),
        structural(
            "superpose",
            par([a(), tr(Pat::hole("F", HoleArity::AtLeast(1)))]),
            tr(par([a(), Pat::hole("F", HoleArity::AtLeast(1))])),
        ),
        structural(
            "interchange",
            par([a(), b()]),
            seq([par([a(), Pat::id_of("B")]), par([Pat::id_of("A"), b()])]),
        ),
        structural(
            "interchange_rev",
            par([a(), b()]),
            seq([par([Pat::id_of("A"), b()]), par([a(), Pat::id_of("B")])]),
        ),
        structural(
            "par_seq_split",
            par([seq([a(), b()]), c()]),
            seq([par([a(), c()]), par([b(), Pat::id_of("C")])]),
        ),
        structural(
            "natswap",
            seq([par([one_wire_hole("A"), one_wire_hole("B")]), X]),
            seq([X, par([one_wire_hole("B"), one_wire_hole("A")])]),
        ),
    ]
}

/// All rules in library order (axioms, derived equations, structural
/// rules), before verification.
pub fn unverified_library() -> Vec<RewriteRule> {
    let mut rules = axioms();
    rules.extend(derived_rules());
    rules.extend(structural_rules());
    rules
}

/// A deliberately wrong rule, `Pbs = Swap`, used to check that soundness
/// verification can fail.
pub fn planted_unsound_rule() -> RewriteRule {
    RewriteRule::new("unsound_pbs_swap", RuleStatus::Axiom, B, X)
}

/// One row of the rule catalogue.
#[derive(Debug, Clone, PartialEq)]
pub struct CatalogueEntry {
    pub name: String,
    pub status: RuleStatus,
    pub arity: Option<usize>,
    pub side_condition: SideCondition,
    pub depends_on: Vec<String>,
    pub reports: Vec<SoundnessReport>,
}

/// Every library rule with fresh verification reports at q = 1 and q = 2.
pub fn rule_catalogue(trials: usize, seed: u64) -> Vec<CatalogueEntry> {
    unverified_library()
        .into_iter()
        .enumerate()
        .map(|(k, r)| CatalogueEntry {
            reports: [1, 2]
                .iter()
                .map(|&q| verify_soundness(&r, q, trials, seed.wrapping_add(k as u64)))
                .collect(),
            name: r.name.clone(),
            status: r.status,
            arity: r.arity(),
            side_condition: r.side_condition(),
            depends_on: r.depends_on,
        })
        .collect()
}
