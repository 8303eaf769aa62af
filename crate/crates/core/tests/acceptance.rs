//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any
//! criterion fails.

use std::fs;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use num_complex::Complex64 as C64;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pbs_core::canonical::{canonicalize, equivalent, synthesize_routing};
use pbs_core::denot::{basis_index, denote_raw, trace_series_terms};
use pbs_core::diagram::{
    controlled_permutation_builder, d_u, perm3_right, qs_builder, random_diagram, GateSource, GenConfig,
};
use pbs_core::frontend::{parse, print_module};
use pbs_core::linalg::{mat_eq, pauli_x, pauli_z, random_gaussian};
use pbs_core::path::{gate_usage, Config};
use pbs_core::rules::{
    controlled_permutation_script, double_negation_script, find_sites, planted_unsound_rule, random_rewrites, replace,
    replay_flat, rule_catalogue, verify_soundness,
};
use pbs_core::unroll::{
    check_unrollable, det_product, gate_det_square_product, noninvertible_path_count, path_matrices,
    tracefree_filter_gadget, unroll, Reason, UnrollError,
};
use pbs_core::{eval_path, flatten, routed_map, CMatrix, Diagram, Flat, GateElement, Polarisation};

type Outcome = Result<String, String>;

/// Name, optional runtime limit and the check itself.
type Criterion<'a> = (&'static str, Option<Duration>, Box<dyn Fn() -> Outcome + 'a>);

fn check(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// The shared random corpus: 1000 numeric diagrams on at most 5 wires with
/// at most 25 generators, q cycling through 1, 2, 3.
fn corpus() -> Vec<(Diagram, usize)> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    (0..1000)
        .map(|i| {
            let q = 1 + i % 3;
            let cfg = GenConfig::new(5, 25, GateSource::Gaussian(q));
            let arity = rng.random_range(1..=5);
            (random_diagram(arity, &cfg, &mut rng), q)
        })
        .collect()
}

fn quantum_switch() -> Outcome {
    let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
    let up = eval_path(&qs, Polarisation::V, 0).map_err(err)?;
    let right = eval_path(&qs, Polarisation::H, 0).map_err(err)?;
    let word = |g: &GateElement| g.reduced_names().map(|n| n.concat()).unwrap_or_default();
    check(word(&up.accumulated) == "UV", || {
        format!("↑ collects {}", up.accumulated)
    })?;
    check(word(&right.accumulated) == "VU", || {
        format!("→ collects {}", right.accumulated)
    })?;
    check(up.out == Config::new(Polarisation::V, 0), || {
        format!("↑ exits at {}", up.out)
    })?;
    check(right.out == Config::new(Polarisation::H, 0), || {
        format!("→ exits at {}", right.out)
    })?;

    // |↑,0,x⟩ ↦ |↑,0⟩ ⊗ XZ|x⟩ and |→,0,x⟩ ↦ |→,0⟩ ⊗ ZX|x⟩, written out by hand.
    let (x, z) = (pauli_x(), pauli_z());
    let xz = x.mul(&z).map_err(err)?;
    let zx = z.mul(&x).map_err(err)?;
    let mut expected = CMatrix::zeros(4, 4);
    for (pol, m) in [(Polarisation::V, &xz), (Polarisation::H, &zx)] {
        for r in 0..2 {
            for c in 0..2 {
                expected[(basis_index(1, 2, pol, 0, r), basis_index(1, 2, pol, 0, c))] = m[(r, c)];
            }
        }
    }
    let qs_num = qs_builder(GateElement::numeric(x), GateElement::numeric(z));
    let raw = denote_raw(&qs_num, 2).map_err(err)?;
    check(mat_eq(&raw.matrix, &expected, 1e-10).map_err(err)?, || {
        "dense denotation of the Pauli switch differs from the structured map".into()
    })?;
    Ok("↑ ↦ UV, → ↦ VU; Pauli X,Z map matches at 1e-10".into())
}

fn adequacy(corpus: &[(Diagram, usize)]) -> Outcome {
    for (i, (d, q)) in corpus.iter().enumerate() {
        let ok = pbs_core::denot::adequacy_check(d, *q, 1e-9).map_err(|e| format!("diagram {i}: {e}"))?;
        check(ok, || format!("diagram {i} (q={q}) violates adequacy: {d}"))?;
    }
    Ok(format!("{} diagrams agree at 1e-9", corpus.len()))
}

fn soundness() -> Outcome {
    let catalogue = rule_catalogue(100, 77);
    let failed: Vec<String> = catalogue
        .iter()
        .flat_map(|e| e.reports.iter())
        .filter(|r| !r.passed())
        .map(|r| format!("{} at q={}", r.rule, r.q))
        .collect();
    check(failed.is_empty(), || format!("unsound: {}", failed.join(", ")))?;
    let planted = verify_soundness(&planted_unsound_rule(), 2, 100, 77);
    let cx = planted
        .counterexample
        .ok_or("the planted unsound rule passed verification")?;
    let at = cx.config.map(|c| c.to_string()).unwrap_or_else(|| "-".into());
    Ok(format!(
        "{} rules pass at q=1,2 with 100 trials; planted rule caught at {at} in trial {}",
        catalogue.len(),
        cx.trial
    ))
}

fn completeness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let cfg = GenConfig::new(4, 10, GateSource::Symbolic(vec!["U".into(), "V".into(), "W".into()]));
    let mut total_steps = 0;
    for i in 0..300 {
        let d = random_diagram(rng.random_range(1..=3), &cfg, &mut rng);
        let wanted = rng.random_range(1..=20);
        let (rewritten, steps) = random_rewrites(&flatten(&d), wanted, 80, &mut rng).map_err(err)?;
        check(!steps.is_empty(), || format!("pair {i}: no rule applies to {d}"))?;
        total_steps += steps.len();
        let d2 = rewritten.to_diagram();
        let (c1, c2) = (canonicalize(&d).map_err(err)?, canonicalize(&d2).map_err(err)?);
        check(flatten(&c1.as_diagram()) == flatten(&c2.as_diagram()), || {
            format!("pair {i}: canonical forms differ\n  {d}\n  {d2}")
        })?;
    }

    let unsound = planted_unsound_rule();
    let mut different = 0;
    let mut attempts = 0;
    while different < 300 {
        attempts += 1;
        check(attempts < 10_000, || "could not draw enough distinct pairs".into())?;
        let n = rng.random_range(1..=3);
        let d1 = random_diagram(n, &cfg, &mut rng);
        let d2 = if different % 2 == 0 {
            random_diagram(n, &cfg, &mut rng)
        } else {
            // A near miss: one beam splitter of d1 replaced by a swap.
            let f = flatten(&d1);
            let sites = find_sites(&unsound.lhs, &f);
            let Some(site) = sites.get(rng.random_range(0..sites.len().max(1))) else {
                continue;
            };
            replace(&f, &site.location, Flat::Swap)
                .ok_or("beam splitter site could not be replaced")?
                .to_diagram()
        };
        let (m1, m2) = (routed_map(&d1).map_err(err)?, routed_map(&d2).map_err(err)?);
        if m1.collapsed().equals(&m2.collapsed(), 1e-9).map_err(err)? {
            continue;
        }
        different += 1;
        let (c1, c2) = (canonicalize(&d1).map_err(err)?, canonicalize(&d2).map_err(err)?);
        check(!c1.same_as(&c2, 1e-9).map_err(err)?, || {
            format!("semantically different diagrams share a canonical form\n  {d1}\n  {d2}")
        })?;
    }
    Ok(format!(
        "300 rewritten pairs ({total_steps} rule applications) agree; 300 distinct pairs differ"
    ))
}

fn controlled_permutation() -> Outcome {
    let symbols: Vec<GateElement> = (1..=3).map(|i| GateElement::symbol(format!("U{i}"))).collect();
    let left = controlled_permutation_builder(3, &symbols).map_err(err)?;
    let right = perm3_right(&symbols).map_err(err)?;
    check(equivalent(&left, &right, 1e-9).map_err(err)?, || {
        "symbolic pair not equivalent".into()
    })?;
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let numeric: Vec<GateElement> = (0..3)
        .map(|_| GateElement::numeric(random_gaussian(2, &mut rng)))
        .collect();
    let (ln, rn) = (
        controlled_permutation_builder(3, &numeric).map_err(err)?,
        perm3_right(&numeric).map_err(err)?,
    );
    check(equivalent(&ln, &rn, 1e-9).map_err(err)?, || {
        "numeric pair not equivalent".into()
    })?;
    let script = controlled_permutation_script();
    let derivation = replay_flat(&script, &flatten(&left)).map_err(err)?;
    check(*derivation.result() == flatten(&right), || {
        format!("script ends at {}", derivation.result())
    })?;
    Ok(format!(
        "pair equivalent; {}-step script replays with a constant map",
        script.len()
    ))
}

fn double_negation() -> Outcome {
    let nn = Diagram::seq([Diagram::Neg, Diagram::Neg]);
    let script = double_negation_script();
    let derivation = replay_flat(&script, &flatten(&nn)).map_err(err)?;
    check(derivation.result().to_diagram() == Diagram::Wire, || {
        format!("script ends at {}", derivation.result())
    })?;
    check(equivalent(&nn, &Diagram::Wire, 1e-9).map_err(err)?, || {
        "neg ; neg is not equivalent to id".into()
    })?;
    Ok(format!("{}-step script replays; neg ; neg ≡ id", script.len()))
}

fn trace_nodes<'a>(d: &'a Diagram, out: &mut Vec<&'a Diagram>) {
    if let Diagram::Trace(inner) = d {
        out.push(inner);
    }
    for c in d.children() {
        trace_nodes(c, out);
    }
}

fn trace_bound(corpus: &[(Diagram, usize)]) -> Outcome {
    let mut max_seen = 0;
    let mut traces = 0;
    for (i, (d, q)) in corpus.iter().enumerate() {
        let n = d.arity().map_err(err)?;
        for c in Config::all(n) {
            let r = eval_path(d, c.pol, c.pos).map_err(err)?;
            for (path, k) in r.trace_counts {
                check(k <= 2, || {
                    format!("diagram {i}: trace {path:?} traversed {k} times from {c}")
                })?;
                max_seen = max_seen.max(k);
            }
        }
        let mut bodies = Vec::new();
        trace_nodes(d, &mut bodies);
        for body in bodies {
            let m = body.arity().map_err(err)?;
            let f = denote_raw(body, *q).map_err(err)?.matrix;
            let terms = trace_series_terms(&f, m - 1, *q, 3).map_err(err)?;
            check(terms[3].data().iter().all(|z| z.re == 0.0 && z.im == 0.0), || {
                format!("diagram {i}: k = 3 term is nonzero")
            })?;
            traces += 1;
        }
    }
    check(max_seen == 2, || {
        format!("maximum traversal count is {max_seen}, expected 2 to occur")
    })?;
    Ok(format!(
        "counts in {{0,1,2}}, 2 attained; k = 3 term exactly zero on {traces} traces"
    ))
}

fn gate_usage_bound(corpus: &[(Diagram, usize)]) -> Outcome {
    let mut occurrences = 0;
    for (i, (d, _)) in corpus.iter().enumerate() {
        for (path, configs) in gate_usage(d).map_err(err)? {
            check(configs.len() <= 2, || {
                format!("diagram {i}: gate {path:?} serves {} paths", configs.len())
            })?;
            occurrences += 1;
        }
    }
    Ok(format!("{occurrences} gate occurrences serve at most 2 paths each"))
}

fn synthesis() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..100 {
        let n = 1 + i % 4;
        let mut tau: Vec<Config> = Config::all(n).collect();
        tau.shuffle(&mut rng);
        let d = synthesize_routing(&tau).map_err(err)?;
        for c in Config::all(n) {
            let r = eval_path(&d, c.pol, c.pos).map_err(err)?;
            check(r.out == tau[c.index()], || {
                format!("τ #{i}: {c} reaches {} not {}", r.out, tau[c.index()])
            })?;
            check(r.accumulated.is_identity(), || {
                format!("τ #{i}: {c} collects {}", r.accumulated)
            })?;
        }
    }
    Ok("100 permutations on n = 1..4 realised exactly".into())
}

fn relative_close(a: C64, b: C64, tol: f64) -> bool {
    (a - b).norm() <= tol * a.norm().max(b.norm()).max(1.0)
}

fn unrolling() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let mut done = 0;
    let mut traces = 0;
    while done < 300 {
        let q = 1 + done % 2;
        let cfg = GenConfig::new(4, 12, GateSource::Gaussian(q));
        let d = random_diagram(rng.random_range(2..=3), &cfg, &mut rng);
        if !check_unrollable(&d).map_err(err)?.eligible {
            continue;
        }
        traces += d.count_traces();
        let out = unroll(&d).map_err(|e| format!("{d}: {e}"))?;
        check(out.count_traces() == 0, || format!("{d}: output has traces"))?;
        let (before, after) = (routed_map(&d).map_err(err)?, routed_map(&out).map_err(err)?);
        check(
            after.collapsed().equals(&before.collapsed(), 1e-8).map_err(err)?,
            || format!("{d}: routed map changed"),
        )?;
        let (abs, sq) = (
            det_product(&out).map_err(err)?,
            gate_det_square_product(&out).map_err(err)?,
        );
        check(relative_close(abs, sq, 1e-8), || {
            format!("{d}: |D| = {abs} but ∏det² = {sq}")
        })?;
        done += 1;
    }
    let singular = CMatrix::from_real_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let du = d_u(GateElement::numeric(singular));
    match unroll(&du) {
        Err(UnrollError::Ineligible(reasons)) => check(
            reasons.iter().any(|r| matches!(r, Reason::NonInvertibleGate(_))),
            || format!("D_U rejected for {reasons:?}"),
        )?,
        other => return Err(format!("D_U with singular U was not rejected: {other:?}")),
    }
    let count = noninvertible_path_count(&du).map_err(err)?;
    check(count == 1, || format!("noninvertible_path_count(D_U) = {count}"))?;
    Ok(format!(
        "300 diagrams ({traces} traces) unrolled; |D| = ∏det² at 1e-8; singular D_U rejected, 1 singular path"
    ))
}

fn scalar_gadget() -> Outcome {
    let s = |x: f64| CMatrix::scalar(C64::new(x, 0.0));
    let d = tracefree_filter_gadget(&s(2.0), &s(3.0)).map_err(err)?;
    check(d.count_traces() == 0, || "gadget has traces".into())?;
    let got: Vec<C64> = path_matrices(&d).map_err(err)?.iter().map(|(_, m)| m[(0, 0)]).collect();
    for (g, want) in got.iter().zip([2.0, 3.0, 1.0, 1.0]) {
        check((g - C64::new(want, 0.0)).norm() <= 1e-12, || {
            format!("paths are {got:?}")
        })?;
    }
    Ok("paths (2, 3, 1, 1) at 1e-12".into())
}

fn parser() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let cfg = GenConfig::new(5, 25, GateSource::Symbolic(vec!["U".into(), "V".into(), "W".into()]));
    for i in 0..1000 {
        let d = random_diagram(rng.random_range(0..=5), &cfg, &mut rng);
        let text = print_module(&d, "d");
        let back = parse(&text).map_err(|e| format!("diagram {i}: {e}\n{text}"))?;
        let back = back.definition("d").ok_or("definition `d` missing")?;
        check(flatten(back) == flatten(&d), || format!("diagram {i} changed:\n{text}"))?;
    }
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/corpus");
    let mut rejected = 0;
    for entry in fs::read_dir(dir.join("ill_typed")).map_err(err)? {
        let path = entry.map_err(err)?.path();
        let text = fs::read_to_string(&path).map_err(err)?;
        match parse(&text) {
            Ok(_) => return Err(format!("{} was accepted", path.display())),
            Err(e) => {
                let (line, col) = e.location();
                check(line >= 1 && col >= 1, || {
                    format!("{}: no location in `{e}`", path.display())
                })?;
            }
        }
        rejected += 1;
    }
    for entry in fs::read_dir(dir.join("valid")).map_err(err)? {
        let path = entry.map_err(err)?.path();
        let text = fs::read_to_string(&path).map_err(err)?;
        parse(&text).map_err(|e| format!("{}: {e}", path.display()))?;
    }
    check(rejected > 0, || "no ill-typed corpus files found".into())?;
    Ok(format!(
        "1000 round trips identical; {rejected} ill-typed files rejected with locations"
    ))
}

fn main() -> ExitCode {
    let corpus = corpus();
    let criteria: Vec<Criterion<'_>> = vec![
        ("quantum switch", Some(Duration::from_secs(1)), Box::new(quantum_switch)),
        (
            "adequacy",
            Some(Duration::from_secs(60)),
            Box::new(|| adequacy(&corpus)),
        ),
        ("soundness", Some(Duration::from_secs(60)), Box::new(soundness)),
        ("completeness", Some(Duration::from_secs(120)), Box::new(completeness)),
        ("controlled permutation", None, Box::new(controlled_permutation)),
        ("double negation", None, Box::new(double_negation)),
        ("trace bound", None, Box::new(|| trace_bound(&corpus))),
        ("gate usage", None, Box::new(|| gate_usage_bound(&corpus))),
        ("synthesis", None, Box::new(synthesis)),
        ("loop unrolling", None, Box::new(unrolling)),
        ("scalar gadget", None, Box::new(scalar_gadget)),
        ("parser", None, Box::new(parser)),
    ];
    let mut failures = 0;
    for (k, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut outcome = run();
        let elapsed = start.elapsed();
        if let (Ok(msg), Some(limit)) = (&outcome, budget) {
            if elapsed > *limit {
                outcome = Err(format!("{msg}, but took {elapsed:.2?} (limit {limit:?})"));
            }
        }
        match outcome {
            Ok(msg) => println!("PASS {:>2} {name}: {msg} [{elapsed:.2?}]", k + 1),
            Err(msg) => {
                failures += 1;
                println!("FAIL {:>2} {name}: {msg} [{elapsed:.2?}]", k + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
