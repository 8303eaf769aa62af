//! The file-based commands and the mapping from library errors to exit
//! codes.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use pbs_core::canonical::{canonicalize, equivalent, CanonError};
use pbs_core::diagram::{GateError, Symbol};
use pbs_core::frontend::{self, parse, print_canonical, print_matrix, print_module, Binding, RenderFormat};
use pbs_core::linalg::C64;
use pbs_core::path::PathError;
use pbs_core::rules::{planted_unsound_rule, rule_catalogue, verify_soundness, SoundnessReport};
use pbs_core::unroll::{unroll_with_report, UnrollError};
use pbs_core::{eval_path, routed_map, CMatrix, Diagram, GateElement, Polarisation};

use crate::structured::{self, document, fingerprint, ConfigJson, GateJson, MatrixJson, RoutedMapJson};
use crate::{Failure, Format, Report, RunConfig};

pub const EXIT_PARSE: u8 = 1;
pub const EXIT_EVAL: u8 = 2;
pub const EXIT_INCOMPARABLE: u8 = 3;
pub const EXIT_INELIGIBLE: u8 = 4;
pub const EXIT_UNSOUND: u8 = 5;
pub const EXIT_NOT_EQUIVALENT: u8 = 6;

pub fn path_failure(e: PathError) -> Failure {
    let code = match &e {
        PathError::IllTyped(_) => EXIT_PARSE,
        PathError::Gate(GateError::Incomparable(_)) => EXIT_INCOMPARABLE,
        _ => EXIT_EVAL,
    };
    Failure::new(code, e.to_string())
}

pub fn canon_failure(e: CanonError) -> Failure {
    match e {
        CanonError::Path(p) => path_failure(p),
        CanonError::Gate(GateError::Incomparable(n)) => Failure::new(
            EXIT_INCOMPARABLE,
            format!("symbolic gate `{n}` cannot be compared with a numeric matrix"),
        ),
        other => Failure::new(EXIT_EVAL, other.to_string()),
    }
}

fn unroll_failure(e: UnrollError) -> Failure {
    match e {
        UnrollError::Ineligible(_) | UnrollError::SymbolicGate(_) | UnrollError::NotInvertible => {
            Failure::new(EXIT_INELIGIBLE, e.to_string())
        }
        UnrollError::Canon(c) => canon_failure(c),
        UnrollError::Path(p) => path_failure(p),
        other => Failure::new(EXIT_EVAL, other.to_string()),
    }
}

/// A parsed module, its sidecar matrices applied.
pub struct Loaded {
    pub module: frontend::SourceModule,
    pub sidecar: BTreeMap<String, CMatrix>,
    pub file: String,
}

impl Loaded {
    /// The diagram `name` (or the entry), with sidecar matrices attached to
    /// its unannotated symbols.
    pub fn diagram(&self, name: Option<&str>) -> Result<Diagram, Failure> {
        let d = self
            .module
            .resolve(name)
            .map_err(|e| Failure::new(EXIT_PARSE, format!("{}:{e}", self.file)))?;
        if self.sidecar.is_empty() {
            return Ok(d.clone());
        }
        Ok(d.map_gates(&mut |g| match g {
            GateElement::Word(w) => GateElement::Word(
                w.iter()
                    .map(|s| match (&s.matrix, self.sidecar.get(&s.name)) {
                        (None, Some(m)) => Symbol::annotated(s.name.clone(), m.clone()),
                        _ => s.clone(),
                    })
                    .collect(),
            ),
            other => other.clone(),
        }))
    }

    /// The gate dimension: from the module, then the sidecar, then `--q`.
    pub fn q(&self, cfg: &RunConfig) -> usize {
        self.module
            .gate_dim()
            .or_else(|| self.sidecar.values().next().map(CMatrix::rows))
            .unwrap_or(cfg.q as usize)
    }

    pub fn entry_name(&self, cfg: &RunConfig) -> String {
        cfg.entry
            .clone()
            .or_else(|| self.module.entry.clone())
            .unwrap_or_else(|| "<entry>".into())
    }
}

/// Parses a matrix literal such as `[[0, 1], [1, 0]]`.
pub fn parse_matrix(text: &str) -> Result<CMatrix, String> {
    let module = parse(&format!("let M = {text}\n")).map_err(|e| e.to_string())?;
    match module.binding("M") {
        Some(Binding::Matrix(m)) => Ok(m.clone()),
        _ => Err(format!("`{text}` is not a matrix literal")),
    }
}

fn literal_of(v: &Value) -> Option<String> {
    match v {
        Value::String(s) => Some(s.clone()),
        Value::Number(n) => Some(n.to_string()),
        Value::Array(items) => {
            let parts: Option<Vec<String>> = items.iter().map(literal_of).collect();
            Some(format!("[{}]", parts?.join(", ")))
        }
        _ => None,
    }
}

fn load_sidecar(path: &Path) -> Result<BTreeMap<String, CMatrix>, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {}: {e}", path.display())))?;
    let value: Value =
        serde_json::from_str(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {e}", path.display())))?;
    let Value::Object(entries) = value else {
        return Err(Failure::new(
            EXIT_PARSE,
            format!("{}: expected an object", path.display()),
        ));
    };
    entries
        .iter()
        .map(|(name, v)| {
            let m = literal_of(v)
                .ok_or_else(|| format!("`{name}` is not a matrix"))
                .and_then(|lit| parse_matrix(&lit))
                .map_err(|e| Failure::new(EXIT_PARSE, format!("{}: {name}: {e}", path.display())))?;
            Ok((name.clone(), m))
        })
        .collect()
}

pub fn load(cfg: &RunConfig, file: &Path) -> Result<Loaded, Failure> {
    let shown = file.display().to_string();
    let text = fs::read_to_string(file).map_err(|e| Failure::new(EXIT_PARSE, format!("cannot read {shown}: {e}")))?;
    let module = parse(&text).map_err(|e| Failure::new(EXIT_PARSE, format!("{shown}:{e}")))?;
    let sidecar = match &cfg.matrices {
        Some(p) => load_sidecar(p)?,
        None => BTreeMap::new(),
    };
    Ok(Loaded {
        module,
        sidecar,
        file: shown,
    })
}

/// Writes `text` to `--out` or standard output.
pub fn emit(cfg: &RunConfig, text: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::new(EXIT_EVAL, format!("cannot write {}: {e}", path.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn complex_json(z: C64) -> [f64; 2] {
    [z.re, z.im]
}

/// A word for humans: `UV`, `U1 U2`, or `ε` for the empty word.
pub fn word_text(g: &GateElement) -> String {
    if let GateElement::Numeric(m) = g {
        return print_matrix(m);
    }
    match g.reduced_names().unwrap_or_default() {
        w if w.is_empty() => "ε".into(),
        w if w.iter().all(|s| s.chars().count() == 1) => w.concat(),
        w => w.join(" "),
    }
}

#[derive(Serialize)]
struct CheckJson {
    file: String,
    entry: String,
    arity: usize,
    generators: usize,
    traces: usize,
    fingerprint: String,
}

pub fn check(cfg: &RunConfig, file: &Path) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let d = loaded.diagram(cfg.entry.as_deref())?;
    if let Err(errors) = d.validate() {
        let text: Vec<String> = errors.iter().map(ToString::to_string).collect();
        return Err(Failure::new(
            EXIT_PARSE,
            format!("{}: {}", loaded.file, text.join("; ")),
        ));
    }
    let arity = d.arity().map_err(|e| Failure::new(EXIT_PARSE, e.to_string()))?;
    let entry = loaded.entry_name(cfg);
    let text = match cfg.format {
        Format::Human => format!(
            "ok: {entry} has arity {arity}, {} generators, {} traces\n",
            d.generator_count(),
            d.count_traces()
        ),
        Format::Structured => document(
            "check",
            &CheckJson {
                file: loaded.file.clone(),
                entry,
                arity,
                generators: d.generator_count(),
                traces: d.count_traces(),
                fingerprint: fingerprint(&d),
            },
        )?,
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct TraceJson {
    node: Vec<usize>,
    count: usize,
}

#[derive(Serialize)]
struct PathJson {
    fingerprint: String,
    input: ConfigJson,
    output: ConfigJson,
    #[serde(flatten)]
    gate: GateJson,
    trace_counts: Vec<TraceJson>,
    visited_gates: Vec<Vec<usize>>,
}

pub fn path(cfg: &RunConfig, file: &Path, pol: Polarisation, pos: usize) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let d = loaded.diagram(cfg.entry.as_deref())?;
    let q = loaded.q(cfg);
    let r = eval_path(&d, pol, pos).map_err(path_failure)?;
    let text = match cfg.format {
        Format::Human => {
            let mut out = format!("{} {} {}\n", r.out.pol, r.out.pos, word_text(&r.accumulated));
            if let (GateElement::Word(_), GateElement::Numeric(m)) = (&r.accumulated, r.accumulated.collapsed()) {
                out += &format!("matrix: {}\n", print_matrix(&m));
            }
            for (node, k) in &r.trace_counts {
                out += &format!("trace {node:?}: {k} feedback(s)\n");
            }
            out
        }
        Format::Structured => document(
            "path",
            &PathJson {
                fingerprint: fingerprint(&d),
                input: structured::config(pbs_core::Config::new(pol, pos)),
                output: structured::config(r.out),
                gate: structured::gate(&r.accumulated, q),
                trace_counts: r
                    .trace_counts
                    .iter()
                    .map(|(node, count)| TraceJson {
                        node: node.clone(),
                        count: *count,
                    })
                    .collect(),
                visited_gates: r.visited_gates.clone(),
            },
        )?,
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct CanonicalJson {
    name: String,
    fingerprint: String,
    canonical: String,
    routed_map: RoutedMapJson,
}

fn canonical_json(name: &str, d: &Diagram, q: usize) -> Result<CanonicalJson, Failure> {
    let cf = canonicalize(d).map_err(canon_failure)?;
    let map = routed_map(d).map_err(path_failure)?;
    Ok(CanonicalJson {
        name: name.to_string(),
        fingerprint: fingerprint(d),
        canonical: print_canonical(&cf),
        routed_map: structured::routed_map(&map, q),
    })
}

#[derive(Serialize)]
struct EquivJson {
    equivalent: bool,
    first: CanonicalJson,
    second: CanonicalJson,
}

pub fn equiv(cfg: &RunConfig, file: &Path, first: &str, second: &str) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let (d1, d2) = (loaded.diagram(Some(first))?, loaded.diagram(Some(second))?);
    let q = loaded.q(cfg);
    let same = equivalent(&d1, &d2, cfg.tol).map_err(canon_failure)?;
    let code = if same { 0 } else { EXIT_NOT_EQUIVALENT };
    let text = match cfg.format {
        Format::Human if same => format!("equivalent: {first} = {second}\n"),
        Format::Human => {
            let c1 = canonicalize(&d1).map_err(canon_failure)?;
            let c2 = canonicalize(&d2).map_err(canon_failure)?;
            format!(
                "not equivalent: {first} ≠ {second}\n\n# {first}\n{}\n# {second}\n{}",
                print_canonical(&c1),
                print_canonical(&c2)
            )
        }
        Format::Structured => document(
            "equiv",
            &EquivJson {
                equivalent: same,
                first: canonical_json(first, &d1, q)?,
                second: canonical_json(second, &d2, q)?,
            },
        )?,
    };
    Ok(Report { text, code })
}

pub fn normalize(cfg: &RunConfig, file: &Path) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let d = loaded.diagram(cfg.entry.as_deref())?;
    let text = match cfg.format {
        Format::Human => print_canonical(&canonicalize(&d).map_err(canon_failure)?),
        Format::Structured => document(
            "normalize",
            &canonical_json(&loaded.entry_name(cfg), &d, loaded.q(cfg))?,
        )?,
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct UnrollJson {
    input_fingerprint: String,
    output_fingerprint: String,
    det_product_before: Option<[f64; 2]>,
    det_product_after: Option<[f64; 2]>,
    gate_count_delta: Option<i64>,
    notes: Vec<String>,
    module: String,
}

pub fn unroll(cfg: &RunConfig, file: &Path) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let d = loaded.diagram(cfg.entry.as_deref())?;
    let (out, report) = unroll_with_report(&d).map_err(unroll_failure)?;
    let module = print_module(&out, "unrolled");
    let text = match cfg.format {
        Format::Human => {
            let mut head = String::from("# trace-free equivalent\n");
            if let Some(delta) = report.gate_count_delta {
                head += &format!("# gate count change: {delta:+}\n");
            }
            if let (Some(b), Some(a)) = (report.det_product_before, report.det_product_after) {
                let c = |z: C64| format!("{:.6}{:+.6}i", z.re + 0.0, z.im + 0.0);
                head += &format!("# |D| before: {}, after: {}\n", c(b), c(a));
            }
            for note in &report.notes {
                head += &format!("# note: {note}\n");
            }
            head + &module
        }
        Format::Structured => document(
            "unroll",
            &UnrollJson {
                input_fingerprint: fingerprint(&d),
                output_fingerprint: fingerprint(&out),
                det_product_before: report.det_product_before.map(complex_json),
                det_product_after: report.det_product_after.map(complex_json),
                gate_count_delta: report.gate_count_delta,
                notes: report.notes.clone(),
                module,
            },
        )?,
    };
    Ok(Report::ok(text))
}

#[derive(Serialize)]
struct CounterexampleJson {
    trial: usize,
    bindings: String,
    config: Option<ConfigJson>,
    detail: String,
}

#[derive(Serialize)]
struct TrialJson {
    q: usize,
    trials: usize,
    passed: bool,
    counterexample: Option<CounterexampleJson>,
}

#[derive(Serialize)]
struct RuleJson {
    name: String,
    status: String,
    arity: Option<usize>,
    depends_on: Vec<String>,
    results: Vec<TrialJson>,
}

#[derive(Serialize)]
struct VerifyJson {
    seed: u64,
    all_passed: bool,
    rules: Vec<RuleJson>,
}

fn trial_json(r: &SoundnessReport) -> TrialJson {
    TrialJson {
        q: r.q,
        trials: r.trials,
        passed: r.passed(),
        counterexample: r.counterexample.as_ref().map(|c| CounterexampleJson {
            trial: c.trial,
            bindings: c.bindings.clone(),
            config: c.config.map(structured::config),
            detail: c.detail.clone(),
        }),
    }
}

pub fn rules_verify(cfg: &RunConfig, include_planted: bool) -> Result<Report, Failure> {
    let mut rules: Vec<RuleJson> = rule_catalogue(cfg.trials, cfg.seed)
        .into_iter()
        .map(|e| RuleJson {
            name: e.name,
            status: e.status.to_string(),
            arity: e.arity,
            depends_on: e.depends_on,
            results: e.reports.iter().map(trial_json).collect(),
        })
        .collect();
    if include_planted {
        let r = planted_unsound_rule();
        rules.push(RuleJson {
            name: r.name.clone(),
            status: "control".into(),
            arity: r.arity(),
            depends_on: Vec::new(),
            results: [1, 2]
                .map(|q| trial_json(&verify_soundness(&r, q, cfg.trials, cfg.seed)))
                .into(),
        });
    }
    let all_passed = rules.iter().all(|r| r.results.iter().all(|t| t.passed));
    let code = if all_passed { 0 } else { EXIT_UNSOUND };
    let text = match cfg.format {
        Format::Human => {
            let mut out = format!(
                "{:<34} {:<10} {:>5}  {:<5} {:<5}\n",
                "rule", "status", "arity", "q=1", "q=2"
            );
            for r in &rules {
                let arity = r.arity.map_or("-".into(), |a| a.to_string());
                let cells: Vec<&str> = r
                    .results
                    .iter()
                    .map(|t| if t.passed { "pass" } else { "FAIL" })
                    .collect();
                out += &format!(
                    "{:<34} {:<10} {:>5}  {:<5} {:<5}\n",
                    r.name, r.status, arity, cells[0], cells[1]
                );
                for t in r.results.iter().filter(|t| !t.passed) {
                    if let Some(c) = &t.counterexample {
                        let at = c.config.map_or("-".into(), |(p, i)| {
                            format!("({},{i})", if p == "H" { "→" } else { "↑" })
                        });
                        out += &format!(
                            "    q={} trial {} at {at}: {} [{}]\n",
                            t.q, c.trial, c.detail, c.bindings
                        );
                    }
                }
            }
            let passed = rules.iter().filter(|r| r.results.iter().all(|t| t.passed)).count();
            out += &format!(
                "{passed} of {} rules passed {} trials at q = 1, 2\n",
                rules.len(),
                cfg.trials
            );
            out
        }
        Format::Structured => document(
            "rules verify",
            &VerifyJson {
                seed: cfg.seed,
                all_passed,
                rules,
            },
        )?,
    };
    Ok(Report { text, code })
}

pub fn render(cfg: &RunConfig, file: &Path, format: RenderFormat) -> Result<Report, Failure> {
    let loaded = load(cfg, file)?;
    let d = loaded.diagram(cfg.entry.as_deref())?;
    Ok(Report::ok(frontend::render(&d, format)))
}

/// Rows of a matrix as JSON, for demos.
pub fn matrix_json(m: &CMatrix) -> MatrixJson {
    structured::matrix(m)
}
