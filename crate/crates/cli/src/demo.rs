//! Built-in demonstrations. Each exits 0 exactly when the expected outcome
//! is reproduced.

use serde::Serialize;

use pbs_core::canonical::equivalent;
use pbs_core::denot::commutation_test;
use pbs_core::diagram::{controlled_permutation_builder, perm3_right, qs_builder};
use pbs_core::linalg::{mat_eq, pauli_x, pauli_z, C64};
use pbs_core::rules::{controlled_permutation_script, replay_flat};
use pbs_core::{eval_path, flatten, CMatrix, Config, Diagram, GateElement, Polarisation};

use crate::commands::{canon_failure, matrix_json, parse_matrix, path_failure, word_text, EXIT_EVAL};
use crate::structured::{self, document, fingerprint, ConfigJson, MatrixJson};
use crate::{Failure, Format, Report, RunConfig};

#[derive(Serialize)]
struct PathLine {
    input: ConfigJson,
    output: ConfigJson,
    word: String,
}

fn path_lines(d: &Diagram, inputs: &[Config]) -> Result<Vec<PathLine>, Failure> {
    inputs
        .iter()
        .map(|&c| {
            let r = eval_path(d, c.pol, c.pos).map_err(path_failure)?;
            Ok(PathLine {
                input: structured::config(c),
                output: structured::config(r.out),
                word: word_text(&r.accumulated),
            })
        })
        .collect()
}

fn human_lines(lines: &[PathLine]) -> String {
    let arrow = |p: &str| if p == "H" { "→" } else { "↑" };
    lines
        .iter()
        .map(|l| {
            format!(
                "{} {} ↦ {} {} {}\n",
                arrow(l.input.0),
                l.input.1,
                arrow(l.output.0),
                l.output.1,
                l.word
            )
        })
        .collect()
}

#[derive(Serialize)]
struct QswitchJson {
    diagram: String,
    fingerprint: String,
    paths: Vec<PathLine>,
    reproduced: bool,
}

pub fn qswitch(cfg: &RunConfig) -> Result<Report, Failure> {
    let qs = qs_builder(GateElement::symbol("U"), GateElement::symbol("V"));
    let inputs = [Config::new(Polarisation::V, 0), Config::new(Polarisation::H, 0)];
    let paths = path_lines(&qs, &inputs)?;
    let reproduced = paths[0].word == "UV" && paths[1].word == "VU" && paths.iter().all(|l| l.input == l.output);
    let text = match cfg.format {
        Format::Human => format!(
            "quantum switch: {qs}\n{}{}\n",
            human_lines(&paths),
            if reproduced {
                "vertical input applies V then U, horizontal input U then V"
            } else {
                "unexpected words"
            }
        ),
        Format::Structured => document(
            "demo qswitch",
            &QswitchJson {
                diagram: qs.to_string(),
                fingerprint: fingerprint(&qs),
                paths,
                reproduced,
            },
        )?,
    };
    Ok(Report {
        text,
        code: if reproduced { 0 } else { EXIT_EVAL },
    })
}

fn named_matrix(name: &str) -> Result<CMatrix, Failure> {
    let c = |re: f64, im: f64| C64::new(re, im);
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let rows = |r: [[C64; 2]; 2]| CMatrix::from_rows(&[r[0].to_vec(), r[1].to_vec()]).expect("2×2 rows");
    Ok(match name {
        "I" => CMatrix::identity(2),
        "X" => pauli_x(),
        "Z" => pauli_z(),
        "Y" => rows([[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]]),
        "H" => rows([[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]]),
        literal => parse_matrix(literal)
            .map_err(|e| Failure::new(crate::commands::EXIT_PARSE, format!("gate `{literal}`: {e}")))?,
    })
}

fn prob_text(p: f64) -> String {
    format!("{}", (p * 1e9).round() / 1e9 + 0.0)
}

#[derive(Serialize)]
struct CommutationJson {
    u: MatrixJson,
    v: MatrixJson,
    p_plus: f64,
    p_minus: f64,
    renormalized: bool,
    outcome: &'static str,
    reproduced: bool,
}

pub fn commutation(cfg: &RunConfig, u_name: &str, v_name: &str) -> Result<Report, Failure> {
    let (u, v) = (named_matrix(u_name)?, named_matrix(v_name)?);
    let result = commutation_test(&u, &v, 0).map_err(|e| Failure::new(EXIT_EVAL, e.to_string()))?;
    let uv = u.mul(&v).map_err(|e| Failure::new(EXIT_EVAL, e.to_string()))?;
    let vu = v.mul(&u).map_err(|e| Failure::new(EXIT_EVAL, e.to_string()))?;
    let eq = |a: &CMatrix, b: &CMatrix| mat_eq(a, b, cfg.tol).unwrap_or(false);
    let algebra = if eq(&uv, &vu) {
        Some("commuting")
    } else if eq(&uv, &vu.scale(C64::new(-1.0, 0.0))) {
        Some("anti-commuting")
    } else {
        None
    };
    let close = |p: f64, target: f64| (p - target).abs() <= cfg.tol;
    let outcome = if close(result.p_plus, 1.0) && close(result.p_minus, 0.0) {
        "commuting"
    } else if close(result.p_plus, 0.0) && close(result.p_minus, 1.0) {
        "anti-commuting"
    } else {
        "neither commuting nor anti-commuting"
    };
    let reproduced = algebra == Some(outcome);
    let text = match cfg.format {
        Format::Human => format!(
            "{outcome}, p=({},{})\n",
            prob_text(result.p_plus),
            prob_text(result.p_minus)
        ),
        Format::Structured => document(
            "demo commutation",
            &CommutationJson {
                u: matrix_json(&u),
                v: matrix_json(&v),
                p_plus: result.p_plus,
                p_minus: result.p_minus,
                renormalized: result.renormalized,
                outcome,
                reproduced,
            },
        )?,
    };
    Ok(Report {
        text,
        code: if reproduced { 0 } else { EXIT_EVAL },
    })
}

#[derive(Serialize)]
struct PermutationJson {
    left: String,
    right: String,
    equivalent: bool,
    script_steps: usize,
    script_replays: bool,
    paths: Vec<PathLine>,
    reproduced: bool,
}

pub fn permutation(cfg: &RunConfig) -> Result<Report, Failure> {
    let gates: Vec<GateElement> = (1..=3).map(|i| GateElement::symbol(format!("U{i}"))).collect();
    let built = |e: pbs_core::diagram::DiagramError| Failure::new(EXIT_EVAL, e.to_string());
    let left = controlled_permutation_builder(3, &gates).map_err(built)?;
    let right = perm3_right(&gates).map_err(built)?;
    let same = equivalent(&left, &right, cfg.tol).map_err(canon_failure)?;
    let script = controlled_permutation_script();
    let replays = replay_flat(&script, &flatten(&left))
        .map(|d| *d.result() == flatten(&right))
        .unwrap_or(false);
    let inputs: Vec<Config> = (0..3).map(|p| Config::new(Polarisation::H, p)).collect();
    let paths = path_lines(&left, &inputs)?;
    let reproduced = same && replays;
    let text = match cfg.format {
        Format::Human => format!(
            "left:  {left}\nright: {right}\n{}equivalent: {}\nrewriting script ({} steps) replays: {}\n",
            human_lines(&paths),
            if same { "yes" } else { "no" },
            script.len(),
            if replays { "yes" } else { "no" }
        ),
        Format::Structured => document(
            "demo permutation",
            &PermutationJson {
                left: left.to_string(),
                right: right.to_string(),
                equivalent: same,
                script_steps: script.len(),
                script_replays: replays,
                paths,
                reproduced,
            },
        )?,
    };
    Ok(Report {
        text,
        code: if reproduced { 0 } else { EXIT_EVAL },
    })
}
