//! The structured (JSON) output format. Every document carries the tool
//! version; diagrams are identified by a SHA-256 fingerprint of their
//! printed flat form.

use serde::Serialize;
use sha2::{Digest, Sha256};

use pbs_core::frontend::print_module;
use pbs_core::{CMatrix, Config, Diagram, GateElement, Polarisation, RoutedMap};

use crate::Failure;

#[derive(Serialize)]
struct Envelope<'a, T: Serialize> {
    tool: &'static str,
    version: &'static str,
    command: &'a str,
    #[serde(flatten)]
    body: &'a T,
}

/// Pretty JSON for `body` wrapped with the tool name and version.
pub fn document<T: Serialize>(command: &str, body: &T) -> Result<String, Failure> {
    let env = Envelope {
        tool: "pbs",
        version: env!("CARGO_PKG_VERSION"),
        command,
        body,
    };
    serde_json::to_string_pretty(&env)
        .map(|s| s + "\n")
        .map_err(|e| Failure::new(2, format!("cannot serialise output: {e}")))
}

/// Hex SHA-256 of the printed module text of `flatten(d)`, which includes
/// every matrix at full precision.
pub fn fingerprint(d: &Diagram) -> String {
    hex::encode(Sha256::digest(print_module(d, "d").as_bytes()))
}

/// A configuration as `["H", 0]`.
pub type ConfigJson = (&'static str, usize);

pub fn config(c: Config) -> ConfigJson {
    (pol_letter(c.pol), c.pos)
}

pub fn pol_letter(p: Polarisation) -> &'static str {
    match p {
        Polarisation::H => "H",
        Polarisation::V => "V",
    }
}

/// A matrix as rows of `[re, im]` pairs.
pub type MatrixJson = Vec<Vec<[f64; 2]>>;

pub fn matrix(m: &CMatrix) -> MatrixJson {
    (0..m.rows())
        .map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect())
        .collect()
}

/// A gate label: its word (identity symbols dropped) and, when every
/// symbol has a matrix, the q×q matrix it denotes.
#[derive(Serialize)]
pub struct GateJson {
    pub word: Option<Vec<String>>,
    pub matrix: Option<MatrixJson>,
}

pub fn gate(g: &GateElement, q: usize) -> GateJson {
    GateJson {
        word: g.reduced_names().map(|w| w.into_iter().map(String::from).collect()),
        matrix: g.collapsed().to_matrix(q).ok().map(|m| matrix(&m)),
    }
}

#[derive(Serialize)]
pub struct EntryJson {
    pub input: ConfigJson,
    pub output: ConfigJson,
    #[serde(flatten)]
    pub gate: GateJson,
}

#[derive(Serialize)]
pub struct RoutedMapJson {
    pub n: usize,
    pub q: usize,
    /// `τ` as `[input, output]` pairs in state order.
    pub tau: Vec<[ConfigJson; 2]>,
    pub entries: Vec<EntryJson>,
}

pub fn routed_map(m: &RoutedMap, q: usize) -> RoutedMapJson {
    RoutedMapJson {
        n: m.n,
        q,
        tau: Config::all(m.n).map(|c| [config(c), config(m.tau_of(c))]).collect(),
        entries: Config::all(m.n)
            .map(|c| EntryJson {
                input: config(c),
                output: config(m.tau_of(c)),
                gate: gate(m.entry(c), q),
            })
            .collect(),
    }
}
