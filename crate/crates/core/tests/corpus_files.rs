//! The `.pbs` corpus: valid files elaborate, ill-typed files fail at the
//! expected place.

use std::fs;
use std::path::PathBuf;

use pbs_core::canonical::equivalent;
use pbs_core::frontend::{parse, FrontendError};
use pbs_core::{eval_path, Diagram, Polarisation};

fn read(rel: &str) -> String {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/corpus").join(rel);
    fs::read_to_string(path).unwrap()
}

#[test]
fn valid_files_parse() {
    for name in ["qswitch", "double_negation", "pauli_switch", "filter", "perm3"] {
        let m = parse(&read(&format!("valid/{name}.pbs"))).unwrap_or_else(|e| panic!("{name}: {e}"));
        m.resolve(None).unwrap();
    }
}

#[test]
fn qswitch_file_collects_words() {
    let m = parse(&read("valid/qswitch.pbs")).unwrap();
    let qs = m.resolve(Some("qs")).unwrap();
    let up = eval_path(qs, Polarisation::V, 0).unwrap();
    assert_eq!(up.accumulated.reduced_names().unwrap(), ["U", "V"]);
}

#[test]
fn double_negation_file_is_a_wire() {
    let m = parse(&read("valid/double_negation.pbs")).unwrap();
    assert!(equivalent(m.resolve(None).unwrap(), &Diagram::Wire, 1e-9).unwrap());
}

#[test]
fn ill_typed_files_report_locations() {
    let cases: [(&str, (usize, usize)); 4] = [
        ("arity_mismatch", (2, 17)),
        ("undefined_gate", (1, 11)),
        ("empty_trace", (1, 11)),
        ("duplicate", (2, 5)),
    ];
    for (name, at) in cases {
        let e = parse(&read(&format!("ill_typed/{name}.pbs"))).unwrap_err();
        assert_eq!(e.location(), at, "{name}: {e}");
    }
}

#[test]
fn arity_error_names_both_sides() {
    let e = parse(&read("ill_typed/arity_mismatch.pbs")).unwrap_err();
    assert!(matches!(e, FrontendError::Arity { left: 2, right: 1, .. }), "{e}");
}
