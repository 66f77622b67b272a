use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use entpower::closedform::nqp220_value;
use entpower::gates::{build, GateSpec, NamedGate};
use entpower::optimize::{entangling_power, PowerOptions};
use entpower::report::{MatrixFile, Report, CP3_DISCREPANCY_WARNING};
use entpower::{BipartiteUnitary, CMatrix, C64};
use serde_json::Value;
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_entpower"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn write_gate(dir: &Path, name: &str, u: &BipartiteUnitary) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, MatrixFile::from_unitary(u).to_text()).unwrap();
    p
}

fn json_report(args: &[&str]) -> Report {
    let out = run(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    Report::from_json(&String::from_utf8(out.stdout).unwrap()).unwrap()
}

fn named(g: NamedGate) -> BipartiteUnitary {
    build(&GateSpec::Named(g)).unwrap()
}

#[test]
fn ke_on_cnot_matches_the_library_exactly() {
    let dir = TempDir::new().unwrap();
    let u = named(NamedGate::Cnot);
    let f = write_gate(dir.path(), "cnot.json", &u);
    let r = json_report(&["ke", "--in", f.to_str().unwrap(), "--seed", "0", "--json"]);
    let v = r.results["value"].as_f64().unwrap();
    assert!((v - 1.0).abs() < 1e-4);
    let lib = entangling_power(&u, &PowerOptions::default()).unwrap().value;
    assert_eq!(v.to_bits(), lib.to_bits());
    assert_eq!(r.provenance.seed, 0);
    assert_eq!(r.input_digest.as_ref().map(String::len), Some(64));
}

#[test]
fn reports_are_deterministic_and_round_trip() {
    let dir = TempDir::new().unwrap();
    let f = write_gate(dir.path(), "g.json", &named(NamedGate::Cz(3)));
    let args = ["kea", "--in", f.to_str().unwrap(), "--seed", "5", "--restarts", "6", "--json"];
    let a = run(&args);
    let b = bin().args(args).env("RAYON_NUM_THREADS", "1").output().unwrap();
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    let r = Report::from_json(&text).unwrap();
    assert_eq!(r.to_json() + "\n", text);
}

#[test]
fn perm3_rejects_swap_with_exit_three() {
    let dir = TempDir::new().unwrap();
    let f = write_gate(dir.path(), "swap.json", &named(NamedGate::Swap(2)));
    let out = run(&["perm3", "--in", f.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Schmidt rank is 4"));
}

#[test]
fn protocol_on_swap_reports_one_sixteenth() {
    let dir = TempDir::new().unwrap();
    let f = write_gate(dir.path(), "swap.json", &named(NamedGate::Swap(2)));
    let r = json_report(&["protocol", "--in", f.to_str().unwrap(), "--inputs", "3", "--json"]);
    assert!((r.results["success_probability"].as_f64().unwrap() - 0.0625).abs() < 1e-12);
    assert_eq!(r.warnings.len(), 1);
}

#[test]
fn bad_inputs_map_to_exit_codes() {
    let dir = TempDir::new().unwrap();
    let short = dir.path().join("short.json");
    std::fs::write(&short, r#"{"dA": 2, "dB": 2, "entries": [[1, 0]]}"#).unwrap();
    assert_eq!(run(&["ke", "--in", short.to_str().unwrap()]).status.code(), Some(2));

    let mut file = MatrixFile::from_unitary(&named(NamedGate::Cnot));
    file.entries[1] = [0.5, 0.0];
    let skew = dir.path().join("skew.json");
    std::fs::write(&skew, file.to_text()).unwrap();
    assert_eq!(run(&["ke", "--in", skew.to_str().unwrap()]).status.code(), Some(2));

    let missing = dir.path().join("absent.json");
    assert_eq!(run(&["ke", "--in", missing.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(run(&["ke"]).status.code(), Some(1));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(run(&["ke", "--restarts", "many"]).status.code(), Some(1));
}

#[test]
fn generated_permutation_passes_the_rank_three_classifier() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("p.json");
    let g = run(&["gen", "permutation", "3", "4", "--rank", "3", "--seed", "2", "--out", out.to_str().unwrap()]);
    assert!(g.status.success(), "{}", String::from_utf8_lossy(&g.stderr));
    let r = json_report(&["classify", "--in", out.to_str().unwrap(), "--json"]);
    assert_eq!(r.results["is_permutation"], Value::Bool(true));
    assert_eq!(r.results["schmidt_rank"], 3);
    let p = json_report(&["perm3", "--in", out.to_str().unwrap(), "--restarts", "8", "--json"]);
    assert!(p.results["value"].as_f64().is_some());
}

#[test]
fn generated_files_are_deterministic() {
    let a = run(&["gen", "haar", "2", "3", "--seed", "9"]);
    let b = run(&["gen", "haar", "2", "3", "--seed", "9"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let parsed = MatrixFile::parse(&String::from_utf8(a.stdout).unwrap()).unwrap();
    assert_eq!((parsed.da, parsed.db), (2, 3));
}

#[test]
fn infeasible_generation_exits_three() {
    assert_eq!(run(&["gen", "permutation", "1", "2", "--rank", "2"]).status.code(), Some(3));
}

#[test]
fn generated_named_swap_and_ud1() {
    let swap = run(&["gen", "named", "swap", "2", "2"]);
    let file = MatrixFile::parse(&String::from_utf8(swap.stdout).unwrap()).unwrap();
    assert_eq!(file.matrix(), *named(NamedGate::Swap(2)).matrix());

    let dir = TempDir::new().unwrap();
    let out = dir.path().join("u.json");
    let g = run(&["gen", "ud1", "--m", "0", "--n", "2", "--q", "2", "--p", "0", "--out", out.to_str().unwrap()]);
    assert!(g.status.success());
    let r = json_report(&["perm3", "--in", out.to_str().unwrap(), "--json"]);
    assert_eq!(r.results["value"].as_f64().unwrap().to_bits(), nqp220_value().to_bits());
}

#[test]
fn cp3_report_carries_the_discrepancy_warning() {
    let mut m = CMatrix::zeros(6, 6);
    for (row, col) in [0, 4, 5, 3, 2, 1].into_iter().enumerate() {
        m[(row, col)] = C64::new(1.0, 0.0);
    }
    let u = BipartiteUnitary::new(2, 3, m).unwrap();
    let dir = TempDir::new().unwrap();
    let f = write_gate(dir.path(), "cp3.json", &u);
    let r = json_report(&["cp3", "--in", f.to_str().unwrap(), "--restarts", "8", "--json"]);
    assert!(r.warnings.iter().any(|w| w == CP3_DISCREPANCY_WARNING));
    assert!((r.results["closed_form"]["analytic"].as_f64().unwrap() - 1.57100011).abs() < 1e-3);
}

#[test]
fn unital_sic_and_probe_subcommands() {
    let r = json_report(&["unital", "--d", "3", "--json"]);
    assert_eq!(r.results["gram_holds"], Value::Bool(true));
    let s = json_report(&["sic", "--d", "2", "--restarts", "8", "--json"]);
    assert!((s.results["entangling_check"].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let p = json_report(&["probe-conjectures", "--count", "1", "--restarts", "4", "--json"]);
    assert_eq!(p.results["schmidt_rank_two"]["label"], "conjecture, not asserted");
    assert_eq!(p.results["assisted_below_log2_schmidt_rank"]["points"].as_array().unwrap().len(), 1);
}

#[test]
fn text_reports_and_out_files() {
    let dir = TempDir::new().unwrap();
    let f = write_gate(dir.path(), "cnot.json", &named(NamedGate::Cnot));
    let out = dir.path().join("report.txt");
    let o = run(&["schmidt", "--in", f.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("rank: 2") && text.contains("k_sch: 0.99999"));
    for cmd in ["gcnot", "clifford", "bounds"] {
        let o = run(&[cmd, "--in", f.to_str().unwrap(), "--restarts", "4"]);
        assert!(o.status.success(), "{cmd}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn sr4_and_symmetrize_subcommands() {
    let dir = TempDir::new().unwrap();
    let swap = write_gate(dir.path(), "swap.json", &named(NamedGate::Swap(2)));
    let r = json_report(&["sr4", "--in", swap.to_str().unwrap(), "--json"]);
    assert!((r.results["value"].as_f64().unwrap() - 2.0).abs() < 1e-9);
    let five = write_gate(dir.path(), "five.json", &named(NamedGate::FiveTerm));
    let s = json_report(&["symmetrize", "--in", five.to_str().unwrap(), "--json"]);
    assert_eq!(s.results["symmetric"].as_array().unwrap().len(), 10);
    assert_eq!(run(&["symmetrize", "--in", swap.to_str().unwrap()]).status.code(), Some(3));
}
