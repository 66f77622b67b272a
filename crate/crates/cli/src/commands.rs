//! Subcommand bodies. Each returns the `results` object of the report.

use std::fs;

use entpower::closedform::{
    classify_perm_sr3, clifford_powers, detect_ud1, gcnot_check, ke_cp3, sr4_witness, symmetrize_dax2_sr3,
};
use entpower::gates::random::{random_instance, RandomKind};
use entpower::gates::{build, classify, clifford_check, ControlledForm, GateSpec, NamedGate};
use entpower::opschmidt::{operator_schmidt_decompose, reconstruction_error, schmidt_strength, RANK_TOL};
use entpower::optimize::{
    assisted_entangling_power, bounds_report, disentangling_power, entangling_power, output_entanglement, PowerOptions,
};
use entpower::probe::{assisted_sweep, sr2_sweep, NOT_ASSERTED};
use entpower::protocol::{build_protocol, enumerate_branches, seeded_inputs, success_frequency};
use entpower::report::{
    estimate_json, sha256_hex, state_json, MatrixFile, Provenance, Report, CP3_DISCREPANCY_WARNING,
    KRAUS_NORMALIZATION_WARNING,
};
use entpower::unital::{fiducial_search, sic_entangling_check, unital_equivalence_check, KrausFamily};
use entpower::{BipartiteUnitary, CMatrix};
use serde_json::{json, Value};

use crate::{Command, Common, Failure, GenArgs};

type Out<T> = Result<T, Failure>;

struct Input {
    unitary: BipartiteUnitary,
    digest: String,
}

fn load(common: &Common) -> Out<Input> {
    let path = common.input.as_ref().ok_or_else(|| Failure::Usage("this subcommand needs --in FILE".into()))?;
    let text = fs::read_to_string(path).map_err(|e| Failure::Matrix(format!("cannot read {}: {e}", path.display())))?;
    let file = MatrixFile::parse(&text).map_err(|e| Failure::Matrix(e.to_string()))?;
    let unitary = file.to_unitary(common.unitary_tol).map_err(|e| Failure::Matrix(e.to_string()))?;
    Ok(Input { unitary, digest: sha256_hex(text.as_bytes()) })
}

fn options(common: &Common) -> PowerOptions {
    let mut o = PowerOptions { seed: common.seed, no_ancilla: common.no_ancilla, ..Default::default() };
    if let Some(r) = common.restarts {
        o.restarts = r;
    }
    if let Some(t) = common.tol {
        o.tol = t;
    }
    o.ancilla_a = common.ancilla_a;
    o.ancilla_b = common.ancilla_b;
    o
}

fn matrix_json(m: &CMatrix) -> Value {
    let rows: Vec<Vec<[f64; 2]>> = (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect();
    json!(rows)
}

fn controlled_json(f: &Option<ControlledForm>) -> Value {
    match f {
        None => Value::Null,
        Some(f) => json!({ "side": f.side, "m": f.m(), "ranks": f.ranks(), "groups": f.groups }),
    }
}

fn emit(common: &Common, report: &Report) -> Out<()> {
    let text = if common.json { report.to_json() + "\n" } else { report.to_text() };
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

pub fn run(command: &Command, common: &Common, argv: &[String]) -> Out<()> {
    if let Command::Gen(args) = command {
        return generate(args, common);
    }
    let opts = options(common);
    let mut warnings = Vec::new();
    let mut digest = None;
    let mut input = || -> Out<BipartiteUnitary> {
        let i = load(common)?;
        digest = Some(i.digest);
        Ok(i.unitary)
    };
    let results = match command {
        Command::Schmidt => {
            let u = input()?;
            let dec = operator_schmidt_decompose(&u, RANK_TOL)?;
            json!({
                "dA": u.da(),
                "dB": u.db(),
                "rank": dec.rank(),
                "coefficients": dec.coefficients,
                "k_sch": schmidt_strength(&dec),
                "reconstruction_error": reconstruction_error(&u, &dec),
                "orthonormality_defect": dec.orthonormality_defect(),
            })
        }
        Command::Ke => estimate_json(&entangling_power(&input()?, &opts)?),
        Command::Kea => estimate_json(&assisted_entangling_power(&input()?, &opts)?),
        Command::Kd => estimate_json(&disentangling_power(&input()?, &opts)?),
        Command::Bounds => {
            let b = bounds_report(&input()?, &opts)?;
            json!({
                "k_sch": b.k_sch,
                "k_e": b.k_e,
                "k_ea": b.k_ea,
                "log2_schmidt_rank": b.log2_schmidt_rank,
                "log2_m": b.log2_m,
                "two_log2_dmin": b.two_log2_dmin,
                "unevaluated": b.unevaluated,
                "conjecture_probe": {
                    "label": NOT_ASSERTED,
                    "k_ea_below_log2_schmidt_rank": b.conjecture_probe_holds,
                    "margin": b.conjecture_probe_margin,
                },
                "k_e_estimate": estimate_json(&b.ke_estimate),
                "k_ea_estimate": estimate_json(&b.kea_estimate),
            })
        }
        Command::Classify => {
            let u = input()?;
            let r = classify(&u);
            json!({
                "dA": u.da(),
                "dB": u.db(),
                "schmidt_rank": r.schmidt_rank,
                "is_permutation": r.is_permutation,
                "is_complex_permutation": r.is_complex_permutation,
                "controlled_from_a": controlled_json(&r.controlled_a),
                "controlled_from_b": controlled_json(&r.controlled_b),
                "block_pattern": r.block_pattern,
                "ud1_form": detect_ud1(&u),
            })
        }
        Command::Perm3 => serde_json::to_value(classify_perm_sr3(&input()?, &opts)?).expect("serializable"),
        Command::Cp3 => {
            let u = input()?;
            let v = ke_cp3(&u)?;
            let numeric = entangling_power(&u, &opts)?;
            if v.stationarity_discrepancy {
                warnings.push(CP3_DISCREPANCY_WARNING.to_string());
            }
            json!({ "closed_form": v, "numeric_k_e": estimate_json(&numeric) })
        }
        Command::Gcnot => serde_json::to_value(gcnot_check(&input()?)?).expect("serializable"),
        Command::Sr4 => {
            let u = input()?;
            let (alpha, beta) = sr4_witness(&u)?;
            let value = output_entanglement(&u, &alpha, &beta)?;
            json!({ "value": value, "alpha": state_json(&alpha), "beta": state_json(&beta) })
        }
        Command::Clifford => {
            let u = input()?;
            let is_clifford = clifford_check(&u, None)?;
            if !is_clifford {
                return Err(Failure::Precondition("gate is not a generalized Clifford operator".into()));
            }
            json!({ "is_clifford": true, "k_e": clifford_powers(&u)?, "note": "K_E = K_Ea = K_d = K_Sch" })
        }
        Command::Symmetrize => {
            let s = symmetrize_dax2_sr3(&input()?)?;
            json!({
                "left_a": matrix_json(&s.left_a),
                "left_b": matrix_json(&s.left_b),
                "right_a": matrix_json(&s.right_a),
                "right_b": matrix_json(&s.right_b),
                "symmetric": matrix_json(s.symmetric.matrix()),
            })
        }
        Command::Protocol { inputs, runs } => {
            let u = input()?;
            let circuit = build_protocol(&u)?;
            warnings.push(KRAUS_NORMALIZATION_WARNING.to_string());
            let mut per_input = Vec::new();
            for (k, psi) in seeded_inputs(u.da(), u.db(), *inputs, common.seed).iter().enumerate() {
                let table = enumerate_branches(&circuit, psi, opts.parallel)?;
                let mut row = json!({
                    "input": k,
                    "total_probability": table.total_probability(),
                    "success_probability": table.success_probability(),
                    "accepting_branches": table.accepting().len(),
                    "min_success_fidelity": table.min_success_fidelity(),
                });
                if *runs > 0 {
                    row["empirical_success_frequency"] = json!(success_frequency(&table, *runs, common.seed.wrapping_add(k as u64)));
                }
                per_input.push(row);
            }
            let success = per_input.first().map(|r| r["success_probability"].clone()).unwrap_or(Value::Null);
            json!({
                "rank": circuit.rank(),
                "schmidt_coefficients": circuit.schmidt.coefficients,
                "equal_coefficients": circuit.equal_coefficients(),
                "success_probability": success,
                "inputs": per_input,
            })
        }
        Command::Unital { d, family, samples } => {
            let fam = match family.as_str() {
                "hw" => KrausFamily::heisenberg_weyl(*d),
                "shift-clock" => KrausFamily::shift_clock(*d),
                other => return Err(Failure::Usage(format!("unknown family '{other}', expected hw or shift-clock"))),
            };
            serde_json::to_value(unital_equivalence_check(&fam, *samples, common.seed)?).expect("serializable")
        }
        Command::Sic { d } => {
            let phi = fiducial_search(*d, common.seed, common.restarts.unwrap_or(16))?;
            let r = sic_entangling_check(*d, &phi, &opts)?;
            json!({
                "d": r.d,
                "fiducial": state_json(&r.fiducial),
                "fiducial_residual": r.fiducial_residual,
                "max_overlap_deviation": r.max_overlap_deviation,
                "entangling_check": r.entangling_check,
                "optimizer_value": r.optimizer_value,
            })
        }
        Command::ProbeConjectures { count, phases } => {
            let sr2 = sr2_sweep(*phases, *count, common.seed, &opts)?;
            let assisted = assisted_sweep(2, 2, *count, common.seed, &opts)?;
            json!({
                "schmidt_rank_two": { "label": NOT_ASSERTED, "points": sr2 },
                "assisted_below_log2_schmidt_rank": { "label": NOT_ASSERTED, "points": assisted },
            })
        }
        Command::Gen(_) => unreachable!("handled above"),
    };
    let report = Report {
        command: argv.to_vec(),
        input_digest: digest,
        results,
        provenance: Provenance::new(common.seed, opts.restarts, opts.tol, common.unitary_tol),
        warnings,
    };
    emit(common, &report)
}

fn dims(args: &[String]) -> Out<(usize, usize)> {
    let parse = |s: &String| s.parse::<usize>().map_err(|_| Failure::Usage(format!("'{s}' is not a dimension")));
    match args {
        [a, b] => Ok((parse(a)?, parse(b)?)),
        _ => Err(Failure::Usage("expected two dimensions dA dB".into())),
    }
}

fn need(v: Option<usize>, flag: &str) -> Out<usize> {
    v.ok_or_else(|| Failure::Usage(format!("missing --{flag}")))
}

fn generate(g: &GenArgs, common: &Common) -> Out<()> {
    let random = |kind: RandomKind| -> Out<BipartiteUnitary> {
        let (da, db) = dims(&g.args)?;
        Ok(random_instance(kind, da, db, g.rank, common.seed)?)
    };
    let u = match g.kind.as_str() {
        "haar" => random(RandomKind::Haar)?,
        "permutation" => random(RandomKind::Permutation)?,
        "complex-permutation" => random(RandomKind::ComplexPermutation)?,
        "controlled" => random(RandomKind::Controlled)?,
        "named" => {
            let (name, rest) = g.args.split_first().ok_or_else(|| Failure::Usage("named needs a gate name".into()))?;
            let gate = named(name, rest)?;
            build(&GateSpec::Named(gate))?
        }
        "ud1" => build(&GateSpec::Ud1 {
            m: need(g.m, "m")?,
            n: need(g.n, "n")?,
            q: need(g.q, "q")?,
            p: need(g.p, "p")?,
            v1: None,
            v2: None,
            v3: None,
            v4: None,
            a_ranks: [1, 1, 1],
        })?,
        "gcnot" => build(&GateSpec::Gcnot { thetas: g.thetas.clone() })?,
        "hw-controlled" => build(&GateSpec::HwControlled { d: need(g.d, "d")? })?,
        "pauli-power" => build(&GateSpec::PauliPower { d: need(g.d, "d")?, a: need(g.a, "a")?, b: need(g.b, "b")? })?,
        other => return Err(Failure::Usage(format!("unknown generator kind '{other}'"))),
    };
    let r = classify(&u);
    let ok = match g.kind.as_str() {
        "permutation" => r.is_permutation,
        "complex-permutation" => r.is_complex_permutation,
        "controlled" => r.controlled_a.is_some(),
        _ => true,
    };
    if !ok || g.rank.is_some_and(|k| k != r.schmidt_rank) {
        return Err(Failure::Precondition(format!("generated gate does not match the requested '{}' structure", g.kind)));
    }
    let text = MatrixFile::from_unitary(&u).to_text();
    match &common.out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Runtime(format!("cannot write {}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn named(name: &str, rest: &[String]) -> Out<NamedGate> {
    let square = |rest: &[String]| -> Out<usize> {
        match rest {
            [] => Ok(2),
            [d] => d.parse().map_err(|_| Failure::Usage(format!("'{d}' is not a dimension"))),
            _ => {
                let (a, b) = dims(rest)?;
                if a != b {
                    return Err(Failure::Precondition(format!("{name} needs dA = dB, got {a} and {b}")));
                }
                Ok(a)
            }
        }
    };
    Ok(match name {
        "cnot" => NamedGate::Cnot,
        "swap" => NamedGate::Swap(square(rest)?),
        "cz" => NamedGate::Cz(square(rest)?),
        "identity" => {
            let (a, b) = dims(rest)?;
            NamedGate::Identity(a, b)
        }
        "toffoli" => NamedGate::Toffoli,
        "pauli-controlled" => NamedGate::PauliControlled,
        "five-term" => NamedGate::FiveTerm,
        "gs-example" => NamedGate::GsExample,
        other => return Err(Failure::Usage(format!("unknown named gate '{other}'"))),
    })
}
