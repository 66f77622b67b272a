//! Matrix files and machine-readable reports.
//!
//! A matrix file is JSON of the form `{"dA": 2, "dB": 2, "entries": [[re, im], ...]}`
//! with entries row-major over the composite index `a·d_B + b`. Floats are
//! written with 17 significant digits, which round-trips every `f64` exactly.

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::opschmidt::BipartiteUnitary;
use crate::optimize::{PowerEstimate, Witness};
use crate::qcore::{c, CMatrix, PureState};

/// Default unitarity tolerance when a matrix file is parsed.
pub const UNITARITY_TOL: f64 = 1e-8;

pub const CP3_DISCREPANCY_WARNING: &str = "cp3: the printed cap 1.57100011 comes from a stationary point taken with natural \
logarithms inside a base-2 entropy; the base-2 maximum of the same bound is log2(1 + 2^M), which reaches log2 3 at M = 1";

pub const KRAUS_NORMALIZATION_WARNING: &str = "protocol: Schmidt operators are normalized to Tr(A_j†A_k) = d_A δ_jk and \
Tr(B_j†B_k) = d_B δ_jk with Σ c_j² = 1, so the Kraus operators are c_j A_j and c_j B_j and the 1/√d factors of the \
trace-one convention are absorbed";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    #[serde(rename = "dA")]
    pub da: usize,
    #[serde(rename = "dB")]
    pub db: usize,
    pub entries: Vec<[f64; 2]>,
}

impl MatrixFile {
    pub fn from_unitary(u: &BipartiteUnitary) -> Self {
        let m = u.matrix();
        let n = m.nrows();
        let entries = (0..n * n).map(|k| {
            let z = m[(k / n, k % n)];
            [z.re, z.im]
        });
        Self { da: u.da(), db: u.db(), entries: entries.collect() }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let file: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        let n = file.da * file.db;
        if n == 0 {
            return Err(Error::Shape("dA and dB must be positive".into()));
        }
        if file.entries.len() != n * n {
            return Err(Error::Shape(format!("expected {} entries for {}×{}, found {}", n * n, file.da, file.db, file.entries.len())));
        }
        Ok(file)
    }

    pub fn matrix(&self) -> CMatrix {
        let n = self.da * self.db;
        CMatrix::from_fn(n, n, |i, j| {
            let [re, im] = self.entries[i * n + j];
            c(re, im)
        })
    }

    pub fn to_unitary(&self, tol: f64) -> Result<BipartiteUnitary> {
        BipartiteUnitary::with_tolerance(self.da, self.db, self.matrix(), tol)
    }

    /// One entry per line, 17 significant digits.
    pub fn to_text(&self) -> String {
        let rows: Vec<String> = self.entries.iter().map(|[re, im]| format!("    [{re:.16e}, {im:.16e}]")).collect();
        format!("{{\n  \"dA\": {},\n  \"dB\": {},\n  \"entries\": [\n{}\n  ]\n}}\n", self.da, self.db, rows.join(",\n"))
    }
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub seed: u64,
    pub restarts: usize,
    pub tolerance: f64,
    pub unitarity_tolerance: f64,
    pub library_version: String,
}

impl Provenance {
    pub fn new(seed: u64, restarts: usize, tolerance: f64, unitarity_tolerance: f64) -> Self {
        Self { seed, restarts, tolerance, unitarity_tolerance, library_version: env!("CARGO_PKG_VERSION").into() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub command: Vec<String>,
    pub input_digest: Option<String>,
    pub results: Value,
    pub provenance: Provenance,
    pub warnings: Vec<String>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report values are finite JSON")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    /// Indented `key: value` listing of the results and warnings.
    pub fn to_text(&self) -> String {
        let mut out = format!("command: {}\n", self.command.join(" "));
        if let Some(d) = &self.input_digest {
            out += &format!("input sha256: {d}\n");
        }
        write_value(&mut out, &self.results, 0);
        let p = &self.provenance;
        out += &format!("seed {} restarts {} tol {:e} version {}\n", p.seed, p.restarts, p.tolerance, p.library_version);
        for w in &self.warnings {
            out += &format!("warning: {w}\n");
        }
        out
    }
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = "  ".repeat(depth);
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                if x.is_object() || x.as_array().is_some_and(|a| a.iter().any(|e| e.is_object())) {
                    out.push_str(&format!("{pad}{k}:\n"));
                    write_value(out, x, depth + 1);
                } else {
                    out.push_str(&format!("{pad}{k}: {x}\n"));
                }
            }
        }
        Value::Array(items) => {
            for (i, x) in items.iter().enumerate() {
                out.push_str(&format!("{pad}[{i}]\n"));
                write_value(out, x, depth + 1);
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

pub fn state_json(psi: &PureState) -> Value {
    let amps: Vec<[f64; 2]> = psi.amplitudes().iter().map(|z| [z.re, z.im]).collect();
    json!({ "dims": psi.dims(), "amplitudes": amps })
}

pub fn estimate_json(e: &PowerEstimate) -> Value {
    let witness = match &e.witness {
        Witness::Product { alpha, beta } => json!({ "alpha": state_json(alpha), "beta": state_json(beta) }),
        Witness::Joint { psi } => json!({ "psi": state_json(psi) }),
    };
    let bounds: Vec<Value> = e.upper_bounds.iter().map(|(k, v)| json!({ "bound": k, "value": v })).collect();
    json!({
        "quantity": e.quantity,
        "value": e.value,
        "witness": witness,
        "restarts_used": e.restarts_used,
        "best_restart": e.best_restart,
        "evaluations": e.evaluations,
        "converged": e.converged,
        "upper_bounds": bounds,
        "ancilla_dims": [e.ancilla_dims.0, e.ancilla_dims.1],
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{build, GateSpec, NamedGate};
    use crate::gates::random::{random_instance, RandomKind};

    #[test]
    fn text_round_trip_is_bitwise() {
        for seed in 0..5 {
            let u = random_instance(RandomKind::Haar, 2, 3, None, seed).unwrap();
            let f = MatrixFile::from_unitary(&u);
            let back = MatrixFile::parse(&f.to_text()).unwrap();
            for (x, y) in f.entries.iter().zip(&back.entries) {
                assert_eq!(x[0].to_bits(), y[0].to_bits());
                assert_eq!(x[1].to_bits(), y[1].to_bits());
            }
        }
    }

    #[test]
    fn wrong_count_and_non_unitary_rejected() {
        let bad = r#"{"dA": 2, "dB": 2, "entries": [[1, 0]]}"#;
        assert!(matches!(MatrixFile::parse(bad), Err(Error::Shape(_))));
        let mut f = MatrixFile::from_unitary(&build(&GateSpec::Named(NamedGate::Cnot)).unwrap());
        f.entries[0] = [2.0, 0.0];
        assert!(matches!(f.to_unitary(UNITARITY_TOL), Err(Error::InvalidUnitary(_))));
    }

    #[test]
    fn report_round_trip() {
        let r = Report {
            command: vec!["ke".into()],
            input_digest: Some(sha256_hex(b"abc")),
            results: json!({ "value": 0.1 + 0.2, "nested": { "x": [1e-17, -3.5] } }),
            provenance: Provenance::new(7, 4, 1e-10, UNITARITY_TOL),
            warnings: vec![KRAUS_NORMALIZATION_WARNING.into()],
        };
        assert_eq!(Report::from_json(&r.to_json()).unwrap(), r);
        assert_eq!(r.input_digest.as_deref(), Some("ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad"));
    }
}
