//! Exact simulation of the probabilistic protocol that implements a bipartite
//! unitary from its operator Schmidt decomposition, one shared entangled
//! resource and four local measurements.
//!
//! Outcome labels are zero-based. The controlled cyclic shift sends
//! `|j⟩_a|s⟩_e ↦ |j⟩_a|s+j mod r⟩_e` (and likewise on `b f`), so a branch with
//! outcomes `(o_e, o_f, o_a, o_b)` applies
//! `r^{-1/2} Σ_s F[o_a, o_e−s] W[o_b, o_f−s] K^A_{o_e−s} ⊗ K^B_{o_f−s}`.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::opschmidt::{operator_schmidt_decompose, BipartiteUnitary, OperatorSchmidt, RANK_TOL};
use crate::parallel::map_indexed;
use crate::qcore::{c, identity, kron, unitarity_defect, CMatrix, CVector, PureState, C64};

/// Branch tables larger than this many complex entries are refused.
pub const MAX_TABLE_ENTRIES: usize = 1 << 22;

#[derive(Debug, Clone)]
pub struct ProtocolCircuit {
    pub unitary: BipartiteUnitary,
    pub schmidt: OperatorSchmidt,
    /// `Σ_j K^A_j ⊗ |j⟩_a`, rows indexed `(x, j)` on `A ⊗ a`.
    pub isometry_a: CMatrix,
    pub isometry_b: CMatrix,
    pub resource: PureState,
    pub post_unitary_a: CMatrix,
    pub post_unitary_b: CMatrix,
}

impl ProtocolCircuit {
    pub fn rank(&self) -> usize {
        self.schmidt.rank()
    }

    /// `K_j = ⟨j|_a V`.
    pub fn kraus_a(&self, j: usize) -> CMatrix {
        kraus_block(&self.isometry_a, self.unitary.da(), self.rank(), j)
    }

    pub fn kraus_b(&self, j: usize) -> CMatrix {
        kraus_block(&self.isometry_b, self.unitary.db(), self.rank(), j)
    }

    pub fn equal_coefficients(&self) -> bool {
        let cs = &self.schmidt.coefficients;
        cs.iter().all(|x| (x - cs[0]).abs() < 1e-9)
    }
}

fn kraus_block(v: &CMatrix, d: usize, r: usize, j: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |x, y| v[(x * r + j, y)])
}

fn stinespring(kraus: &[CMatrix]) -> CMatrix {
    let r = kraus.len();
    let d = kraus[0].nrows();
    CMatrix::from_fn(d * r, d, |row, y| kraus[row % r][(row / r, y)])
}

pub fn fourier(r: usize) -> CMatrix {
    let s = 1.0 / (r as f64).sqrt();
    CMatrix::from_fn(r, r, |j, k| C64::from_polar(s, TAU * (j * k) as f64 / r as f64))
}

/// Real Householder reflection whose first row is `v` (unit norm).
fn householder_first_row(v: &[f64]) -> CMatrix {
    let r = v.len();
    let mut u: Vec<f64> = v.iter().map(|x| -x).collect();
    u[0] += 1.0;
    let n2: f64 = u.iter().map(|x| x * x).sum();
    if n2 < 1e-24 {
        return identity(r);
    }
    CMatrix::from_fn(r, r, |i, j| {
        let delta = if i == j { 1.0 } else { 0.0 };
        c(delta - 2.0 * u[i] * u[j] / n2, 0.0)
    })
}

/// Assembles the protocol for `u`.
pub fn build_protocol(u: &BipartiteUnitary) -> Result<ProtocolCircuit> {
    let schmidt = operator_schmidt_decompose(u, RANK_TOL)?;
    let r = schmidt.rank();
    let ka: Vec<CMatrix> = (0..r).map(|j| &schmidt.a_ops[j] * c(schmidt.coefficients[j], 0.0)).collect();
    let kb: Vec<CMatrix> = (0..r).map(|j| &schmidt.b_ops[j] * c(schmidt.coefficients[j], 0.0)).collect();
    let isometry_a = stinespring(&ka);
    let isometry_b = stinespring(&kb);
    for (label, v) in [("A", &isometry_a), ("B", &isometry_b)] {
        let defect = (v.adjoint() * v - identity(v.ncols())).norm();
        if defect > 1e-10 {
            return Err(Error::Numerical(format!("Kraus set on {label} is incomplete (defect {defect:e})")));
        }
    }
    let inv: Vec<f64> = schmidt.coefficients.iter().map(|x| 1.0 / x).collect();
    let norm = inv.iter().map(|x| x * x).sum::<f64>().sqrt();
    let row: Vec<f64> = inv.iter().map(|x| x / norm).collect();
    let equal = schmidt.coefficients.iter().all(|x| (x - schmidt.coefficients[0]).abs() < 1e-9);
    let post_unitary_b = if equal { fourier(r) } else { householder_first_row(&row) };
    let resource = PureState::maximally_entangled(r);
    Ok(ProtocolCircuit {
        unitary: u.clone(),
        schmidt,
        isometry_a,
        isometry_b,
        resource,
        post_unitary_a: fourier(r),
        post_unitary_b,
    })
}

/// Outcome tuple `(o_e, o_f, o_a, o_b)`.
pub type Outcomes = [usize; 4];

#[derive(Debug, Clone)]
pub struct Branch {
    pub outcomes: Outcomes,
    pub probability: f64,
    pub operator: CMatrix,
    pub is_success: bool,
    pub fidelity: f64,
}

#[derive(Debug, Clone)]
pub struct BranchTable {
    pub rank: usize,
    pub rows: Vec<Branch>,
}

impl BranchTable {
    pub fn total_probability(&self) -> f64 {
        self.rows.iter().map(|b| b.probability).sum()
    }

    pub fn success_probability(&self) -> f64 {
        self.rows.iter().filter(|b| b.is_success).map(|b| b.probability).sum()
    }

    pub fn accepting(&self) -> Vec<Outcomes> {
        self.rows.iter().filter(|b| b.is_success).map(|b| b.outcomes).collect()
    }

    pub fn min_success_fidelity(&self) -> Option<f64> {
        self.rows.iter().filter(|b| b.is_success).map(|b| b.fidelity).reduce(f64::min)
    }

    /// Draws one branch index according to the branch probabilities.
    pub fn sample_index(&self, rng: &mut impl Rng) -> usize {
        let total = self.total_probability();
        let mut t = rng.random::<f64>() * total;
        for (k, b) in self.rows.iter().enumerate() {
            t -= b.probability;
            if t < 0.0 {
                return k;
            }
        }
        self.rows.iter().rposition(|b| b.probability > 0.0).unwrap_or(0)
    }
}

fn decode(index: usize, r: usize) -> Outcomes {
    [index / (r * r * r), (index / (r * r)) % r, (index / r) % r, index % r]
}

/// Operator applied to `A B` on the branch with the given outcomes.
pub fn branch_operator(circuit: &ProtocolCircuit, o: Outcomes) -> CMatrix {
    let r = circuit.rank();
    let d = circuit.unitary.dim();
    let mut m = CMatrix::zeros(d, d);
    let amp = 1.0 / (r as f64).sqrt();
    for s in 0..r {
        let j = (o[0] + r - s) % r;
        let k = (o[1] + r - s) % r;
        let w = circuit.post_unitary_a[(o[2], j)] * circuit.post_unitary_b[(o[3], k)] * amp;
        if w.norm() < 1e-15 {
            continue;
        }
        m += kron(&circuit.kraus_a(j), &circuit.kraus_b(k)) * w;
    }
    m
}

/// `(λ, residual)` with `M ≈ λU`.
fn proportionality(m: &CMatrix, u: &CMatrix) -> (C64, f64) {
    let lambda = (u.adjoint() * m).trace() / c(u.norm_squared(), 0.0);
    (lambda, (m - u * lambda).norm())
}

/// Enumerates all `r⁴` outcome tuples for the input `psi` on `A B`.
pub fn enumerate_branches(circuit: &ProtocolCircuit, psi: &PureState, parallel: bool) -> Result<BranchTable> {
    let d = circuit.unitary.dim();
    if psi.dim() != d {
        return Err(Error::Shape(format!("input has dimension {}, gate acts on {d}", psi.dim())));
    }
    if !psi.is_normalized() {
        return Err(Error::InvalidState("input must be normalized".into()));
    }
    let r = circuit.rank();
    let n = r.pow(4);
    if n.saturating_mul(d * d) > MAX_TABLE_ENTRIES {
        return Err(Error::Precondition(format!("branch table with {n} rows of {d}×{d} operators is too large")));
    }
    let target = circuit.unitary.matrix() * psi.amplitudes();
    let rows = map_indexed(n, parallel, |idx| {
        let outcomes = decode(idx, r);
        let operator = branch_operator(circuit, outcomes);
        let out: CVector = &operator * psi.amplitudes();
        let probability = out.norm_squared();
        let fidelity = if probability > 0.0 {
            target.dotc(&out).norm_sqr() / probability
        } else {
            0.0
        };
        let (lambda, res) = proportionality(&operator, circuit.unitary.matrix());
        let is_success = lambda.norm() > 1e-12 && res <= 1e-9 * lambda.norm() * (d as f64).sqrt();
        Branch { outcomes, probability, operator, is_success, fidelity }
    });
    Ok(BranchTable { rank: r, rows })
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub outcomes: Outcomes,
    pub output: PureState,
    pub success: bool,
}

/// One sampled run from an enumerated table.
pub fn sample_run(table: &BranchTable, psi: &PureState, rng: &mut impl Rng) -> Result<RunOutcome> {
    let b = &table.rows[table.sample_index(rng)];
    let out = &b.operator * psi.amplitudes();
    Ok(RunOutcome {
        outcomes: b.outcomes,
        output: PureState::normalize(psi.dims().to_vec(), out)?,
        success: b.is_success,
    })
}

/// Samples one run of the protocol, deterministic in `seed`.
pub fn simulate_run(circuit: &ProtocolCircuit, psi: &PureState, seed: u64) -> Result<RunOutcome> {
    let table = enumerate_branches(circuit, psi, false)?;
    sample_run(&table, psi, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Success frequency over `runs` samples from one seeded generator.
pub fn success_frequency(table: &BranchTable, runs: usize, seed: u64) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let hits = (0..runs).filter(|_| table.rows[table.sample_index(&mut rng)].is_success).count();
    hits as f64 / runs as f64
}

/// Haar-random inputs on `A B`; input `k` uses seed `seed + k`.
pub fn seeded_inputs(da: usize, db: usize, count: usize, seed: u64) -> Vec<PureState> {
    (0..count)
        .map(|k| PureState::random(vec![da, db], &mut ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64))))
        .collect()
}

/// `Σ_j e^{2πimj/r} A_j ⊗ B_{(j+l) mod r}` (zero-based `l`, `m`).
pub fn v_lm(schmidt: &OperatorSchmidt, l: usize, m: usize) -> CMatrix {
    let r = schmidt.rank();
    let d = schmidt.da * schmidt.db;
    let mut out = CMatrix::zeros(d, d);
    for j in 0..r {
        let ph = C64::from_polar(1.0, TAU * (m * j) as f64 / r as f64);
        out += kron(&schmidt.a_ops[j], &schmidt.b_ops[(j + l) % r]) * ph;
    }
    out
}

/// Largest deviation of the post-measurement unitaries from unitarity.
pub fn post_unitary_defect(circuit: &ProtocolCircuit) -> f64 {
    unitarity_defect(&circuit.post_unitary_a).max(unitarity_defect(&circuit.post_unitary_b))
}
