//! Gate constructors and structural classifiers.
//!
//! Controlled forms are detected in the computational basis only: a gate is
//! controlled from `A` when every off-diagonal `d_B × d_B` block vanishes.

pub mod pauli;
pub mod random;

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::opschmidt::{schmidt_rank, BipartiteUnitary};
use crate::qcore::{c, cis, frobenius, hs_inner, identity, kron, normal_eigen, wrap_phase, CMatrix, C64};

pub use pauli::{clifford_check, clock, shift, sigma, word};
pub use random::{random_instance, RandomKind};

/// Entries below this modulus count as structural zeros.
pub const ZERO_TOL: f64 = 1e-10;
/// Two terms are grouped when `‖U_j − e^{iφ}U_k‖_F` falls below this.
pub const GROUP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Side {
    A,
    B,
}

/// `U = Σ_j P_j ⊗ U_j` (or `Σ_j U_j ⊗ P_j` for side `B`) with diagonal projectors.
///
/// Levels in one group carry the same term up to a phase; `level_phases[l]`
/// is that phase, so the block at level `l` equals `level_phases[l] · terms[group]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlledForm {
    pub side: Side,
    pub groups: Vec<Vec<usize>>,
    pub terms: Vec<CMatrix>,
    pub level_phases: Vec<C64>,
}

impl ControlledForm {
    pub fn m(&self) -> usize {
        self.terms.len()
    }

    pub fn control_dim(&self) -> usize {
        self.level_phases.len()
    }

    /// Diagonal projector onto the levels of group `j`.
    pub fn projector(&self, j: usize) -> CMatrix {
        let n = self.control_dim();
        let mut p = CMatrix::zeros(n, n);
        for &l in &self.groups[j] {
            p[(l, l)] = c(1.0, 0.0);
        }
        p
    }

    pub fn level_term(&self, level: usize) -> CMatrix {
        let g = self.groups.iter().position(|g| g.contains(&level)).expect("level belongs to a group");
        &self.terms[g] * self.level_phases[level]
    }

    /// Projector ranks in group order.
    pub fn ranks(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StructureReport {
    pub schmidt_rank: usize,
    pub is_permutation: bool,
    pub is_complex_permutation: bool,
    pub controlled_a: Option<ControlledForm>,
    pub controlled_b: Option<ControlledForm>,
    pub block_pattern: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum NamedGate {
    Cnot,
    Swap(usize),
    /// `Σ ω^{jk} |jk⟩⟨jk|` on `d × d`.
    Cz(usize),
    Identity(usize, usize),
    /// Qubit control on `A`, CNOT on the two qubits of `B`.
    Toffoli,
    /// `Σ_{j=0..3} |j⟩⟨j| ⊗ σ_j` on `4 × 2`.
    PauliControlled,
    /// `5 × 2` controlled gate with terms `I, σx, σz, (σx+σz)/√2, (iI+σx)/√2`.
    FiveTerm,
    /// The `2 × 3` block-structured example with `1/√2` entries.
    GsExample,
}

/// Constructor description accepted by [`build`].
#[derive(Debug, Clone, PartialEq)]
pub enum GateSpec {
    Controlled { side: Side, terms: Vec<CMatrix> },
    /// Column `k` is sent to row `images[k]`.
    Permutation { da: usize, db: usize, images: Vec<usize> },
    /// `D₁⊗I + D₂⊗(I_m⊕I_n⊕V₁⊕V₂) + D₃⊗(I_m⊕V₃⊕I_q⊕V₄)`; missing `V`s default to cyclic shifts.
    Ud1 {
        m: usize,
        n: usize,
        q: usize,
        p: usize,
        v1: Option<Vec<usize>>,
        v2: Option<Vec<usize>>,
        v3: Option<Vec<usize>>,
        v4: Option<Vec<usize>>,
        a_ranks: [usize; 3],
    },
    /// `Σ_{jk} |j⟩⟨k| ⊗ V_jk` with `blocks[j][k] = V_jk`.
    Gs { blocks: Vec<Vec<CMatrix>> },
    /// `Σ_j |j⟩⟨j| ⊗ (X^a Z^b)^j` on `d × d`.
    PauliPower { d: usize, a: usize, b: usize },
    /// `Σ_{a,b} |a·d+b⟩⟨a·d+b| ⊗ X^a Z^b` on `d² × d`.
    HwControlled { d: usize },
    /// `|0⟩⟨0|⊗I + |1⟩⟨1|⊗diag(e^{iθ_j})`.
    Gcnot { thetas: Vec<f64> },
    Named(NamedGate),
}

pub fn permutation_matrix(images: &[usize]) -> Result<CMatrix> {
    let n = images.len();
    let mut seen = vec![false; n];
    let mut m = CMatrix::zeros(n, n);
    for (col, &row) in images.iter().enumerate() {
        if row >= n || seen[row] {
            return Err(Error::Construction(format!("images {images:?} do not form a permutation")));
        }
        seen[row] = true;
        m[(row, col)] = c(1.0, 0.0);
    }
    Ok(m)
}

pub fn direct_sum(blocks: &[CMatrix]) -> CMatrix {
    let n: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut m = CMatrix::zeros(n, n);
    let mut off = 0;
    for b in blocks {
        m.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    m
}

/// `V ⊕_B W` on `A ⊗ (B₁ ⊕ B₂)`: `V` acts on the first `d_B(V)` levels of `B`, `W` on the rest.
pub fn direct_sum_b(v: &BipartiteUnitary, w: &BipartiteUnitary) -> Result<BipartiteUnitary> {
    if v.da() != w.da() {
        return Err(Error::Shape(format!("d_A differs: {} vs {}", v.da(), w.da())));
    }
    let (da, d1, d2) = (v.da(), v.db(), w.db());
    let db = d1 + d2;
    let m = CMatrix::from_fn(da * db, da * db, |row, col| {
        let (a, b, a2, b2) = (row / db, row % db, col / db, col % db);
        match (b < d1, b2 < d1) {
            (true, true) => v.matrix()[(a * d1 + b, a2 * d1 + b2)],
            (false, false) => w.matrix()[(a * d2 + b - d1, a2 * d2 + b2 - d1)],
            _ => c(0.0, 0.0),
        }
    });
    BipartiteUnitary::new(da, db, m)
}

pub fn diag_phases(thetas: &[f64]) -> CMatrix {
    CMatrix::from_diagonal(&nalgebra::DVector::from_iterator(thetas.len(), thetas.iter().map(|&t| cis(t))))
}

fn ket_bra(d: usize, j: usize, k: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    m[(j, k)] = c(1.0, 0.0);
    m
}

/// `Σ_j |j⟩⟨j| ⊗ U_j` (side `A`) or `Σ_j U_j ⊗ |j⟩⟨j|` (side `B`).
pub fn controlled(side: Side, terms: &[CMatrix]) -> Result<BipartiteUnitary> {
    let r = terms.len();
    if r == 0 {
        return Err(Error::Construction("controlled gate needs at least one term".into()));
    }
    let d = terms[0].nrows();
    if terms.iter().any(|t| t.nrows() != d || t.ncols() != d) {
        return Err(Error::Construction("controlled terms differ in shape".into()));
    }
    let mut m = CMatrix::zeros(r * d, r * d);
    for (j, t) in terms.iter().enumerate() {
        let p = ket_bra(r, j, j);
        m += match side {
            Side::A => kron(&p, t),
            Side::B => kron(t, &p),
        };
    }
    let (da, db) = match side {
        Side::A => (r, d),
        Side::B => (d, r),
    };
    BipartiteUnitary::new(da, db, m).map_err(|e| Error::Construction(format!("controlled terms are not unitary: {e}")))
}

fn images_or_shift(images: &Option<Vec<usize>>, size: usize, label: &str) -> Result<CMatrix> {
    match images {
        Some(v) if v.len() != size => {
            Err(Error::Construction(format!("{label} has {} entries but block size is {size}", v.len())))
        }
        Some(v) => permutation_matrix(v),
        None => Ok(shift(size)),
    }
}

fn named(g: NamedGate) -> Result<BipartiteUnitary> {
    let s = 0.5f64.sqrt();
    match g {
        NamedGate::Cnot => controlled(Side::A, &[identity(2), sigma(1)]),
        NamedGate::Swap(d) => {
            let images: Vec<usize> = (0..d * d).map(|k| (k % d) * d + k / d).collect();
            BipartiteUnitary::new(d, d, permutation_matrix(&images)?)
        }
        NamedGate::Cz(d) => {
            let terms: Vec<CMatrix> = (0..d).map(|j| matrix_pow(&clock(d), j)).collect();
            controlled(Side::A, &terms)
        }
        NamedGate::Identity(da, db) => Ok(BipartiteUnitary::identity(da, db)),
        NamedGate::Toffoli => {
            let cnot = named(NamedGate::Cnot)?.into_matrix();
            controlled(Side::A, &[identity(4), cnot])
        }
        NamedGate::PauliControlled => controlled(Side::A, &[sigma(0), sigma(1), sigma(2), sigma(3)]),
        NamedGate::FiveTerm => {
            let t4 = (sigma(1) + sigma(3)) * c(s, 0.0);
            let t5 = (sigma(0) * c(0.0, 1.0) + sigma(1)) * c(s, 0.0);
            controlled(Side::A, &[sigma(0), sigma(1), sigma(3), t4, t5])
        }
        NamedGate::GsExample => {
            let (z, o, h) = (c(0.0, 0.0), c(1.0, 0.0), c(s, 0.0));
            #[rustfmt::skip]
            let rows = [
                h, z, z, z, z, h,
                z, o, z, z, z, z,
                z, z, z, o, z, z,
                z, z, z, z, o, z,
                h, z, z, z, z, -h,
                z, z, o, z, z, z,
            ];
            BipartiteUnitary::new(2, 3, CMatrix::from_row_slice(6, 6, &rows))
        }
    }
}

fn matrix_pow(m: &CMatrix, e: usize) -> CMatrix {
    pauli::matrix_power(m, e)
}

fn check_gs(blocks: &[Vec<CMatrix>]) -> Result<(usize, usize)> {
    let da = blocks.len();
    if da == 0 || blocks.iter().any(|row| row.len() != da) {
        return Err(Error::Construction("block table must be square".into()));
    }
    let db = blocks[0][0].nrows();
    if blocks.iter().flatten().any(|b| b.nrows() != db || b.ncols() != db) {
        return Err(Error::Construction("blocks differ in shape".into()));
    }
    for k in 0..da {
        let mut norm: Option<f64> = None;
        for row in blocks {
            let t = frobenius(&row[k]).powi(2);
            if t < ZERO_TOL {
                continue;
            }
            match norm {
                Some(n) if (n - t).abs() > 1e-9 => {
                    return Err(Error::Construction(format!(
                        "column {k}: nonzero blocks have unequal Tr V†V ({n} vs {t})"
                    )))
                }
                _ => norm = Some(t),
            }
        }
    }
    let mut used = vec![false; db * db];
    for b in blocks.iter().flatten() {
        for i in 0..db {
            for j in 0..db {
                if b[(i, j)].norm() > ZERO_TOL {
                    if used[i * db + j] {
                        return Err(Error::Construction(format!(
                            "blocks overlap at position ({i}, {j}); nonzero entries must occupy distinct positions"
                        )));
                    }
                    used[i * db + j] = true;
                }
            }
        }
    }
    Ok((da, db))
}

/// Builds the unitary described by `spec`.
pub fn build(spec: &GateSpec) -> Result<BipartiteUnitary> {
    match spec {
        GateSpec::Controlled { side, terms } => controlled(*side, terms),
        GateSpec::Permutation { da, db, images } => {
            if images.len() != da * db {
                return Err(Error::Construction(format!("need {} images, got {}", da * db, images.len())));
            }
            BipartiteUnitary::new(*da, *db, permutation_matrix(images)?)
        }
        GateSpec::Ud1 { m, n, q, p, v1, v2, v3, v4, a_ranks } => {
            if a_ranks.contains(&0) {
                return Err(Error::Construction("every D_j must be nonzero".into()));
            }
            let (m, n, q, p) = (*m, *n, *q, *p);
            let db = m + n + q + p;
            if db == 0 {
                return Err(Error::Construction("d_B = m + n + q + p must be positive".into()));
            }
            let t2 = direct_sum(&[
                identity(m),
                identity(n),
                images_or_shift(v1, q, "V1")?,
                images_or_shift(v2, p, "V2")?,
            ]);
            let t3 = direct_sum(&[
                identity(m),
                images_or_shift(v3, n, "V3")?,
                identity(q),
                images_or_shift(v4, p, "V4")?,
            ]);
            let terms = [identity(db), t2, t3];
            let mut levels = Vec::new();
            for (j, &r) in a_ranks.iter().enumerate() {
                levels.extend(std::iter::repeat_n(terms[j].clone(), r));
            }
            controlled(Side::A, &levels)
        }
        GateSpec::Gs { blocks } => {
            let (da, db) = check_gs(blocks)?;
            let mut m = CMatrix::zeros(da * db, da * db);
            for (j, row) in blocks.iter().enumerate() {
                for (k, b) in row.iter().enumerate() {
                    m.view_mut((j * db, k * db), (db, db)).copy_from(b);
                }
            }
            BipartiteUnitary::new(da, db, m)
                .map_err(|e| Error::Construction(format!("block table does not give a unitary: {e}")))
        }
        GateSpec::PauliPower { d, a, b } => {
            let w = word(*d, *a, *b);
            let terms: Vec<CMatrix> = (0..*d).map(|j| matrix_pow(&w, j)).collect();
            controlled(Side::A, &terms)
        }
        GateSpec::HwControlled { d } => controlled(Side::A, &pauli::all_words(*d)),
        GateSpec::Gcnot { thetas } => {
            if thetas.is_empty() {
                return Err(Error::Construction("need at least one phase".into()));
            }
            controlled(Side::A, &[identity(thetas.len()), diag_phases(thetas)])
        }
        GateSpec::Named(g) => named(*g),
    }
}

/// Best phase alignment: `(φ, ‖x − e^{iφ} y‖_F)`.
pub fn phase_distance(x: &CMatrix, y: &CMatrix) -> (C64, f64) {
    let ov = hs_inner(y, x);
    let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { c(1.0, 0.0) };
    (ph, frobenius(&(x - y * ph)))
}

fn group_terms(side: Side, blocks: Vec<CMatrix>) -> ControlledForm {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut terms: Vec<CMatrix> = Vec::new();
    let mut phases = Vec::with_capacity(blocks.len());
    for (l, b) in blocks.into_iter().enumerate() {
        let hit = terms.iter().enumerate().find_map(|(g, t)| {
            let (ph, dist) = phase_distance(&b, t);
            (dist < GROUP_TOL).then_some((g, ph))
        });
        match hit {
            Some((g, ph)) => {
                groups[g].push(l);
                phases.push(ph);
            }
            None => {
                groups.push(vec![l]);
                terms.push(b);
                phases.push(c(1.0, 0.0));
            }
        }
    }
    ControlledForm { side, groups, terms, level_phases: phases }
}

/// Controlled-from-`A` form in the computational basis, if every off-diagonal block vanishes.
pub fn controlled_from_a(u: &BipartiteUnitary) -> Option<ControlledForm> {
    let pattern = block_pattern(u);
    for (j, row) in pattern.iter().enumerate() {
        for (k, &nz) in row.iter().enumerate() {
            if j != k && nz {
                return None;
            }
        }
    }
    Some(group_terms(Side::A, (0..u.da()).map(|j| u.block(j, j)).collect()))
}

/// Controlled-from-`B` form; terms then act on `A`.
pub fn controlled_from_b(u: &BipartiteUnitary) -> Option<ControlledForm> {
    controlled_from_a(&u.swap_parties()).map(|mut f| {
        f.side = Side::B;
        f
    })
}

/// `d_A × d_A` grid of flags marking the nonzero `d_B × d_B` blocks.
pub fn block_pattern(u: &BipartiteUnitary) -> Vec<Vec<bool>> {
    (0..u.da())
        .map(|j| (0..u.da()).map(|k| u.block(j, k).iter().any(|z| z.norm() > ZERO_TOL)).collect())
        .collect()
}

/// Entries in `{0} ∪ {unit modulus}` with one nonzero per row and column.
pub fn is_complex_permutation(m: &CMatrix) -> bool {
    let n = m.nrows();
    let mut col_count = vec![0usize; n];
    for i in 0..n {
        let mut row_count = 0;
        for j in 0..n {
            let a = m[(i, j)].norm();
            if a <= ZERO_TOL {
                continue;
            }
            if (a - 1.0).abs() > ZERO_TOL {
                return false;
            }
            row_count += 1;
            col_count[j] += 1;
        }
        if row_count != 1 {
            return false;
        }
    }
    col_count.iter().all(|&k| k == 1)
}

pub fn is_permutation(m: &CMatrix) -> bool {
    is_complex_permutation(m) && m.iter().all(|z| z.norm() <= ZERO_TOL || (z - c(1.0, 0.0)).norm() <= ZERO_TOL)
}

/// For a complex permutation matrix, the row hit by each column.
pub fn permutation_images(m: &CMatrix) -> Option<Vec<usize>> {
    if !is_complex_permutation(m) {
        return None;
    }
    Some((0..m.ncols()).map(|j| (0..m.nrows()).find(|&i| m[(i, j)].norm() > ZERO_TOL).unwrap()).collect())
}

pub fn classify(u: &BipartiteUnitary) -> StructureReport {
    let is_cp = is_complex_permutation(u.matrix());
    StructureReport {
        schmidt_rank: schmidt_rank(u),
        is_permutation: is_cp && is_permutation(u.matrix()),
        is_complex_permutation: is_cp,
        controlled_a: controlled_from_a(u),
        controlled_b: controlled_from_b(u),
        block_pattern: block_pattern(u),
    }
}

/// Groups phases in `[0, 2π)` that agree within `tol` (circularly) and returns
/// one representative per class in ascending order.
pub fn distinct_phases(phases: &[f64], tol: f64) -> Vec<f64> {
    let mut ps: Vec<f64> = phases.iter().map(|&p| wrap_phase(p)).collect();
    ps.sort_by(f64::total_cmp);
    let mut out: Vec<f64> = Vec::new();
    for p in ps {
        if out.last().is_some_and(|&q| (p - q).abs() < tol) {
            continue;
        }
        out.push(p);
    }
    if out.len() > 1 && (TAU - out[out.len() - 1] + out[0]) < tol {
        out.pop();
    }
    out
}

/// Reduces a Schmidt-rank-two gate, controlled in the computational basis with
/// two grouped terms, to `|0⟩⟨0|⊗I_n + |1⟩⟨1|⊗diag(e^{iθ_j})` with one phase per
/// distinct eigenvalue of `U₁†U₂`.
pub fn coarse_grain_sr2(u: &BipartiteUnitary) -> Result<BipartiteUnitary> {
    let (_, phases) = sr2_phases(u)?;
    build(&GateSpec::Gcnot { thetas: phases })
}

/// Controlled form and distinct relative phases of a Schmidt-rank-two controlled gate.
pub fn sr2_phases(u: &BipartiteUnitary) -> Result<(ControlledForm, Vec<f64>)> {
    let rank = schmidt_rank(u);
    if rank != 2 {
        return Err(Error::Precondition(format!("Schmidt rank is {rank}, expected 2")));
    }
    let form = controlled_from_a(u)
        .filter(|f| f.m() == 2)
        .or_else(|| controlled_from_b(u).filter(|f| f.m() == 2))
        .ok_or_else(|| {
            Error::Precondition("gate is not controlled in the computational basis with two distinct terms".into())
        })?;
    let rel = form.terms[0].adjoint() * &form.terms[1];
    let (vals, _) = normal_eigen(&rel)?;
    let raw: Vec<f64> = vals.iter().map(|z| z.arg()).collect();
    Ok((form, distinct_phases(&raw, 1e-8)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn b_direct_sum_of_controlled_gates_is_controlled() {
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        let id = BipartiteUnitary::identity(2, 1);
        let s = direct_sum_b(&cnot, &id).unwrap();
        assert_eq!((s.da(), s.db()), (2, 3));
        let expected = controlled(Side::A, &[identity(3), direct_sum(&[sigma(1), identity(1)])]).unwrap();
        assert!((s.matrix() - expected.matrix()).norm() < 1e-15);
    }

    #[test]
    fn cnot_matrix() {
        let u = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert_eq!(u.matrix(), &permutation_matrix(&[0, 1, 3, 2]).unwrap());
        let r = classify(&u);
        assert!(r.is_permutation);
        assert_eq!(r.schmidt_rank, 2);
        assert_eq!(r.controlled_a.as_ref().unwrap().m(), 2);
        // control from B only appears in the X eigenbasis
        assert!(r.controlled_b.is_none());
        let cz = classify(&build(&GateSpec::Gcnot { thetas: vec![0.0, PI] }).unwrap());
        assert_eq!(cz.controlled_a.unwrap().m(), 2);
        assert_eq!(cz.controlled_b.unwrap().m(), 2);
    }

    #[test]
    fn swap_not_controlled() {
        let r = classify(&build(&GateSpec::Named(NamedGate::Swap(2))).unwrap());
        assert!(r.is_permutation && r.is_complex_permutation);
        assert_eq!(r.schmidt_rank, 4);
        assert!(r.controlled_a.is_none() && r.controlled_b.is_none());
    }

    #[test]
    fn ud1_reference_instance() {
        let spec = GateSpec::Ud1 { m: 0, n: 2, q: 2, p: 0, v1: None, v2: None, v3: None, v4: None, a_ranks: [1, 1, 1] };
        let u = build(&spec).unwrap();
        assert_eq!((u.da(), u.db()), (3, 4));
        let want = controlled(
            Side::A,
            &[identity(4), direct_sum(&[identity(2), sigma(1)]), direct_sum(&[sigma(1), identity(2)])],
        )
        .unwrap();
        assert_eq!(u, want);
        let r = classify(&u);
        assert_eq!(r.schmidt_rank, 3);
        assert!(r.is_permutation);
    }

    #[test]
    fn four_term_permutation_controlled() {
        let p1 = identity(3);
        let p2 = permutation_matrix(&[0, 2, 1]).unwrap();
        let p3 = permutation_matrix(&[2, 1, 0]).unwrap();
        let p4 = permutation_matrix(&[1, 0, 2]).unwrap();
        let u = controlled(Side::A, &[p1, p2, p3, p4]).unwrap();
        let r = classify(&u);
        assert_eq!(r.controlled_a.unwrap().m(), 4);
        assert_eq!(r.schmidt_rank, 4);
    }

    #[test]
    fn gs_example_valid() {
        let u = build(&GateSpec::Named(NamedGate::GsExample)).unwrap();
        let blocks: Vec<Vec<CMatrix>> = (0..2).map(|j| (0..2).map(|k| u.block(j, k)).collect()).collect();
        assert!(build(&GateSpec::Gs { blocks }).is_ok());
    }

    #[test]
    fn gs_violation_named() {
        let blocks = vec![vec![identity(2), identity(2)], vec![identity(2), identity(2)]];
        match build(&GateSpec::Gs { blocks }) {
            Err(Error::Construction(msg)) => assert!(msg.contains("overlap")),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn coarse_grain_examples() {
        // CNOT with a three-level control collapses to a 2x2 gate with phases (0, π)
        let u = controlled(Side::A, &[identity(2), identity(2), sigma(1)]).unwrap();
        let v = coarse_grain_sr2(&u).unwrap();
        assert_eq!((v.da(), v.db()), (2, 2));
        let (_, ph) = sr2_phases(&u).unwrap();
        assert!(ph[0].abs() < 1e-12 && (ph[1] - PI).abs() < 1e-9);

        let d = diag_phases(&[0.0, PI / 3.0, PI / 3.0, PI]);
        let u = controlled(Side::A, &[identity(4), d]).unwrap();
        let (_, ph) = sr2_phases(&u).unwrap();
        assert_eq!(ph.len(), 3);
        for (a, b) in ph.iter().zip([0.0, PI / 3.0, PI]) {
            assert!((a - b).abs() < 1e-9);
        }
        let v = coarse_grain_sr2(&u).unwrap();
        assert_eq!((v.da(), v.db()), (2, 3));

        let swap = build(&GateSpec::Named(NamedGate::Swap(2))).unwrap();
        assert!(matches!(coarse_grain_sr2(&swap), Err(Error::Precondition(_))));
    }

    #[test]
    fn pauli_power_is_qutrit_cz() {
        let a = build(&GateSpec::PauliPower { d: 3, a: 0, b: 1 }).unwrap();
        let b = build(&GateSpec::Named(NamedGate::Cz(3))).unwrap();
        assert!(frobenius(&(a.matrix() - b.matrix())) < 1e-12);
    }

    #[test]
    fn clifford_examples() {
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert!(clifford_check(&cnot, None).unwrap());
        let toffoli = build(&GateSpec::Named(NamedGate::Toffoli)).unwrap();
        assert_eq!((toffoli.da(), toffoli.db()), (2, 4));
        assert!(!clifford_check(&toffoli, None).unwrap());
        let cz3 = build(&GateSpec::Named(NamedGate::Cz(3))).unwrap();
        assert!(clifford_check(&cz3, None).unwrap());
        let swap3 = build(&GateSpec::Named(NamedGate::Swap(3))).unwrap();
        assert!(clifford_check(&swap3, None).unwrap());
        let five = build(&GateSpec::Named(NamedGate::FiveTerm)).unwrap();
        assert!(matches!(clifford_check(&five, None), Err(Error::Shape(_))));
    }

    #[test]
    fn distinct_phase_wraparound() {
        let ph = distinct_phases(&[0.0, TAU - 1e-12, 1.0, 1.0 + 1e-10], 1e-8);
        assert_eq!(ph.len(), 2);
    }
}
