//! Analytic evaluators and structural classifiers for the gate families with
//! known entangling power.

use std::f64::consts::{PI, TAU};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{
    block_pattern, controlled_from_a, is_complex_permutation, is_permutation, sr2_phases, Side,
};
use crate::gates::pauli::clifford_check;
use crate::opschmidt::{schmidt_rank, schmidt_strength_of, BipartiteUnitary};
use crate::optimize::lp::feasible_point;
use crate::optimize::{entangling_power, output_entanglement, PowerOptions};
use crate::qcore::{binary_entropy, c, identity, normal_eigen, shannon_entropy, wrap_phase, CMatrix, CVector, PureState, C64};

/// `log₂ 9 − 16/9`, the entangling power of the `p = 0` family.
pub fn nqp220_value() -> f64 {
    9f64.log2() - 16.0 / 9.0
}

/// The bound together with the spectrum `(1/9, 4/9, 4/9)` that attains it.
pub fn nqp220_bound() -> (f64, [f64; 3]) {
    (nqp220_value(), [1.0 / 9.0, 4.0 / 9.0, 4.0 / 9.0])
}

/// `h(i,j) = H((1 − |cos((θ_i − θ_j)/2)|)/2)`.
pub fn h_pair(ti: f64, tj: f64) -> f64 {
    binary_entropy((1.0 - ((ti - tj) / 2.0).cos().abs()) / 2.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sr2Value {
    /// Maximum of `H((1 − |Σ c_j e^{iθ_j}|)/2)` over the simplex, from the
    /// stationarity system solved on every face with at most three vertices.
    pub value: f64,
    /// Weights `c_j` attaining `value`.
    pub weights: Vec<f64>,
    /// `max_{i<j} h(i,j)`.
    pub pairwise_max: f64,
    /// Whether the origin lies in the convex hull of the phase points.
    pub origin_in_hull: bool,
    /// `n > 3`: the pairwise formula is only conjectured there.
    pub conjecture_mode: bool,
}

impl Sr2Value {
    pub fn pairwise_agrees(&self) -> bool {
        (self.value - self.pairwise_max).abs() < 1e-12
    }
}

fn modulus_for(thetas: &[f64], w: &[f64]) -> f64 {
    let z: C64 = thetas.iter().zip(w).map(|(&t, &x)| C64::from_polar(x, t)).sum();
    z.norm()
}

/// Largest angular gap between consecutive phases on the circle.
pub fn max_angular_gap(thetas: &[f64]) -> f64 {
    let mut ps: Vec<f64> = thetas.iter().map(|&t| wrap_phase(t)).collect();
    ps.sort_by(f64::total_cmp);
    let mut gap = TAU - ps[ps.len() - 1] + ps[0];
    for w in ps.windows(2) {
        gap = gap.max(w[1] - w[0]);
    }
    gap
}

/// Stationary points of `Σ_{j>k} c_j c_k sin²((θ_j−θ_k)/2)` on the face `subset`.
fn face_stationary(thetas: &[f64], subset: &[usize]) -> Option<Vec<f64>> {
    let k = subset.len();
    let mut a = DMatrix::<f64>::zeros(k + 1, k + 1);
    let mut b = DVector::<f64>::zeros(k + 1);
    for (r, &i) in subset.iter().enumerate() {
        for (s, &j) in subset.iter().enumerate() {
            a[(r, s)] = ((thetas[i] - thetas[j]) / 2.0).sin().powi(2);
        }
        a[(r, k)] = -1.0;
        a[(k, r)] = 1.0;
    }
    b[k] = 1.0;
    let lu = a.lu();
    if lu.determinant().abs() < 1e-12 {
        return None;
    }
    let x = lu.solve(&b)?;
    let w: Vec<f64> = x.iter().take(k).copied().collect();
    w.iter().all(|&v| v >= -1e-12).then(|| w.iter().map(|v| v.max(0.0)).collect())
}

fn subsets_up_to(n: usize, max: usize) -> Vec<Vec<usize>> {
    let mut out: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        out.push(vec![i]);
        if max >= 2 {
            for j in i + 1..n {
                out.push(vec![i, j]);
                if max >= 3 {
                    for k in j + 1..n {
                        out.push(vec![i, j, k]);
                    }
                }
            }
        }
    }
    out
}

/// Entangling power of `|0⟩⟨0|⊗I + |1⟩⟨1|⊗diag(e^{iθ_j})` from its phases.
pub fn ke_sr2(thetas: &[f64]) -> Result<Sr2Value> {
    if thetas.len() < 2 {
        return Err(Error::Precondition(format!("need at least two phases, got {}", thetas.len())));
    }
    if thetas.iter().any(|t| !t.is_finite()) {
        return Err(Error::Precondition("phases must be finite".into()));
    }
    let n = thetas.len();
    let mut best = (0.0, {
        let mut w = vec![0.0; n];
        w[0] = 1.0;
        w
    });
    // a minimum-modulus point of the hull is a combination of at most three phases
    for subset in subsets_up_to(n, 3) {
        let Some(wf) = face_stationary(thetas, &subset) else {
            continue;
        };
        let mut w = vec![0.0; n];
        for (&i, &v) in subset.iter().zip(&wf) {
            w[i] = v;
        }
        let x = modulus_for(thetas, &w).min(1.0);
        let v = binary_entropy((1.0 - x) / 2.0);
        if v > best.0 + 1e-15 {
            best = (v, w);
        }
    }
    let mut pairwise_max: f64 = 0.0;
    for i in 0..n {
        for j in i + 1..n {
            pairwise_max = pairwise_max.max(h_pair(thetas[i], thetas[j]));
        }
    }
    Ok(Sr2Value {
        value: best.0,
        weights: best.1,
        pairwise_max,
        origin_in_hull: max_angular_gap(thetas) <= PI + 1e-10,
        conjecture_mode: n > 3,
    })
}

/// [`ke_sr2`] on the phases of a Schmidt-rank-two controlled gate.
pub fn ke_sr2_of(u: &BipartiteUnitary) -> Result<Sr2Value> {
    let (_, phases) = sr2_phases(u)?;
    if phases.len() < 2 {
        return Err(Error::Precondition("relative term has a single eigenphase".into()));
    }
    ke_sr2(&phases)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GcnotVerdict {
    pub is_gcnot: bool,
    pub phases: Vec<f64>,
    /// Nonnegative weights summing to one with `Σ w_j e^{iθ_j} = 0`.
    pub witness: Option<Vec<f64>>,
}

/// Whether the origin lies in the convex hull of the phases of `U₁†U₂`.
pub fn gcnot_check(u: &BipartiteUnitary) -> Result<GcnotVerdict> {
    let (_, phases) = sr2_phases(u)?;
    Ok(gcnot_check_phases(&phases))
}

pub fn gcnot_check_phases(phases: &[f64]) -> GcnotVerdict {
    let is_gcnot = phases.len() >= 2 && max_angular_gap(phases) <= PI + 1e-10;
    let witness = if is_gcnot {
        let rows = vec![
            phases.iter().map(|t| t.cos()).collect(),
            phases.iter().map(|t| t.sin()).collect(),
            vec![1.0; phases.len()],
        ];
        feasible_point(&rows, &[0.0, 0.0, 1.0], 1e-12).map(|w| {
            let s: f64 = w.iter().sum();
            w.into_iter().map(|x| x / s).collect()
        })
    } else {
        None
    };
    GcnotVerdict { is_gcnot, phases: phases.to_vec(), witness }
}

/// Block parameters of the three-term permutation family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Ud1Form {
    pub control: Side,
    pub m: usize,
    pub n: usize,
    pub q: usize,
    pub p: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sr3PermVerdict {
    pub value: f64,
    pub form: Option<Ud1Form>,
    pub numeric_estimate: f64,
}

impl Sr3PermVerdict {
    pub fn agrees(&self) -> bool {
        (self.numeric_estimate - self.value).abs() < 1e-3
    }
}

fn perm_of(m: &CMatrix) -> Vec<usize> {
    // images[k] = row hit by column k
    (0..m.ncols()).map(|k| (0..m.nrows()).find(|&i| m[(i, k)].norm() > 0.5).unwrap_or(k)).collect()
}

fn compose(a: &[usize], b: &[usize]) -> Vec<usize> {
    b.iter().map(|&x| a[x]).collect()
}

fn inverse(a: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; a.len()];
    for (i, &x) in a.iter().enumerate() {
        inv[x] = i;
    }
    inv
}

fn invariant(perm: &[usize], set: &[bool]) -> bool {
    (0..perm.len()).all(|i| !set[i] || set[perm[i]])
}

/// Matches the three distinct terms `{S_1,S_2,S_3}` against
/// `I ⊕ I ⊕ V₁ ⊕ V₂`, `I ⊕ V₃ ⊕ I ⊕ V₄` after relabelling.
fn match_terms(terms: &[Vec<usize>], control: Side) -> Option<Ud1Form> {
    let mut best: Option<Ud1Form> = None;
    for k in 0..3 {
        let base_inv = inverse(&terms[k]);
        let others: Vec<Vec<usize>> = (0..3).filter(|&i| i != k).map(|i| compose(&terms[i], &base_inv)).collect();
        let (r1, r2) = (&others[0], &others[1]);
        let d = r1.len();
        let mov1: Vec<bool> = (0..d).map(|i| r1[i] != i).collect();
        let mov2: Vec<bool> = (0..d).map(|i| r2[i] != i).collect();
        let both: Vec<bool> = (0..d).map(|i| mov1[i] && mov2[i]).collect();
        if !(invariant(r1, &both) && invariant(r2, &both)) {
            continue;
        }
        let count = |f: &dyn Fn(usize) -> bool| (0..d).filter(|&i| f(i)).count();
        let form = Ud1Form {
            control,
            m: count(&|i| !mov1[i] && !mov2[i]),
            n: count(&|i| mov2[i] && !mov1[i]),
            q: count(&|i| mov1[i] && !mov2[i]),
            p: count(&|i| both[i]),
        };
        if best.is_none_or(|b| form.p < b.p) {
            best = Some(form);
        }
    }
    best
}

fn detect_ud1_side(u: &BipartiteUnitary, control: Side) -> Option<Ud1Form> {
    let pattern = block_pattern(u);
    let mut terms: Vec<Vec<usize>> = Vec::new();
    for row in &pattern {
        let cols: Vec<usize> = (0..row.len()).filter(|&k| row[k]).collect();
        if cols.len() != 1 {
            return None;
        }
    }
    for (j, row) in pattern.iter().enumerate() {
        let k = row.iter().position(|&x| x).expect("one block per row");
        let t = perm_of(&u.block(j, k));
        if !terms.contains(&t) {
            terms.push(t);
        }
    }
    if terms.len() != 3 {
        return None;
    }
    match_terms(&terms, control)
}

/// Structural form of a Schmidt-rank-three permutation gate, if it fits the
/// three-term family from either side.
pub fn detect_ud1(u: &BipartiteUnitary) -> Option<Ud1Form> {
    let a = detect_ud1_side(u, Side::A);
    let b = detect_ud1_side(&u.swap_parties(), Side::B);
    match (a, b) {
        (Some(x), Some(y)) => Some(if y.p < x.p { y } else { x }),
        (x, y) => x.or(y),
    }
}

/// Two-valued entangling power of a Schmidt-rank-three permutation gate.
pub fn classify_perm_sr3(u: &BipartiteUnitary, opts: &PowerOptions) -> Result<Sr3PermVerdict> {
    if !is_permutation(u.matrix()) {
        return Err(Error::Precondition("gate is not a permutation matrix".into()));
    }
    let rank = schmidt_rank(u);
    if rank != 3 {
        return Err(Error::Precondition(format!("Schmidt rank is {rank}, expected 3")));
    }
    let form = detect_ud1(u);
    let value = if form.is_some_and(|f| f.p == 0) { nqp220_value() } else { 3f64.log2() };
    let numeric_estimate = entangling_power(u, opts)?.value;
    Ok(Sr3PermVerdict { value, form, numeric_estimate })
}

/// `H(1/(e^M+1), e^M/(e^M+1)) + M e^M/(e^M+1)`.
pub fn cp3_formula(m: f64) -> f64 {
    let x = 1.0 / (m.exp() + 1.0);
    binary_entropy(x) + (1.0 - x) * m
}

/// `max_x H(x, 1−x) + (1−x) M` with the entropy in bits, i.e. `log₂(1 + 2^M)`.
pub fn cp3_base2_maximum(m: f64) -> f64 {
    (1.0 + m.exp2()).log2()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Cp3Value {
    pub analytic: f64,
    pub m: f64,
    /// Size of the `I_n` block in the normal form.
    pub n: usize,
    /// Eigenphases of the residual block `C`.
    pub c_phases: Vec<f64>,
    /// Maximum of the same bound when the stationary point is taken in base 2.
    pub base2_maximum: f64,
    /// The two stationary points disagree.
    pub stationarity_discrepancy: bool,
}

fn proportional(x: &CMatrix, y: &CMatrix) -> Option<C64> {
    let (i, _) = x.iter().enumerate().find(|(_, z)| z.norm() > 0.5)?;
    let lambda = y.as_slice()[i] / x.as_slice()[i];
    ((y - x * lambda).norm() < 1e-9).then_some(lambda)
}

/// Entangling power of a `2 × d_B` complex permutation gate of Schmidt rank three.
pub fn ke_cp3(u: &BipartiteUnitary) -> Result<Cp3Value> {
    if u.da() != 2 || !is_complex_permutation(u.matrix()) {
        return Err(Error::Precondition("gate must be a 2 × d_B complex permutation".into()));
    }
    let rank = schmidt_rank(u);
    if rank != 3 {
        return Err(Error::Precondition(format!("Schmidt rank is {rank}, expected 3")));
    }
    let (b11, b12, b21, b22) = (u.block(0, 0), u.block(0, 1), u.block(1, 0), u.block(1, 1));
    let (diag, off_top, off_bottom, lambda) = if let Some(l) = proportional(&b11, &b22) {
        (b11, b12, b21, l)
    } else if let Some(l) = proportional(&b12, &b21) {
        (b12, b11, b22, l)
    } else {
        return Err(Error::Precondition("neither diagonal nor off-diagonal blocks are proportional".into()));
    };
    let n = diag.iter().filter(|z| z.norm() > 0.5).count();
    // λ⁻¹ X₁₂† X₂₁ is unitarily similar to 0_n ⊕ C
    let nmat = off_top.adjoint() * off_bottom / lambda;
    let (vals, _) = normal_eigen(&nmat)?;
    let c_phases: Vec<f64> = vals.iter().filter(|z| z.norm() > 0.5).map(|z| wrap_phase(z.arg())).collect();
    let m = if c_phases.len() < 2 { 0.0 } else { ke_sr2(&c_phases)?.value };
    let analytic = cp3_formula(m);
    if !(1.0 - 1e-12..3f64.log2()).contains(&analytic) {
        return Err(Error::Numerical(format!("formula value {analytic} outside [1, log2 3)")));
    }
    let base2_maximum = cp3_base2_maximum(m);
    Ok(Cp3Value {
        analytic,
        m,
        n,
        c_phases,
        base2_maximum,
        stationarity_discrepancy: (base2_maximum - analytic).abs() > 1e-9,
    })
}

/// Product input on `A R_A ⊗ B R_B` reaching two ebits for a `2 × d_B`
/// complex permutation gate of Schmidt rank four.
pub fn sr4_witness(u: &BipartiteUnitary) -> Result<(PureState, PureState)> {
    if u.da() != 2 || !is_complex_permutation(u.matrix()) {
        return Err(Error::Precondition("gate must be a 2 × d_B complex permutation".into()));
    }
    let rank = schmidt_rank(u);
    if rank != 4 {
        return Err(Error::Precondition(format!("Schmidt rank is {rank}, expected 4")));
    }
    let db = u.db();
    let alpha = PureState::maximally_entangled(2);
    let s = 0.5f64.sqrt();
    for i in 0..db {
        for j in i + 1..db {
            let mut v = CVector::zeros(db * db);
            v[i * db + i] = c(s, 0.0);
            v[j * db + j] = c(s, 0.0);
            let beta = PureState::new(vec![db, db], v)?;
            if (output_entanglement(u, &alpha, &beta)? - 2.0).abs() < 1e-9 {
                return Ok((alpha, beta));
            }
        }
    }
    Err(Error::SearchFailed("no index pair gives a uniformly entangled rank-four output".into()))
}

/// Schmidt strength of a generalized Clifford gate, which equals all three powers.
pub fn clifford_powers(u: &BipartiteUnitary) -> Result<f64> {
    if !clifford_check(u, None)? {
        return Err(Error::Precondition("gate is not a generalized Clifford operator".into()));
    }
    Ok(schmidt_strength_of(u))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Symmetrized {
    pub left_a: CMatrix,
    pub left_b: CMatrix,
    pub right_a: CMatrix,
    pub right_b: CMatrix,
    pub symmetric: BipartiteUnitary,
}

fn is_symmetric(m: &CMatrix, tol: f64) -> bool {
    (m - m.transpose()).norm() < tol
}

/// Local equivalence of a Schmidt-rank-three `d_A × 2` controlled gate to a
/// symmetric matrix: `symmetric = (L_A⊗L_B) U (R_A⊗R_B)`.
pub fn symmetrize_dax2_sr3(u: &BipartiteUnitary) -> Result<Symmetrized> {
    if u.db() != 2 {
        return Err(Error::Precondition(format!("d_B is {}, expected 2", u.db())));
    }
    let rank = schmidt_rank(u);
    if rank != 3 {
        return Err(Error::Precondition(format!("Schmidt rank is {rank}, expected 3")));
    }
    let form = controlled_from_a(u)
        .ok_or_else(|| Error::Precondition("gate is not controlled from A in the computational basis".into()))?;
    let (ia, ib) = (identity(u.da()), identity(2));
    if is_symmetric(u.matrix(), 1e-12) {
        return Ok(Symmetrized {
            left_a: ia.clone(),
            left_b: ib.clone(),
            right_a: ia,
            right_b: ib,
            symmetric: u.clone(),
        });
    }
    let terms = &form.terms;
    let base = terms[0].clone();
    let rel: Vec<CMatrix> = terms.iter().map(|t| t * base.adjoint()).collect();
    // a term independent of the identity, then one outside span{I, diag}
    let second = rel
        .iter()
        .position(|t| crate::gates::phase_distance(t, &ib).1 > 1e-8 && (t - ib.clone() * (t.trace() / c(2.0, 0.0))).norm() > 1e-8)
        .ok_or_else(|| Error::Precondition("terms do not span three dimensions".into()))?;
    let (_, q) = normal_eigen(&rel[second])?;
    let q = orthonormalize(&q);
    let diag_terms: Vec<CMatrix> = rel.iter().map(|t| q.adjoint() * t * &q).collect();
    let third = diag_terms
        .iter()
        .find(|t| t[(0, 1)].norm() > 1e-8)
        .ok_or_else(|| Error::Precondition("terms do not span three dimensions".into()))?;
    let phi = (third[(0, 1)] / third[(1, 0)]).arg() / 2.0;
    let e = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), C64::from_polar(1.0, phi)]));
    let left_b = &e * q.adjoint();
    let right_b = base.adjoint() * &q * e.adjoint();
    let sym = crate::qcore::kron(&ia, &left_b) * u.matrix() * crate::qcore::kron(&ia, &right_b);
    let symmetric = BipartiteUnitary::new(u.da(), 2, sym)?;
    if !is_symmetric(symmetric.matrix(), 1e-9) {
        return Err(Error::Numerical("symmetrization left an asymmetric residue".into()));
    }
    Ok(Symmetrized { left_a: ia.clone(), left_b, right_a: ia, right_b, symmetric })
}

fn orthonormalize(q: &CMatrix) -> CMatrix {
    q.clone().qr().q()
}

/// Shannon entropy of `(1/4, (3+√5)/8, (3−√5)/8)`.
pub fn overlap_worst_case() -> f64 {
    let r5 = 5f64.sqrt();
    shannon_entropy(&[0.25, (3.0 + r5) / 8.0, (3.0 - r5) / 8.0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::{build, GateSpec, NamedGate};

    fn ud1(p: usize) -> BipartiteUnitary {
        build(&GateSpec::Ud1 { m: 0, n: 2, q: 2, p, v1: None, v2: None, v3: None, v4: None, a_ranks: [1, 1, 1] }).unwrap()
    }

    #[test]
    fn sr2_examples() {
        assert!((ke_sr2(&[0.0, PI]).unwrap().value - 1.0).abs() < 1e-15);
        assert!(ke_sr2(&[0.0, 0.0]).unwrap().value.abs() < 1e-15);
        let s = 0.5f64.sqrt();
        let expect = binary_entropy((1.0 - s) / 2.0);
        let v = ke_sr2(&[0.0, PI / 2.0]).unwrap();
        assert!((v.value - expect).abs() < 1e-12 && (v.value - 0.60088).abs() < 1e-5);
        assert!(v.pairwise_agrees());
        assert!(ke_sr2(&[1.0]).is_err());
    }

    #[test]
    fn sr2_interior_root() {
        // three cube roots of unity: the interior stationary point reaches one ebit
        let v = ke_sr2(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0]).unwrap();
        assert!((v.value - 1.0).abs() < 1e-12);
        assert!(v.origin_in_hull);
        assert!((v.pairwise_max - binary_entropy(0.25)).abs() < 1e-12);
        for w in &v.weights {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sr2_hull_distance_oracle() {
        // independent oracle: 1 ebit inside the hull, otherwise the nearest chord midpoint
        let grid: Vec<f64> = (0..12).map(|k| k as f64 * PI / 6.0).collect();
        for &a in &grid {
            for &b in &grid {
                for &d in &grid {
                    let th = [a, b, d, 0.3];
                    let v = ke_sr2(&th).unwrap();
                    let expect = if max_angular_gap(&th) <= PI + 1e-10 {
                        1.0
                    } else {
                        let mut r: f64 = 1.0;
                        for i in 0..4 {
                            for j in i + 1..4 {
                                r = r.min(((th[i] - th[j]) / 2.0).cos().abs());
                            }
                        }
                        binary_entropy((1.0 - r) / 2.0)
                    };
                    assert!((v.value - expect).abs() < 1e-9, "{th:?}: {} vs {expect}", v.value);
                }
            }
        }
    }

    #[test]
    fn gcnot_examples() {
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        let g = gcnot_check(&cnot).unwrap();
        assert!(g.is_gcnot);
        let w = g.witness.unwrap();
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
        assert!(!gcnot_check_phases(&[0.0, PI / 4.0]).is_gcnot);
        let g = gcnot_check_phases(&[0.0, TAU / 3.0, 2.0 * TAU / 3.0]);
        for w in g.witness.unwrap() {
            assert!((w - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn nqp_bound() {
        let (v, spec) = nqp220_bound();
        assert!((v - 1.392_147_2).abs() < 1e-7);
        assert!((shannon_entropy(&spec) - v).abs() < 1e-12);
        assert!(v < 3f64.log2());
    }

    #[test]
    fn ud1_detection() {
        assert_eq!(detect_ud1(&ud1(0)).map(|f| (f.m, f.n, f.q, f.p)), Some((0, 2, 2, 0)));
        assert_eq!(detect_ud1(&ud1(2)).map(|f| f.p), Some(2));
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert!(matches!(classify_perm_sr3(&cnot, &PowerOptions::default()), Err(Error::Precondition(_))));
    }

    #[test]
    fn ud1_detection_survives_local_permutations() {
        let u = ud1(0);
        let pa = crate::gates::permutation_matrix(&[2, 0, 1]).unwrap();
        let pb = crate::gates::permutation_matrix(&[3, 1, 0, 2]).unwrap();
        let qb = crate::gates::permutation_matrix(&[1, 3, 2, 0]).unwrap();
        let v = u.local_sandwich(&pa, &pb, &identity(3), &qb).unwrap();
        assert_eq!(detect_ud1(&v).map(|f| f.p), Some(0));
        assert_eq!(detect_ud1(&v.swap_parties()).map(|f| f.p), Some(0));
    }

    #[test]
    fn cp3_formula_values() {
        assert!((cp3_formula(0.0) - 1.0).abs() < 1e-15);
        assert!((cp3_formula(1.0) - 1.571_000_11).abs() < 1e-8);
        assert!((cp3_base2_maximum(1.0) - 3f64.log2()).abs() < 1e-15);
        let mut prev = 0.0;
        for k in 0..=100 {
            let v = cp3_formula(k as f64 / 100.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    pub(crate) fn cp3_instance() -> BipartiteUnitary {
        let mut m = CMatrix::zeros(6, 6);
        for (r, col) in [(0, 0), (1, 4), (2, 5), (3, 3), (4, 2), (5, 1)] {
            m[(r, col)] = c(1.0, 0.0);
        }
        BipartiteUnitary::new(2, 3, m).unwrap()
    }

    #[test]
    fn cp3_sigma_x_instance() {
        let v = ke_cp3(&cp3_instance()).unwrap();
        assert_eq!(v.n, 1);
        assert!((v.m - 1.0).abs() < 1e-12);
        assert!((v.analytic - 1.571_000_11).abs() < 1e-8);
        assert!(v.stationarity_discrepancy);
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert!(ke_cp3(&cnot).is_err());
    }

    #[test]
    fn sr4_swap() {
        let swap = build(&GateSpec::Named(NamedGate::Swap(2))).unwrap();
        let (a, b) = sr4_witness(&swap).unwrap();
        assert!((output_entanglement(&swap, &a, &b).unwrap() - 2.0).abs() < 1e-9);
        assert!(sr4_witness(&cp3_instance()).is_err());
    }

    #[test]
    fn clifford_values() {
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert!((clifford_powers(&cnot).unwrap() - 1.0).abs() < 1e-12);
        let swap3 = build(&GateSpec::Named(NamedGate::Swap(3))).unwrap();
        assert!((clifford_powers(&swap3).unwrap() - 2.0 * 3f64.log2()).abs() < 1e-10);
        let cz = build(&GateSpec::Named(NamedGate::Cz(3))).unwrap();
        assert!((clifford_powers(&cz).unwrap() - 3f64.log2()).abs() < 1e-10);
        let tof = build(&GateSpec::Named(NamedGate::Toffoli)).unwrap();
        assert!(clifford_powers(&tof).is_err());
    }

    #[test]
    fn symmetrize_example() {
        let s = 0.5f64.sqrt();
        let had = CMatrix::from_row_slice(2, 2, &[c(s, 0.0), c(0.0, s), c(0.0, s), c(s, 0.0)]);
        let had = crate::gates::diag_phases(&[0.0, 0.7]) * had;
        let terms = vec![identity(2), crate::gates::diag_phases(&[0.0, PI]), had];
        let u = crate::gates::controlled(Side::A, &terms).unwrap();
        let r = symmetrize_dax2_sr3(&u).unwrap();
        let m = r.symmetric.matrix();
        assert!((m - m.transpose()).norm() < 1e-9);
        let rebuilt = crate::qcore::kron(&r.left_a, &r.left_b) * u.matrix() * crate::qcore::kron(&r.right_a, &r.right_b);
        assert!((rebuilt - m).norm() < 1e-12);
        let sym = crate::gates::controlled(Side::A, &[identity(2), crate::gates::diag_phases(&[0.0, PI]), crate::gates::pauli::sigma(1)]).unwrap();
        let r = symmetrize_dax2_sr3(&sym).unwrap();
        assert_eq!(r.left_b, identity(2));
        let cnot = build(&GateSpec::Named(NamedGate::Cnot)).unwrap();
        assert!(symmetrize_dax2_sr3(&cnot).is_err());
    }

    #[test]
    fn overlap_value() {
        assert!((overlap_worst_case() - 1.223_813_9).abs() < 1e-7);
    }
}
