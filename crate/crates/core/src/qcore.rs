//! Dense complex linear algebra and entropy primitives.
//!
//! Everything here works on small dense matrices (total dimension at most a
//! few hundred). Logarithms are base 2 throughout, so entropies come out in
//! bits and entanglement in ebits.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

pub type C64 = Complex<f64>;
/// Row-major semantics are only relevant at the file boundary; internally this
/// is nalgebra's column-major dense matrix.
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Eigenvalues at or below this are treated as zero inside entropies.
pub const ENTROPY_CUTOFF: f64 = 1e-12;
/// Tolerance for state validity checks (normalization, hermiticity, trace).
pub const STATE_TOL: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn cis(theta: f64) -> C64 {
    C64::from_polar(1.0, theta)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

pub fn kron_vec(a: &CVector, b: &CVector) -> CVector {
    a.kronecker(b)
}

pub fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

pub fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Hilbert-Schmidt inner product `Tr(a† b)`.
pub fn hs_inner(a: &CMatrix, b: &CMatrix) -> C64 {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn is_finite(m: &CMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

/// Frobenius distance of `m† m` from the identity.
pub fn unitarity_defect(m: &CMatrix) -> f64 {
    if !m.is_square() {
        return f64::INFINITY;
    }
    let n = m.nrows();
    frobenius(&(m.adjoint() * m - identity(n)))
}

pub fn is_unitary(m: &CMatrix, tol: f64) -> bool {
    m.is_square() && is_finite(m) && unitarity_defect(m) <= tol
}

/// Largest entrywise deviation of `m` from `m†`.
pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            worst = worst.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    worst
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in descending order
/// with eigenvectors as the matching columns.
pub fn hermitian_eigen(m: &CMatrix) -> (Vec<f64>, CMatrix) {
    let n = m.nrows();
    // symmetrize to kill round-off asymmetry before handing to the solver
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let mut vecs = CMatrix::zeros(n, n);
    for (col, &k) in order.iter().enumerate() {
        vecs.set_column(col, &eig.eigenvectors.column(k));
    }
    (values, vecs)
}

pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let h = (m + m.adjoint()) * c(0.5, 0.0);
    let mut vals: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    vals.sort_by(|a, b| b.total_cmp(a));
    vals
}

/// Eigen-decomposition of a normal (e.g. unitary) matrix using only the
/// Hermitian solver: a generic real combination of the Hermitian and
/// anti-Hermitian parts has the same eigenvectors.
pub fn normal_eigen(m: &CMatrix) -> Result<(Vec<C64>, CMatrix)> {
    let n = m.nrows();
    let herm = (m + m.adjoint()) * c(0.5, 0.0);
    let anti = (m - m.adjoint()) * c(0.0, -0.5);
    for t in [0.618_033_988_749_894_9, 1.414_213_562_373_095, 0.271_828_182_845_904_5, 2.718_281_828] {
        let combo = &herm + &anti * c(t, 0.0);
        let (_, vecs) = hermitian_eigen(&combo);
        let mut values = Vec::with_capacity(n);
        let mut ok = true;
        for k in 0..n {
            let v = vecs.column(k).into_owned();
            let mv = m * &v;
            let lambda = v.dotc(&mv);
            if (mv - &v * lambda).norm() > 1e-9 * (1.0 + lambda.norm()) {
                ok = false;
                break;
            }
            values.push(lambda);
        }
        if ok {
            return Ok((values, vecs));
        }
    }
    Err(Error::Numerical("normal eigendecomposition did not converge".into()))
}

/// Eigenphases in `[0, 2π)` of a unitary matrix (with multiplicity, ascending).
pub fn eigenphases(u: &CMatrix) -> Result<Vec<f64>> {
    let (vals, _) = normal_eigen(u)?;
    let mut phases: Vec<f64> = vals.iter().map(|z| wrap_phase(z.arg())).collect();
    phases.sort_by(f64::total_cmp);
    Ok(phases)
}

pub fn wrap_phase(theta: f64) -> f64 {
    let tau = std::f64::consts::TAU;
    let mut t = theta.rem_euclid(tau);
    if tau - t < 1e-12 {
        t = 0.0;
    }
    t
}

/// Shannon entropy in bits; entries at or below the cutoff contribute zero.
pub fn shannon_entropy(probs: &[f64]) -> f64 {
    probs
        .iter()
        .filter(|&&p| p > ENTROPY_CUTOFF)
        .map(|&p| -p * p.log2())
        .sum()
}

/// Binary entropy `H(x, 1-x)`.
pub fn binary_entropy(x: f64) -> f64 {
    shannon_entropy(&[x, 1.0 - x])
}

/// A pure state on an ordered list of subsystems.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState {
    dims: Vec<usize>,
    amplitudes: CVector,
    normalized: bool,
}

impl PureState {
    /// Builds a normalized state; rejects vectors whose squared norm is not 1.
    pub fn new(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let state = Self::unnormalized(dims, amplitudes)?;
        let n2 = state.amplitudes.norm_squared();
        if (n2 - 1.0).abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("squared norm {n2} is not 1")));
        }
        Ok(Self { normalized: true, ..state })
    }

    /// Builds a state flagged as non-normalized (for intermediate use).
    pub fn unnormalized(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::Shape("subsystem dimensions must be positive".into()));
        }
        let total: usize = dims.iter().product();
        if total != amplitudes.len() {
            return Err(Error::Shape(format!(
                "amplitude length {} does not match product of dims {total}",
                amplitudes.len()
            )));
        }
        if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidState("non-finite amplitude".into()));
        }
        Ok(Self { dims, amplitudes, normalized: false })
    }

    /// Normalizes an arbitrary nonzero vector.
    pub fn normalize(dims: Vec<usize>, amplitudes: CVector) -> Result<Self> {
        let norm = amplitudes.norm();
        if norm < 1e-300 {
            return Err(Error::InvalidState("zero vector".into()));
        }
        Self::new(dims, amplitudes.unscale(norm))
    }

    pub fn basis(dims: Vec<usize>, index: usize) -> Result<Self> {
        let total: usize = dims.iter().product();
        if index >= total {
            return Err(Error::Shape(format!("basis index {index} out of range {total}")));
        }
        let mut v = CVector::zeros(total);
        v[index] = c(1.0, 0.0);
        Self::new(dims, v)
    }

    /// `(1/√d) Σ_k |k⟩|k⟩` on `d ⊗ d`.
    pub fn maximally_entangled(d: usize) -> Self {
        let mut v = CVector::zeros(d * d);
        let amp = 1.0 / (d as f64).sqrt();
        for k in 0..d {
            v[k * d + k] = c(amp, 0.0);
        }
        Self { dims: vec![d, d], amplitudes: v, normalized: true }
    }

    /// `(1/√r) Σ_{k<r} |k⟩|k⟩` on `d1 ⊗ d2` with `r = min(d1, d2)`.
    pub fn maximally_correlated(d1: usize, d2: usize) -> Self {
        let r = d1.min(d2);
        let mut v = CVector::zeros(d1 * d2);
        let amp = 1.0 / (r as f64).sqrt();
        for k in 0..r {
            v[k * d2 + k] = c(amp, 0.0);
        }
        Self { dims: vec![d1, d2], amplitudes: v, normalized: true }
    }

    pub fn random(dims: Vec<usize>, rng: &mut impl Rng) -> Self {
        let total: usize = dims.iter().product();
        let v = random_gaussian_vector(total, rng);
        let norm = v.norm();
        Self { dims, amplitudes: v.unscale(norm), normalized: true }
    }

    /// Tensor product, concatenating subsystem lists.
    pub fn tensor(&self, other: &PureState) -> PureState {
        let mut dims = self.dims.clone();
        dims.extend_from_slice(&other.dims);
        PureState {
            dims,
            amplitudes: kron_vec(&self.amplitudes, &other.amplitudes),
            normalized: self.normalized && other.normalized,
        }
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.amplitudes.len()
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> CVector {
        self.amplitudes
    }

    pub fn is_normalized(&self) -> bool {
        self.normalized
    }

    pub fn conj(&self) -> PureState {
        PureState { amplitudes: self.amplitudes.conjugate(), ..self.clone() }
    }

    pub fn projector(&self) -> CMatrix {
        &self.amplitudes * self.amplitudes.adjoint()
    }

    /// Collapses the subsystem list into a single factor.
    pub fn flattened(&self) -> PureState {
        PureState { dims: vec![self.dim()], ..self.clone() }
    }
}

/// A validated density operator.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator {
    matrix: CMatrix,
}

impl DensityOperator {
    pub fn new(matrix: CMatrix) -> Result<Self> {
        if !matrix.is_square() {
            return Err(Error::Shape(format!("{}x{} is not square", matrix.nrows(), matrix.ncols())));
        }
        if !is_finite(&matrix) {
            return Err(Error::InvalidState("non-finite entry".into()));
        }
        let herm = hermiticity_defect(&matrix);
        if herm > STATE_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = matrix.trace();
        if (tr.re - 1.0).abs() > STATE_TOL || tr.im.abs() > STATE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} is not 1")));
        }
        let min_eig = hermitian_eigenvalues(&matrix).last().copied().unwrap_or(0.0);
        if min_eig < -STATE_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { matrix })
    }

    pub fn from_pure(psi: &PureState) -> Self {
        Self { matrix: psi.projector() }
    }

    pub fn maximally_mixed(d: usize) -> Self {
        Self { matrix: identity(d) * c(1.0 / d as f64, 0.0) }
    }

    pub fn dim(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn spectrum(&self) -> Vec<f64> {
        hermitian_eigenvalues(&self.matrix)
    }

    pub fn tensor(&self, other: &DensityOperator) -> DensityOperator {
        DensityOperator { matrix: kron(&self.matrix, &other.matrix) }
    }

    /// Convex combination `Σ p_j ρ_j`; weights must form a distribution.
    pub fn mixture(weights: &[f64], states: &[DensityOperator]) -> Result<DensityOperator> {
        if weights.len() != states.len() || states.is_empty() {
            return Err(Error::Shape("weights and states differ in length".into()));
        }
        let d = states[0].dim();
        let mut m = CMatrix::zeros(d, d);
        for (p, s) in weights.iter().zip(states) {
            if s.dim() != d {
                return Err(Error::Shape("mixed dimensions in mixture".into()));
            }
            m += s.matrix() * c(*p, 0.0);
        }
        DensityOperator::new(m)
    }
}

/// Von Neumann entropy in bits.
pub fn von_neumann_entropy(rho: &DensityOperator) -> f64 {
    spectrum_entropy(&rho.spectrum())
}

/// Validating variant for raw matrices.
pub fn matrix_entropy(m: &CMatrix) -> Result<f64> {
    DensityOperator::new(m.clone()).map(|rho| von_neumann_entropy(&rho))
}

/// `-Σ λ log₂ λ` over eigenvalues above the cutoff.
pub fn spectrum_entropy(eigs: &[f64]) -> f64 {
    shannon_entropy(eigs)
}

fn strides(dims: &[usize]) -> Vec<usize> {
    let mut s = vec![1; dims.len()];
    for k in (0..dims.len().saturating_sub(1)).rev() {
        s[k] = s[k + 1] * dims[k + 1];
    }
    s
}

/// Splits a flat index into per-subsystem digits.
fn digits(mut idx: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for k in (0..dims.len()).rev() {
        out[k] = idx % dims[k];
        idx /= dims[k];
    }
    out
}

/// Partial trace keeping the subsystems listed in `keep` (in their original order).
pub fn partial_trace(rho: &DensityOperator, dims: &[usize], keep: &[usize]) -> Result<DensityOperator> {
    let total: usize = dims.iter().product();
    if total != rho.dim() {
        return Err(Error::Shape(format!("dims multiply to {total}, operator is {}", rho.dim())));
    }
    let mut keep_sorted = keep.to_vec();
    keep_sorted.sort_unstable();
    keep_sorted.dedup();
    if keep_sorted.is_empty() || keep_sorted.len() >= dims.len() || keep_sorted.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape("keep must be a nonempty proper subset of subsystems".into()));
    }
    let traced: Vec<usize> = (0..dims.len()).filter(|k| !keep_sorted.contains(k)).collect();
    let kdims: Vec<usize> = keep_sorted.iter().map(|&k| dims[k]).collect();
    let tdims: Vec<usize> = traced.iter().map(|&k| dims[k]).collect();
    let kdim: usize = kdims.iter().product();
    let tdim: usize = tdims.iter().product();
    let st = strides(dims);
    let flat = |kd: &[usize], td: &[usize]| -> usize {
        keep_sorted.iter().zip(kd).map(|(&s, &v)| st[s] * v).sum::<usize>()
            + traced.iter().zip(td).map(|(&s, &v)| st[s] * v).sum::<usize>()
    };
    let m = rho.matrix();
    let mut out = CMatrix::zeros(kdim, kdim);
    for i in 0..kdim {
        let di = digits(i, &kdims);
        for j in 0..kdim {
            let dj = digits(j, &kdims);
            let mut acc = C64::new(0.0, 0.0);
            for t in 0..tdim {
                let dt = digits(t, &tdims);
                acc += m[(flat(&di, &dt), flat(&dj, &dt))];
            }
            out[(i, j)] = acc;
        }
    }
    Ok(DensityOperator { matrix: out })
}

/// Reshapes a state into a matrix with rows indexed by `side_a` and columns by
/// the complementary subsystems.
pub fn bipartite_matrix(psi: &PureState, side_a: &[usize]) -> Result<CMatrix> {
    let dims = psi.dims();
    let mut a = side_a.to_vec();
    a.sort_unstable();
    a.dedup();
    if a.is_empty() || a.len() >= dims.len() || a.iter().any(|&k| k >= dims.len()) {
        return Err(Error::Shape("cut must split the subsystems into two nonempty parts".into()));
    }
    let b: Vec<usize> = (0..dims.len()).filter(|k| !a.contains(k)).collect();
    let adims: Vec<usize> = a.iter().map(|&k| dims[k]).collect();
    let bdims: Vec<usize> = b.iter().map(|&k| dims[k]).collect();
    let st = strides(dims);
    let rows: usize = adims.iter().product();
    let cols: usize = bdims.iter().product();
    let mut m = CMatrix::zeros(rows, cols);
    for i in 0..rows {
        let di = digits(i, &adims);
        let base: usize = a.iter().zip(&di).map(|(&s, &v)| st[s] * v).sum();
        for j in 0..cols {
            let dj = digits(j, &bdims);
            let idx = base + b.iter().zip(&dj).map(|(&s, &v)| st[s] * v).sum::<usize>();
            m[(i, j)] = psi.amplitudes()[idx];
        }
    }
    Ok(m)
}

/// Entropy of the reduced state of a (normalized) coefficient matrix, computed
/// from the smaller Gram matrix.
pub fn coefficient_matrix_entropy(m: &CMatrix) -> f64 {
    let gram = if m.nrows() <= m.ncols() { m * m.adjoint() } else { m.adjoint() * m };
    spectrum_entropy(&hermitian_eigenvalues(&gram))
}

/// Entanglement entropy `E(ψ)` across the cut `side_a : rest`.
pub fn entanglement_entropy(psi: &PureState, side_a: &[usize]) -> Result<f64> {
    if (psi.amplitudes().norm_squared() - 1.0).abs() > STATE_TOL {
        return Err(Error::InvalidState("entanglement entropy needs a normalized state".into()));
    }
    let m = bipartite_matrix(psi, side_a)?;
    Ok(coefficient_matrix_entropy(&m))
}

/// Entropies of both marginals, computed independently.
pub fn both_marginal_entropies(psi: &PureState, side_a: &[usize]) -> Result<(f64, f64)> {
    let m = bipartite_matrix(psi, side_a)?;
    let ea = spectrum_entropy(&hermitian_eigenvalues(&(&m * m.adjoint())));
    let eb = spectrum_entropy(&hermitian_eigenvalues(&(m.adjoint() * &m)));
    Ok((ea, eb))
}

pub fn random_gaussian_vector(n: usize, rng: &mut impl Rng) -> CVector {
    CVector::from_fn(n, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)))
}

/// Haar-distributed unitary via QR of a complex Ginibre matrix.
pub fn random_unitary(d: usize, rng: &mut impl Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for k in 0..d {
        let rkk = r[(k, k)];
        let phase = if rkk.norm() > 0.0 { rkk / rkk.norm() } else { c(1.0, 0.0) };
        for i in 0..d {
            q[(i, k)] *= phase;
        }
    }
    q
}

/// Random density operator of full rank (induced measure from a purification).
pub fn random_density(d: usize, rng: &mut impl Rng) -> DensityOperator {
    let g = CMatrix::from_fn(d, d, |_, _| c(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let m = &g * g.adjoint();
    let tr = m.trace().re;
    DensityOperator { matrix: m.unscale(tr) }
}
