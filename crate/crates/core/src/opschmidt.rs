//! Operator Schmidt decomposition of bipartite unitaries.
//!
//! A unitary on `A ⊗ B` is written as `U = Σ_j c_j A_j ⊗ B_j` with
//! `Tr(A_j† A_k) = d_A δ_jk`, `Tr(B_j† B_k) = d_B δ_jk` and `Σ c_j² = 1`.

use crate::error::{Error, Result};
use crate::qcore::{c, frobenius, is_finite, kron, shannon_entropy, unitarity_defect, CMatrix, C64};

/// Default unitarity tolerance (Frobenius norm of `U†U − I`).
pub const UNITARY_TOL: f64 = 1e-10;
/// Default relative rank tolerance on reshuffled singular values.
pub const RANK_TOL: f64 = 1e-9;

/// A unitary on `A ⊗ B`; row `a·d_B + b` is the basis vector `|a⟩_A|b⟩_B` (0-based).
#[derive(Debug, Clone, PartialEq)]
pub struct BipartiteUnitary {
    da: usize,
    db: usize,
    matrix: CMatrix,
}

impl BipartiteUnitary {
    pub fn new(da: usize, db: usize, matrix: CMatrix) -> Result<Self> {
        Self::with_tolerance(da, db, matrix, UNITARY_TOL)
    }

    pub fn with_tolerance(da: usize, db: usize, matrix: CMatrix, tol: f64) -> Result<Self> {
        if da == 0 || db == 0 {
            return Err(Error::Shape("local dimensions must be positive".into()));
        }
        let n = da * db;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::Shape(format!(
                "matrix is {}x{}, cut {da}x{db} needs {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        if !is_finite(&matrix) {
            return Err(Error::InvalidUnitary("non-finite entry".into()));
        }
        let defect = unitarity_defect(&matrix);
        if defect > tol {
            return Err(Error::InvalidUnitary(format!("‖U†U − I‖_F = {defect:.3e} exceeds {tol:.1e}")));
        }
        Ok(Self { da, db, matrix })
    }

    /// `A ⊗ B` for local unitaries.
    pub fn product(a: &CMatrix, b: &CMatrix) -> Result<Self> {
        Self::new(a.nrows(), b.nrows(), kron(a, b))
    }

    pub fn identity(da: usize, db: usize) -> Self {
        Self { da, db, matrix: CMatrix::identity(da * db, da * db) }
    }

    pub fn da(&self) -> usize {
        self.da
    }

    pub fn db(&self) -> usize {
        self.db
    }

    pub fn dim(&self) -> usize {
        self.da * self.db
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix {
        self.matrix
    }

    pub fn entry(&self, a: usize, b: usize, a2: usize, b2: usize) -> C64 {
        self.matrix[(a * self.db + b, a2 * self.db + b2)]
    }

    /// The `d_B × d_B` block `⟨j|_A U |k⟩_A`.
    pub fn block(&self, j: usize, k: usize) -> CMatrix {
        self.matrix.view((j * self.db, k * self.db), (self.db, self.db)).into_owned()
    }

    pub fn adjoint(&self) -> Self {
        Self { da: self.da, db: self.db, matrix: self.matrix.adjoint() }
    }

    pub fn conjugate(&self) -> Self {
        Self { da: self.da, db: self.db, matrix: self.matrix.conjugate() }
    }

    pub fn transpose(&self) -> Self {
        Self { da: self.da, db: self.db, matrix: self.matrix.transpose() }
    }

    /// Same operator with the roles of `A` and `B` exchanged.
    pub fn swap_parties(&self) -> Self {
        let (da, db) = (self.da, self.db);
        let m = CMatrix::from_fn(da * db, da * db, |r, col| {
            let (b, a) = (r / da, r % da);
            let (b2, a2) = (col / da, col % da);
            self.matrix[(a * db + b, a2 * db + b2)]
        });
        Self { da: db, db: da, matrix: m }
    }

    /// `(la ⊗ lb) U (ra ⊗ rb)`.
    pub fn local_sandwich(&self, la: &CMatrix, lb: &CMatrix, ra: &CMatrix, rb: &CMatrix) -> Result<Self> {
        let m = kron(la, lb) * &self.matrix * kron(ra, rb);
        Self::with_tolerance(self.da, self.db, m, 1e-8)
    }

    /// Tensor product `U ⊗ V` with the cut `(A_U A_V) : (B_U B_V)`.
    pub fn tensor(&self, other: &BipartiteUnitary) -> Self {
        let (da1, db1, da2, db2) = (self.da, self.db, other.da, other.db);
        let da = da1 * da2;
        let db = db1 * db2;
        let idx = |a1: usize, a2: usize, b1: usize, b2: usize| (a1 * da2 + a2) * db + b1 * db2 + b2;
        let mut m = CMatrix::zeros(da * db, da * db);
        for r1 in 0..da1 * db1 {
            for c1 in 0..da1 * db1 {
                let x = self.matrix[(r1, c1)];
                if x == c(0.0, 0.0) {
                    continue;
                }
                for r2 in 0..da2 * db2 {
                    for c2 in 0..da2 * db2 {
                        let row = idx(r1 / db1, r2 / db2, r1 % db1, r2 % db2);
                        let col = idx(c1 / db1, c2 / db2, c1 % db1, c2 % db2);
                        m[(row, col)] = x * other.matrix[(r2, c2)];
                    }
                }
            }
        }
        Self { da, db, matrix: m }
    }
}

/// Standard-form operator Schmidt decomposition.
#[derive(Debug, Clone, PartialEq)]
pub struct OperatorSchmidt {
    pub da: usize,
    pub db: usize,
    pub coefficients: Vec<f64>,
    pub a_ops: Vec<CMatrix>,
    pub b_ops: Vec<CMatrix>,
}

impl OperatorSchmidt {
    pub fn rank(&self) -> usize {
        self.coefficients.len()
    }

    /// `Σ c_j A_j ⊗ B_j`.
    pub fn reconstruct(&self) -> CMatrix {
        let n = self.da * self.db;
        let mut m = CMatrix::zeros(n, n);
        for ((cj, a), b) in self.coefficients.iter().zip(&self.a_ops).zip(&self.b_ops) {
            m += kron(a, b) * c(*cj, 0.0);
        }
        m
    }

    /// Largest deviation of `(1/d) Tr(X_j† X_k)` from `δ_jk` over both operator lists.
    pub fn orthonormality_defect(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for (ops, d) in [(&self.a_ops, self.da), (&self.b_ops, self.db)] {
            for (j, x) in ops.iter().enumerate() {
                for (k, y) in ops.iter().enumerate() {
                    let g = crate::qcore::hs_inner(x, y) / d as f64;
                    let target = if j == k { 1.0 } else { 0.0 };
                    worst = worst.max((g - c(target, 0.0)).norm());
                }
            }
        }
        worst
    }
}

/// Rearranges `⟨a,b|M|a',b'⟩` into the `d_A² × d_B²` matrix with row `(a,a')`, column `(b,b')`.
pub fn reshuffle(m: &CMatrix, da: usize, db: usize) -> CMatrix {
    CMatrix::from_fn(da * da, db * db, |r, col| {
        let (a, a2) = (r / da, r % da);
        let (b, b2) = (col / db, col % db);
        m[(a * db + b, a2 * db + b2)]
    })
}

/// Singular values of the reshuffled matrix, descending.
pub fn reshuffled_singular_values(m: &CMatrix, da: usize, db: usize) -> Vec<f64> {
    let mut s: Vec<f64> = reshuffle(m, da, db).singular_values().iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn operator_schmidt_decompose(u: &BipartiteUnitary, rank_tol: f64) -> Result<OperatorSchmidt> {
    decompose_matrix(u.matrix(), u.da(), u.db(), rank_tol)
}

/// Decomposition of an arbitrary operator (coefficients are then not normalized).
pub fn decompose_matrix(m: &CMatrix, da: usize, db: usize, rank_tol: f64) -> Result<OperatorSchmidt> {
    let r = reshuffle(m, da, db);
    let svd = r.svd(true, true);
    let (Some(uu), Some(vt)) = (svd.u, svd.v_t) else {
        return Err(Error::Numerical("singular value decomposition failed".into()));
    };
    let mut order: Vec<usize> = (0..svd.singular_values.len()).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));
    let smax = order.first().map(|&k| svd.singular_values[k]).unwrap_or(0.0);
    let norm = ((da * db) as f64).sqrt();
    let (sa, sb) = ((da as f64).sqrt(), (db as f64).sqrt());
    let mut out = OperatorSchmidt { da, db, coefficients: vec![], a_ops: vec![], b_ops: vec![] };
    for k in order {
        let s = svd.singular_values[k];
        if s <= rank_tol * smax || s == 0.0 {
            continue;
        }
        out.coefficients.push(s / norm);
        out.a_ops.push(CMatrix::from_fn(da, da, |i, j| uu[(i * da + j, k)] * sa));
        out.b_ops.push(CMatrix::from_fn(db, db, |i, j| vt[(k, i * db + j)] * sb));
    }
    Ok(out)
}

pub fn schmidt_rank(u: &BipartiteUnitary) -> usize {
    schmidt_rank_of(u.matrix(), u.da(), u.db(), RANK_TOL)
}

pub fn schmidt_rank_of(m: &CMatrix, da: usize, db: usize, rank_tol: f64) -> usize {
    let s = reshuffled_singular_values(m, da, db);
    let smax = s.first().copied().unwrap_or(0.0);
    s.iter().filter(|&&x| x > rank_tol * smax && x > 0.0).count()
}

/// `K_Sch = −Σ c_j² log₂ c_j²`.
pub fn schmidt_strength(dec: &OperatorSchmidt) -> f64 {
    let p: Vec<f64> = dec.coefficients.iter().map(|x| x * x).collect();
    shannon_entropy(&p)
}

/// Convenience: Schmidt strength straight from the unitary.
pub fn schmidt_strength_of(u: &BipartiteUnitary) -> f64 {
    let n = (u.dim()) as f64;
    let p: Vec<f64> = reshuffled_singular_values(u.matrix(), u.da(), u.db())
        .iter()
        .map(|s| s * s / n)
        .collect();
    shannon_entropy(&p)
}

/// `‖U − Σ c_j A_j ⊗ B_j‖_F`.
pub fn reconstruction_error(u: &BipartiteUnitary, dec: &OperatorSchmidt) -> f64 {
    frobenius(&(u.matrix() - dec.reconstruct()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_unitary;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn perm(n: usize, images: &[usize]) -> CMatrix {
        let mut m = CMatrix::zeros(n, n);
        for (col, &row) in images.iter().enumerate() {
            m[(row, col)] = c(1.0, 0.0);
        }
        m
    }

    fn cnot() -> BipartiteUnitary {
        BipartiteUnitary::new(2, 2, perm(4, &[0, 1, 3, 2])).unwrap()
    }

    fn swap() -> BipartiteUnitary {
        BipartiteUnitary::new(2, 2, perm(4, &[0, 2, 1, 3])).unwrap()
    }

    #[test]
    fn identity_rank_one() {
        let d = operator_schmidt_decompose(&BipartiteUnitary::identity(2, 3), RANK_TOL).unwrap();
        assert_eq!(d.rank(), 1);
        assert!((d.coefficients[0] - 1.0).abs() < 1e-12);
        assert!(schmidt_strength(&d).abs() < 1e-12);
    }

    #[test]
    fn cnot_and_swap() {
        let d = operator_schmidt_decompose(&cnot(), RANK_TOL).unwrap();
        assert_eq!(d.rank(), 2);
        for x in &d.coefficients {
            assert!((x - 0.5f64.sqrt()).abs() < 1e-12);
        }
        assert!((schmidt_strength(&d) - 1.0).abs() < 1e-12);
        let s = operator_schmidt_decompose(&swap(), RANK_TOL).unwrap();
        assert_eq!(s.rank(), 4);
        for x in &s.coefficients {
            assert!((x - 0.5).abs() < 1e-12);
        }
        assert!(reconstruction_error(&swap(), &s) < 1e-12);
        assert!(s.orthonormality_defect() < 1e-12);
    }

    #[test]
    fn swap_d3_strength() {
        let images: Vec<usize> = (0..9).map(|k| (k % 3) * 3 + k / 3).collect();
        let u = BipartiteUnitary::new(3, 3, perm(9, &images)).unwrap();
        let d = operator_schmidt_decompose(&u, RANK_TOL).unwrap();
        assert_eq!(d.rank(), 9);
        assert!((schmidt_strength(&d) - 2.0 * 3f64.log2()).abs() < 1e-12);
    }

    #[test]
    fn non_unitary_rejected() {
        let m = CMatrix::from_element(4, 4, c(0.5, 0.0));
        assert!(matches!(BipartiteUnitary::new(2, 2, m), Err(Error::InvalidUnitary(_))));
    }

    #[test]
    fn random_reconstruction() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (da, db) in [(2, 2), (2, 3), (3, 2), (3, 3)] {
            let u = BipartiteUnitary::new(da, db, random_unitary(da * db, &mut rng)).unwrap();
            let d = operator_schmidt_decompose(&u, RANK_TOL).unwrap();
            assert!(reconstruction_error(&u, &d) < 1e-10);
            assert!(d.orthonormality_defect() < 1e-9);
            let total: f64 = d.coefficients.iter().map(|x| x * x).sum();
            assert!((total - 1.0).abs() < 1e-10);
            assert!((schmidt_strength(&d) - schmidt_strength_of(&u)).abs() < 1e-12);
        }
    }

    #[test]
    fn swap_parties_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let u = BipartiteUnitary::new(2, 3, random_unitary(6, &mut rng)).unwrap();
        let back = u.swap_parties().swap_parties();
        assert_eq!(back, u);
        let a = operator_schmidt_decompose(&u, RANK_TOL).unwrap();
        let b = operator_schmidt_decompose(&u.swap_parties(), RANK_TOL).unwrap();
        for (x, y) in a.coefficients.iter().zip(&b.coefficients) {
            assert!((x - y).abs() < 1e-10);
        }
    }
}
