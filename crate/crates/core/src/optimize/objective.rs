//! Entropy objectives and their analytic Wirtinger gradients.
//!
//! States on `A R_A ⊗ B R_B` are handled as coefficient matrices with rows
//! `(a, r_A)` and columns `(b, r_B)`; the flat amplitude index
//! `((a·d_RA + r_A)·d_B + b)·d_RB + r_B` is the row-major order of that matrix.
//! Real parameter vectors interleave real and imaginary parts.

use crate::qcore::{c, hermitian_eigen, CMatrix, CVector, C64, ENTROPY_CUTOFF};

const INV_LN2: f64 = std::f64::consts::LOG2_E;

/// Subsystem dimensions `(d_A, d_RA, d_B, d_RB)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Layout {
    pub da: usize,
    pub dra: usize,
    pub db: usize,
    pub drb: usize,
}

impl Layout {
    pub fn rows(&self) -> usize {
        self.da * self.dra
    }

    pub fn cols(&self) -> usize {
        self.db * self.drb
    }

    pub fn dims(&self) -> Vec<usize> {
        vec![self.da, self.dra, self.db, self.drb]
    }
}

pub fn unpack(x: &[f64]) -> Vec<C64> {
    x.chunks_exact(2).map(|p| c(p[0], p[1])).collect()
}

pub fn pack(z: &[C64]) -> Vec<f64> {
    z.iter().flat_map(|v| [v.re, v.im]).collect()
}

/// Rescales `x` to unit norm if it drifted outside `[0.5, 2]`.
pub fn renorm_block(x: &mut [f64]) -> bool {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if (0.5..=2.0).contains(&n) || n == 0.0 {
        return false;
    }
    for v in x.iter_mut() {
        *v /= n;
    }
    true
}

/// Entropy of `M M† / ‖M‖²` (in bits) and its gradient with respect to `M*`.
pub fn entropy_and_grad(m: &CMatrix) -> (f64, CMatrix) {
    if m.nrows() > m.ncols() {
        let (s, g) = entropy_and_grad(&m.adjoint());
        return (s, g.adjoint());
    }
    let t = m.norm_squared();
    let rho = (m * m.adjoint()).unscale(t);
    let (vals, vecs) = hermitian_eigen(&rho);
    let mut s = 0.0;
    let mut trace_g = 0.0;
    let mut gm = CMatrix::zeros(m.nrows(), m.ncols());
    for (k, &lam) in vals.iter().enumerate() {
        if lam <= ENTROPY_CUTOFF {
            continue;
        }
        let gk = -lam.log2() - INV_LN2;
        s -= lam * lam.log2();
        trace_g += lam * gk;
        let u = vecs.column(k);
        let proj = u.adjoint() * m;
        gm += (u * proj) * c(gk, 0.0);
    }
    let grad = (gm - m * c(trace_g, 0.0)).unscale(t);
    (s, grad)
}

/// Entropy only (no gradient), same conventions.
pub fn entropy_of(m: &CMatrix) -> f64 {
    crate::qcore::coefficient_matrix_entropy(&m.unscale(m.norm()))
}

/// Coefficient matrix (rows `(a,r_A)`, cols `(b,r_B)`) to gate form
/// (rows `(a,b)`, cols `(r_A,r_B)`).
pub fn to_gate_form(psi: &CMatrix, l: &Layout) -> CMatrix {
    CMatrix::from_fn(l.da * l.db, l.dra * l.drb, |row, col| {
        let (a, b) = (row / l.db, row % l.db);
        let (ra, rb) = (col / l.drb, col % l.drb);
        psi[(a * l.dra + ra, b * l.drb + rb)]
    })
}

pub fn from_gate_form(y: &CMatrix, l: &Layout) -> CMatrix {
    CMatrix::from_fn(l.rows(), l.cols(), |row, col| {
        let (a, ra) = (row / l.dra, row % l.dra);
        let (b, rb) = (col / l.drb, col % l.drb);
        y[(a * l.db + b, ra * l.drb + rb)]
    })
}

pub fn coefficient_matrix(amps: &[C64], l: &Layout) -> CMatrix {
    CMatrix::from_row_slice(l.rows(), l.cols(), amps)
}

pub fn flatten(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.transpose().iter().copied())
}

/// Output coefficient matrix of `(U ⊗ I)(α ⊗ β)` with `α` a `d_A × d_RA` and
/// `β` a `d_B × d_RB` amplitude matrix.
pub fn product_output(u: &CMatrix, a: &CMatrix, b: &CMatrix, l: &Layout) -> CMatrix {
    from_gate_form(&(u * a.kronecker(b)), l)
}

/// `E(U(α⊗β))` and its gradient with respect to the packed `[α; β]` parameters.
pub struct ProductObjective<'a> {
    pub u: &'a CMatrix,
    pub layout: Layout,
}

impl ProductObjective<'_> {
    pub fn split(&self) -> usize {
        2 * self.layout.da * self.layout.dra
    }

    pub fn matrices(&self, x: &[f64]) -> (CMatrix, CMatrix) {
        let l = &self.layout;
        let z = unpack(x);
        let na = l.da * l.dra;
        let a = CMatrix::from_row_slice(l.da, l.dra, &z[..na]);
        let b = CMatrix::from_row_slice(l.db, l.drb, &z[na..]);
        (a, b)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let (a, b) = self.matrices(x);
        entropy_of(&product_output(self.u, &a, &b, &self.layout))
    }

    pub fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let l = &self.layout;
        let (a, b) = self.matrices(x);
        let out = product_output(self.u, &a, &b, l);
        let (s, gout) = entropy_and_grad(&out);
        let gx = self.u.adjoint() * to_gate_form(&gout, l);
        let mut ga = CMatrix::zeros(l.da, l.dra);
        let mut gb = CMatrix::zeros(l.db, l.drb);
        for i in 0..l.da {
            for j in 0..l.db {
                for ra in 0..l.dra {
                    for rb in 0..l.drb {
                        let h = gx[(i * l.db + j, ra * l.drb + rb)];
                        ga[(i, ra)] += h * b[(j, rb)].conj();
                        gb[(j, rb)] += h * a[(i, ra)].conj();
                    }
                }
            }
        }
        let mut grad: Vec<f64> = Vec::with_capacity(x.len());
        for z in ga.transpose().iter().chain(gb.transpose().iter()) {
            grad.push(2.0 * z.re);
            grad.push(2.0 * z.im);
        }
        (s, grad)
    }

    pub fn renorm(&self, x: &mut [f64]) -> bool {
        let k = self.split();
        let (xa, xb) = x.split_at_mut(k);
        let ra = renorm_block(xa);
        let rb = renorm_block(xb);
        ra || rb
    }
}

/// `E(Uψ) − E(ψ)` over joint states `ψ` on `A R_A ⊗ B R_B`.
pub struct DeltaObjective<'a> {
    pub u: &'a CMatrix,
    pub layout: Layout,
}

impl DeltaObjective<'_> {
    pub fn output(&self, psi: &CMatrix) -> CMatrix {
        from_gate_form(&(self.u * to_gate_form(psi, &self.layout)), &self.layout)
    }

    pub fn value(&self, x: &[f64]) -> f64 {
        let psi = coefficient_matrix(&unpack(x), &self.layout);
        entropy_of(&self.output(&psi)) - entropy_of(&psi)
    }

    pub fn value_and_grad(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let l = &self.layout;
        let psi = coefficient_matrix(&unpack(x), l);
        let out = self.output(&psi);
        let (s1, g1) = entropy_and_grad(&out);
        let (s0, g0) = entropy_and_grad(&psi);
        let back = from_gate_form(&(self.u.adjoint() * to_gate_form(&g1, l)), l);
        let total = back - g0;
        let grad = total.transpose().iter().flat_map(|z| [2.0 * z.re, 2.0 * z.im]).collect();
        (s1 - s0, grad)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_unitary;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn finite_diff<F: Fn(&[f64]) -> f64>(f: F, x: &[f64]) -> Vec<f64> {
        let h = 1e-6;
        (0..x.len())
            .map(|i| {
                let mut xp = x.to_vec();
                let mut xm = x.to_vec();
                xp[i] += h;
                xm[i] -= h;
                (f(&xp) - f(&xm)) / (2.0 * h)
            })
            .collect()
    }

    #[test]
    fn product_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let l = Layout { da: 2, dra: 2, db: 3, drb: 2 };
        let u = random_unitary(6, &mut rng);
        let obj = ProductObjective { u: &u, layout: l };
        let x: Vec<f64> = (0..2 * (4 + 6)).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (v, g) = obj.value_and_grad(&x);
        assert!((v - obj.value(&x)).abs() < 1e-12);
        let fd = finite_diff(|y| obj.value(y), &x);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn delta_gradient_matches_finite_difference() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let l = Layout { da: 2, dra: 2, db: 2, drb: 1 };
        let u = random_unitary(4, &mut rng);
        let obj = DeltaObjective { u: &u, layout: l };
        let x: Vec<f64> = (0..2 * 8).map(|_| rng.random_range(-1.0..1.0)).collect();
        let (v, g) = obj.value_and_grad(&x);
        assert!((v - obj.value(&x)).abs() < 1e-12);
        let fd = finite_diff(|y| obj.value(y), &x);
        for (a, b) in g.iter().zip(&fd) {
            assert!((a - b).abs() < 1e-5, "{a} vs {b}");
        }
    }

    #[test]
    fn gate_form_round_trip() {
        let l = Layout { da: 2, dra: 3, db: 2, drb: 2 };
        let m = CMatrix::from_fn(6, 4, |i, j| c(i as f64, j as f64));
        assert_eq!(from_gate_form(&to_gate_form(&m, &l), &l), m);
    }
}
