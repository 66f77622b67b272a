//! Generalized Pauli words and the Clifford conjugation test.

use std::f64::consts::TAU;

use crate::error::{Error, Result};
use crate::opschmidt::BipartiteUnitary;
use crate::qcore::{c, cis, hs_inner, identity, kron, CMatrix};

/// Cyclic shift `X|k⟩ = |k+1 mod d⟩`.
pub fn shift(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[((k + 1) % d, k)] = c(1.0, 0.0);
    }
    m
}

/// Clock `Z|k⟩ = ω^k |k⟩` with `ω = e^{2πi/d}`.
pub fn clock(d: usize) -> CMatrix {
    let mut m = CMatrix::zeros(d, d);
    for k in 0..d {
        m[(k, k)] = cis(TAU * k as f64 / d as f64);
    }
    m
}

pub fn matrix_power(m: &CMatrix, e: usize) -> CMatrix {
    let mut out = identity(m.nrows());
    for _ in 0..e {
        out = &out * m;
    }
    out
}

/// `X^a Z^b` on a single qudit.
pub fn word(d: usize, a: usize, b: usize) -> CMatrix {
    matrix_power(&shift(d), a % d) * matrix_power(&clock(d), b % d)
}

/// All `d²` single-qudit words, ordered by `a·d + b`.
pub fn all_words(d: usize) -> Vec<CMatrix> {
    (0..d * d).map(|k| word(d, k / d, k % d)).collect()
}

/// Identity, σx, σy, σz.
pub fn sigma(k: usize) -> CMatrix {
    let (o, z, i) = (c(1.0, 0.0), c(0.0, 0.0), c(0.0, 1.0));
    match k {
        0 => CMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        1 => CMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        2 => CMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        3 => CMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => panic!("Pauli index {k} out of range"),
    }
}

/// Multi-qudit word `⊗_i X^{a_i} Z^{b_i}`.
pub fn multi_word(d: usize, xs: &[usize], zs: &[usize]) -> CMatrix {
    let mut out = CMatrix::identity(1, 1);
    for (a, b) in xs.iter().zip(zs) {
        out = kron(&out, &word(d, *a, *b));
    }
    out
}

/// Smallest `d ≥ 2` such that every entry of `dims` is a power of `d`.
pub fn infer_local_dimension(dims: &[usize]) -> Option<usize> {
    let max = dims.iter().copied().max()?;
    (2..=max.max(2)).find(|&d| dims.iter().all(|&n| log_exact(n, d).is_some()))
}

/// `Some(k)` when `n = d^k`.
pub fn log_exact(n: usize, d: usize) -> Option<usize> {
    if n == 0 || d < 2 {
        return None;
    }
    let (mut k, mut acc) = (0, 1usize);
    while acc < n {
        acc *= d;
        k += 1;
    }
    (acc == n).then_some(k)
}

/// Clifford test on `n` qudits of dimension `d` for a `d^n × d^n` unitary.
pub fn clifford_check_matrix(u: &CMatrix, d: usize) -> Result<bool> {
    let dim = u.nrows();
    let n = log_exact(dim, d).ok_or_else(|| Error::Shape(format!("dimension {dim} is not a power of {d}")))?;
    let total = d.pow(n as u32);
    let digits = |mut idx: usize| -> Vec<usize> {
        let mut v = vec![0; n];
        for slot in v.iter_mut().rev() {
            *slot = idx % d;
            idx /= d;
        }
        v
    };
    let words: Vec<CMatrix> = (0..total * total)
        .map(|k| multi_word(d, &digits(k / total), &digits(k % total)))
        .collect();
    let ud = u.adjoint();
    for qudit in 0..n {
        for is_z in [false, true] {
            let mut xs = vec![0; n];
            let mut zs = vec![0; n];
            if is_z {
                zs[qudit] = 1;
            } else {
                xs[qudit] = 1;
            }
            let g = multi_word(d, &xs, &zs);
            let conj = u * g * &ud;
            let unit = words
                .iter()
                .filter(|w| ((hs_inner(w, &conj) / total as f64).norm() - 1.0).abs() < 1e-9)
                .count();
            if unit != 1 {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Clifford test for a bipartite gate; the qudit dimension is inferred from the
/// cut unless given.
pub fn clifford_check(u: &BipartiteUnitary, d: Option<usize>) -> Result<bool> {
    let d = match d {
        Some(d) => d,
        None => infer_local_dimension(&[u.da(), u.db()])
            .ok_or_else(|| Error::Shape(format!("{}x{} is not a qudit register", u.da(), u.db())))?,
    };
    for n in [u.da(), u.db()] {
        if log_exact(n, d).is_none() {
            return Err(Error::Shape(format!("local dimension {n} is not a power of {d}")));
        }
    }
    clifford_check_matrix(u.matrix(), d)
}
