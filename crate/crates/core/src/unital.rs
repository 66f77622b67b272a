//! Kraus families that map every state to a multiple of the identity, phase
//! averaging onto the diagonal, and Heisenberg-Weyl fiducial states.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::pauli::{all_words, word};
use crate::gates::{build, GateSpec};
use crate::optimize::lbfgs::{minimize, LbfgsOptions};
use crate::optimize::objective::{pack, renorm_block, unpack};
use crate::optimize::{entangling_power, output_entanglement, PowerOptions};
use crate::parallel::map_indexed;
use crate::qcore::{c, cis, identity, kron, random_gaussian_vector, CMatrix, CVector, PureState, C64};

pub const DEFAULT_SAMPLES: usize = 64;

#[derive(Debug, Clone)]
pub struct KrausFamily {
    pub d: usize,
    pub operators: Vec<CMatrix>,
    pub weight: Option<CMatrix>,
}

impl KrausFamily {
    pub fn new(d: usize, operators: Vec<CMatrix>, weight: Option<CMatrix>) -> Result<Self> {
        if operators.len() != d * d {
            return Err(Error::Shape(format!("need {} operators, got {}", d * d, operators.len())));
        }
        if operators.iter().any(|k| k.nrows() != d || k.ncols() != d) {
            return Err(Error::Shape(format!("operators must be {d}×{d}")));
        }
        if weight.as_ref().is_some_and(|r| r.nrows() != d || r.ncols() != d) {
            return Err(Error::Shape(format!("weight must be {d}×{d}")));
        }
        Ok(Self { d, operators, weight })
    }

    /// `{X^a Z^b / √d}`.
    pub fn heisenberg_weyl(d: usize) -> Self {
        let s = c(1.0 / (d as f64).sqrt(), 0.0);
        Self { d, operators: all_words(d).into_iter().map(|w| w * s).collect(), weight: None }
    }

    /// `{P_i U_k / √d}` with cyclic shifts `P_i` and clock phases `U_k`.
    pub fn shift_clock(d: usize) -> Self {
        let s = c(1.0 / (d as f64).sqrt(), 0.0);
        let mut ops = Vec::with_capacity(d * d);
        for i in 0..d {
            for k in 0..d {
                ops.push(word(d, i, 0) * word(d, 0, k) * s);
            }
        }
        Self { d, operators: ops, weight: None }
    }

    fn weight_matrix(&self) -> CMatrix {
        self.weight.clone().unwrap_or_else(|| identity(self.d))
    }

    /// `Σ_j K_j† X K_j`.
    pub fn apply_dual(&self, x: &CMatrix) -> CMatrix {
        self.operators.iter().map(|k| k.adjoint() * x * k).fold(CMatrix::zeros(self.d, self.d), |a, b| a + b)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UnitalReport {
    /// `max_{ij} |Tr K_i† R⁻¹ K_j − δ_ij|`.
    pub gram_deviation: f64,
    /// Largest `‖Σ K_j† X K_j − Tr(RX) I‖_F` over sampled pure `X`.
    pub pure_state_deviation: f64,
    /// Same quantity with `X = Tr_A Y` for sampled pure product `Y` on `C^{d²} ⊗ C^d`.
    pub product_state_deviation: f64,
    /// `‖Tr_A[(Σ|j⟩⟨j|⊗K_j†) Y (Σ|j⟩⟨j|⊗K_j)] − Tr(R Tr_A Y) I‖_F`, taken literally.
    pub block_diagonal_deviation: f64,
    pub samples: usize,
    pub gram_holds: bool,
    pub pure_holds: bool,
    pub product_holds: bool,
}

impl UnitalReport {
    /// The Gram condition and the sampled channel conditions agree.
    pub fn equivalence_confirmed(&self) -> bool {
        self.gram_holds == self.pure_holds && self.pure_holds == self.product_holds
    }
}

/// Evaluates the Gram condition exactly and the channel conditions on
/// `samples` seeded random inputs.
pub fn unital_equivalence_check(fam: &KrausFamily, samples: usize, seed: u64) -> Result<UnitalReport> {
    let d = fam.d;
    let r = fam.weight_matrix();
    let rinv = r.clone().try_inverse().ok_or_else(|| Error::Precondition("weight operator is singular".into()))?;
    let mut gram_deviation: f64 = 0.0;
    for (i, ki) in fam.operators.iter().enumerate() {
        for (j, kj) in fam.operators.iter().enumerate() {
            let g = (ki.adjoint() * &rinv * kj).trace();
            let delta = if i == j { 1.0 } else { 0.0 };
            gram_deviation = gram_deviation.max((g - c(delta, 0.0)).norm());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let id = identity(d);
    let deviation = |x: &CMatrix| (fam.apply_dual(x) - &id * (&r * x).trace()).norm();
    let mut pure: f64 = 0.0;
    let mut product: f64 = 0.0;
    let mut literal: f64 = 0.0;
    for _ in 0..samples {
        let psi = PureState::random(vec![d], &mut rng);
        pure = pure.max(deviation(&psi.projector()));
        let mu = PureState::random(vec![d * d], &mut rng);
        let nu = PureState::random(vec![d], &mut rng);
        // Tr_A of the product |μ⟩⟨μ| ⊗ |ν⟩⟨ν| is |ν⟩⟨ν|
        let x = nu.projector();
        product = product.max(deviation(&x));
        let mut lhs = CMatrix::zeros(d, d);
        for (j, k) in fam.operators.iter().enumerate() {
            lhs += k.adjoint() * &x * k * c(mu.amplitudes()[j].norm_sqr(), 0.0);
        }
        literal = literal.max((lhs - &id * (&r * &x).trace()).norm());
    }
    Ok(UnitalReport {
        gram_deviation,
        pure_state_deviation: pure,
        product_state_deviation: product,
        block_diagonal_deviation: literal,
        samples,
        gram_holds: gram_deviation < 1e-9,
        pure_holds: pure < 1e-8,
        product_holds: product < 1e-8,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum PhaseFamily {
    /// `diag(1, ω^k, …, ω^{k(d−1)})`, `k < d`.
    RootsOfUnity,
    /// All `2^d` sign patterns.
    Signs,
}

pub fn phase_family(d: usize, family: PhaseFamily) -> Vec<CMatrix> {
    match family {
        PhaseFamily::RootsOfUnity => (0..d)
            .map(|k| {
                let v: Vec<C64> = (0..d).map(|j| cis(std::f64::consts::TAU * (k * j) as f64 / d as f64)).collect();
                CMatrix::from_diagonal(&CVector::from_vec(v))
            })
            .collect(),
        PhaseFamily::Signs => (0..1usize << d)
            .map(|k| {
                let v: Vec<C64> = (0..d).map(|j| c(if k >> j & 1 == 1 { -1.0 } else { 1.0 }, 0.0)).collect();
                CMatrix::from_diagonal(&CVector::from_vec(v))
            })
            .collect(),
    }
}

/// `(1/r) Σ_k U_k X U_k†`.
pub fn phase_average(x: &CMatrix, family: PhaseFamily) -> Result<CMatrix> {
    if x.nrows() != x.ncols() {
        return Err(Error::Shape(format!("matrix is {}×{}, must be square", x.nrows(), x.ncols())));
    }
    if family == PhaseFamily::Signs && x.nrows() > 20 {
        return Err(Error::Shape("sign family limited to d ≤ 20".into()));
    }
    let us = phase_family(x.nrows(), family);
    let r = us.len() as f64;
    Ok(us.iter().map(|u| u * x * u.adjoint()).fold(CMatrix::zeros(x.nrows(), x.ncols()), |a, b| a + b) / c(r, 0.0))
}

/// `max_{(a,b)≠(0,0)} ||⟨φ|X^aZ^b|φ⟩| − 1/√(d+1)|`.
pub fn fiducial_residual(phi: &PureState) -> f64 {
    let d = phi.dim();
    let t = 1.0 / ((d + 1) as f64).sqrt();
    let v = phi.amplitudes();
    all_words(d)
        .iter()
        .skip(1)
        .map(|w| (v.dotc(&(w * v)).norm() - t).abs())
        .fold(0.0, f64::max)
}

fn fiducial_objective(words: &[CMatrix], x: &[f64]) -> (f64, Vec<f64>) {
    let z = CVector::from_vec(unpack(x));
    let n = z.norm_squared();
    let d = z.len();
    let t = 1.0 / (d as f64 + 1.0);
    let mut f = 0.0;
    let mut g = CVector::zeros(d);
    for w in words {
        let wz = w * &z;
        let wdz = w.adjoint() * &z;
        let gj = z.dotc(&wz) / c(n, 0.0);
        let m2 = gj.norm_sqr();
        let e = m2 - t;
        f += e * e;
        // ∂|g|²/∂z* = [g*(Wz − g z) + g(W†z − g* z)] / n
        let dm = ((&wz - &z * gj) * gj.conj() + (&wdz - &z * gj.conj()) * gj) / c(n, 0.0);
        g += dm * c(2.0 * e, 0.0);
    }
    (f, g.iter().flat_map(|v| [2.0 * v.re, 2.0 * v.im]).collect())
}

/// Multi-start search for a Heisenberg-Weyl fiducial state in `d ∈ {2, 3}`.
pub fn fiducial_search(d: usize, seed: u64, restarts: usize) -> Result<PureState> {
    if !(2..=3).contains(&d) {
        return Err(Error::Precondition(format!("fiducial search supports d = 2, 3, got {d}")));
    }
    let words: Vec<CMatrix> = all_words(d).into_iter().skip(1).collect();
    let opts = LbfgsOptions { max_evals: 20_000, f_tol: 0.0, g_tol: 1e-15, stall_iters: 5, ..Default::default() };
    let results = map_indexed(restarts.max(1), true, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
        let x0 = pack(random_gaussian_vector(d, &mut rng).as_slice());
        let r = minimize(|x| fiducial_objective(&words, x), x0, &opts, renorm_block);
        let phi = PureState::normalize(vec![d], CVector::from_vec(unpack(&r.x))).ok();
        phi.map(|p| (fiducial_residual(&p), p))
    });
    let mut best: Option<(f64, PureState)> = None;
    for (res, p) in results.into_iter().flatten() {
        if best.as_ref().is_none_or(|b| res < b.0) {
            best = Some((res, p));
        }
    }
    match best {
        Some((res, p)) if res < 1e-8 => Ok(p),
        Some((res, _)) => Err(Error::SearchFailed(format!("best fiducial residual {res:e} after {restarts} restarts"))),
        None => Err(Error::SearchFailed("no restart produced a state".into())),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SicReport {
    pub d: usize,
    pub fiducial: PureState,
    pub fiducial_residual: f64,
    /// Largest deviation of `|⟨ψ_j|ψ_k⟩|²` from `(1 + dδ_jk)/(d+1)`.
    pub max_overlap_deviation: f64,
    /// Output entanglement at uniform control weights with the fiducial on `B`.
    pub entangling_check: f64,
    /// Unrestricted numeric entangling power of the same gate.
    pub optimizer_value: f64,
}

/// Builds `Σ_j |j⟩⟨j| ⊗ X^aZ^b` on `d² × d` and evaluates it on the fiducial.
pub fn sic_entangling_check(d: usize, fiducial: &PureState, opts: &PowerOptions) -> Result<SicReport> {
    if fiducial.dim() != d {
        return Err(Error::Shape(format!("fiducial has dimension {}, expected {d}", fiducial.dim())));
    }
    let res = fiducial_residual(fiducial);
    if res >= 1e-6 {
        return Err(Error::Precondition(format!("not a fiducial state (overlap residual {res:e})")));
    }
    let orbit: Vec<CVector> = all_words(d).iter().map(|w| w * fiducial.amplitudes()).collect();
    let mut dev: f64 = 0.0;
    for (j, a) in orbit.iter().enumerate() {
        for (k, b) in orbit.iter().enumerate() {
            let target = if j == k { 1.0 } else { 1.0 / (d + 1) as f64 };
            dev = dev.max((a.dotc(b).norm_sqr() - target).abs());
        }
    }
    let u = build(&GateSpec::HwControlled { d })?;
    let alpha = PureState::normalize(vec![d * d], CVector::from_element(d * d, c(1.0, 0.0)))?;
    let entangling_check = output_entanglement(&u, &alpha, fiducial)?;
    let optimizer_value = entangling_power(&u, opts)?.value;
    Ok(SicReport {
        d,
        fiducial: fiducial.clone(),
        fiducial_residual: res,
        max_overlap_deviation: dev,
        entangling_check,
        optimizer_value,
    })
}

/// `Σ_j (1/d²) U_j ρ U_j†` for the Heisenberg-Weyl words.
pub fn twirl(rho: &CMatrix) -> CMatrix {
    let d = rho.nrows();
    let words = all_words(d);
    words.iter().map(|w| w * rho * w.adjoint()).fold(CMatrix::zeros(d, d), |a, b| a + b) / c((d * d) as f64, 0.0)
}

/// `Σ_j |ψ_j⟩⟨ψ_j|` over the orbit of `phi`.
pub fn orbit_frame(phi: &PureState) -> CMatrix {
    let d = phi.dim();
    all_words(d).iter().map(|w| (w * phi.amplitudes()) * (w * phi.amplitudes()).adjoint()).fold(CMatrix::zeros(d, d), |a, b| a + b)
}

/// `Σ_j |j⟩⟨j| ⊗ K_j`.
pub fn block_diagonal(fam: &KrausFamily) -> CMatrix {
    let n = fam.operators.len();
    let mut out = CMatrix::zeros(n * fam.d, n * fam.d);
    for (j, k) in fam.operators.iter().enumerate() {
        let mut p = CMatrix::zeros(n, n);
        p[(j, j)] = c(1.0, 0.0);
        out += kron(&p, k);
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qcore::random_density;

    #[test]
    fn heisenberg_weyl_family_is_unital() {
        let r = unital_equivalence_check(&KrausFamily::heisenberg_weyl(2), 64, 1).unwrap();
        assert!(r.gram_deviation < 1e-12 && r.pure_state_deviation < 1e-12);
        assert!(r.equivalence_confirmed());
        let r = unital_equivalence_check(&KrausFamily::shift_clock(3), 64, 2).unwrap();
        assert!(r.gram_holds && r.pure_holds && r.product_holds);
    }

    #[test]
    fn perturbed_family_fails_both() {
        let mut fam = KrausFamily::heisenberg_weyl(2);
        fam.operators[0] = &fam.operators[0] * c(1.1f64.sqrt(), 0.0);
        let r = unital_equivalence_check(&fam, 64, 3).unwrap();
        assert!((r.gram_deviation - 0.1).abs() < 1e-12);
        assert!(r.pure_state_deviation > 1e-3);
        assert!(r.equivalence_confirmed());
    }

    #[test]
    fn singular_weight_rejected() {
        let fam = KrausFamily::new(2, KrausFamily::heisenberg_weyl(2).operators, Some(CMatrix::zeros(2, 2))).unwrap();
        assert!(matches!(unital_equivalence_check(&fam, 4, 0), Err(Error::Precondition(_))));
    }

    #[test]
    fn phase_averages_are_diagonal() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for (d, fam) in [(3, PhaseFamily::RootsOfUnity), (2, PhaseFamily::Signs)] {
            let x = CMatrix::from_fn(d, d, |i, j| c((i * 3 + j) as f64, (i as f64) - (j as f64) * 0.5));
            let y = phase_average(&x, fam).unwrap();
            for i in 0..d {
                for j in 0..d {
                    if i == j {
                        assert!((y[(i, i)] - x[(i, i)]).norm() < 1e-12);
                    } else {
                        assert!(y[(i, j)].norm() < 1e-12);
                    }
                }
            }
            let rho = random_density(d, &mut rng);
            let diag = CMatrix::from_diagonal(&rho.matrix().diagonal());
            assert!((phase_average(&diag, fam).unwrap() - &diag).norm() < 1e-12);
        }
    }

    #[test]
    fn twirl_is_maximally_mixed() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for d in 2..=3 {
            let rho = random_density(d, &mut rng);
            let t = twirl(rho.matrix());
            assert!((t - identity(d) / c(d as f64, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn fiducials_and_sic() {
        let opts = PowerOptions { restarts: 4, ..Default::default() };
        for d in 2..=3 {
            let phi = fiducial_search(d, 0, 16).unwrap();
            assert!(fiducial_residual(&phi) < 1e-8);
            assert!((orbit_frame(&phi) - identity(d) * c(d as f64, 0.0)).norm() < 1e-8);
            let rep = sic_entangling_check(d, &phi, &opts).unwrap();
            assert!((rep.entangling_check - (d as f64).log2()).abs() < 1e-6);
        }
        let wrong = PureState::basis(vec![2], 0).unwrap();
        assert!(matches!(sic_entangling_check(2, &wrong, &opts), Err(Error::Precondition(_))));
    }
}
