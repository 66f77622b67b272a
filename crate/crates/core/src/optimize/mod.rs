//! Multi-start maximization of entangling, assisted entangling and
//! disentangling power.
//!
//! Every estimate is a certified lower bound: the stored witness reproduces the
//! reported value through the same objective. Restarts run through
//! [`crate::parallel::map_indexed`] and are reduced in index order, keeping the
//! first of equal values, so results do not depend on scheduling.

pub mod lbfgs;
pub mod lp;
pub mod objective;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gates::{controlled_from_a, controlled_from_b, ControlledForm};
use crate::opschmidt::{schmidt_rank, schmidt_strength_of, BipartiteUnitary};
use crate::parallel::map_indexed;
use crate::qcore::{c, hs_inner, random_gaussian_vector, CMatrix, CVector, DensityOperator, PureState, C64};
use lbfgs::{minimize, LbfgsOptions, LbfgsResult};
use objective::{coefficient_matrix, entropy_of, flatten, pack, unpack, DeltaObjective, Layout, ProductObjective};

/// Slack allowed between numeric estimates in ordering checks.
pub const ORDER_TOL: f64 = 2e-3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Quantity {
    #[serde(rename = "K_E")]
    KE,
    #[serde(rename = "K_Ea")]
    KEa,
    #[serde(rename = "K_d")]
    Kd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerOptions {
    pub restarts: usize,
    pub seed: u64,
    pub ancilla_a: Option<usize>,
    pub ancilla_b: Option<usize>,
    /// Restrict to inputs without ancillas.
    pub no_ancilla: bool,
    /// Drop ancillas that provably do not help (controlled gates) and use the
    /// controlled-gate form of the assisted objective.
    pub use_reductions: bool,
    pub max_evals: usize,
    pub tol: f64,
    pub parallel: bool,
}

impl Default for PowerOptions {
    fn default() -> Self {
        Self {
            restarts: 32,
            seed: 0,
            ancilla_a: None,
            ancilla_b: None,
            no_ancilla: false,
            use_reductions: true,
            max_evals: 50_000,
            tol: 1e-10,
            parallel: true,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// `α` on `A R_A`, `β` on `B R_B`.
    Product { alpha: PureState, beta: PureState },
    /// Joint input on `A R_A B R_B` (dims `[d_A, d_RA, d_B, d_RB]`).
    Joint { psi: PureState },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PowerEstimate {
    pub quantity: Quantity,
    pub value: f64,
    pub witness: Witness,
    pub restarts_used: usize,
    pub best_restart: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub upper_bounds: Vec<(String, f64)>,
    pub ancilla_dims: (usize, usize),
}

impl PowerEstimate {
    pub fn min_upper_bound(&self) -> f64 {
        self.upper_bounds.iter().map(|b| b.1).fold(f64::INFINITY, f64::min)
    }

    /// Re-evaluates the objective on the stored witness.
    pub fn recompute(&self, u: &BipartiteUnitary) -> Result<f64> {
        match (&self.witness, self.quantity) {
            (Witness::Product { alpha, beta }, _) => output_entanglement(u, alpha, beta),
            (Witness::Joint { psi }, Quantity::Kd) => entanglement_change(u, psi).map(|d| -d),
            (Witness::Joint { psi }, _) => entanglement_change(u, psi),
        }
    }
}

fn local_dims(state: &PureState, d: usize, label: &str) -> Result<usize> {
    if state.dim() % d != 0 || state.dims()[0] != d {
        return Err(Error::Shape(format!("{label} has dims {:?}, first factor must be {d}", state.dims())));
    }
    Ok(state.dim() / d)
}

/// `E((U ⊗ I)(α ⊗ β))` across `A R_A : B R_B`.
pub fn output_entanglement(u: &BipartiteUnitary, alpha: &PureState, beta: &PureState) -> Result<f64> {
    let dra = local_dims(alpha, u.da(), "alpha")?;
    let drb = local_dims(beta, u.db(), "beta")?;
    let l = Layout { da: u.da(), dra, db: u.db(), drb };
    let a = CMatrix::from_row_slice(u.da(), dra, alpha.amplitudes().as_slice());
    let b = CMatrix::from_row_slice(u.db(), drb, beta.amplitudes().as_slice());
    Ok(entropy_of(&objective::product_output(u.matrix(), &a, &b, &l)))
}

fn joint_layout(u: &BipartiteUnitary, psi: &PureState) -> Result<Layout> {
    match psi.dims() {
        [da, dra, db, drb] if *da == u.da() && *db == u.db() => Ok(Layout { da: *da, dra: *dra, db: *db, drb: *drb }),
        other => Err(Error::Shape(format!(
            "joint state dims {other:?} must be [{}, d_RA, {}, d_RB]",
            u.da(),
            u.db()
        ))),
    }
}

/// `(U ⊗ I)ψ` for `ψ` on `[d_A, d_RA, d_B, d_RB]`.
pub fn apply_gate(u: &BipartiteUnitary, psi: &PureState) -> Result<PureState> {
    let l = joint_layout(u, psi)?;
    let m = coefficient_matrix(psi.amplitudes().as_slice(), &l);
    let out = DeltaObjective { u: u.matrix(), layout: l }.output(&m);
    PureState::unnormalized(l.dims(), flatten(&out))
}

/// `E(Uψ) − E(ψ)` across `A R_A : B R_B`.
pub fn entanglement_change(u: &BipartiteUnitary, psi: &PureState) -> Result<f64> {
    let l = joint_layout(u, psi)?;
    let x = pack(psi.amplitudes().as_slice());
    Ok(DeltaObjective { u: u.matrix(), layout: l }.value(&x))
}

struct Best {
    index: usize,
    result: LbfgsResult,
    evals: usize,
}

fn reduce(results: Vec<LbfgsResult>) -> Best {
    let evals = results.iter().map(|r| r.evals).sum();
    let mut best = 0;
    for (k, r) in results.iter().enumerate() {
        // minimizing the negated objective; strict comparison keeps the lowest index on ties
        if r.value < results[best].value || !results[best].value.is_finite() {
            best = k;
        }
    }
    let result = results.into_iter().nth(best).expect("at least one start");
    Best { index: best, result, evals }
}

fn lbfgs_opts(opts: &PowerOptions) -> LbfgsOptions {
    LbfgsOptions { max_evals: opts.max_evals, f_tol: opts.tol, ..Default::default() }
}

fn rng_for(opts: &PowerOptions, index: usize) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(index as u64))
}

fn normalized(v: CVector) -> CVector {
    let n = v.norm();
    v.unscale(n)
}

/// `(1/√d) Σ_i |i⟩|i mod d_R⟩`.
fn correlated_seed(d: usize, dr: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); d * dr];
    for i in 0..d {
        v[i * dr + i % dr] = c(1.0 / (d as f64).sqrt(), 0.0);
    }
    v
}

fn basis_seed(d: usize, dr: usize, i: usize) -> Vec<C64> {
    let mut v = vec![c(0.0, 0.0); d * dr];
    v[i * dr] = c(1.0, 0.0);
    v
}

fn resolve_ancillas(u: &BipartiteUnitary, opts: &PowerOptions, reduce: bool) -> (usize, usize) {
    if opts.no_ancilla {
        return (1, 1);
    }
    let mut dra = opts.ancilla_a.unwrap_or(u.da()).max(1);
    let mut drb = opts.ancilla_b.unwrap_or(u.db()).max(1);
    if reduce && opts.use_reductions {
        if opts.ancilla_a.is_none() && controlled_from_a(u).is_some() {
            dra = 1;
        }
        if opts.ancilla_b.is_none() && controlled_from_b(u).is_some() {
            drb = 1;
        }
    }
    (dra, drb)
}

fn log2(x: usize) -> f64 {
    (x as f64).log2()
}

fn controlled_caps(u: &BipartiteUnitary) -> Vec<(String, f64)> {
    let mut caps = Vec::new();
    if let Some(f) = controlled_from_a(u) {
        caps.push(("log2 m (controlled from A)".to_string(), log2(f.m())));
    }
    if let Some(f) = controlled_from_b(u) {
        caps.push(("log2 m (controlled from B)".to_string(), log2(f.m())));
    }
    caps
}

/// Numeric entangling power `K_E(U)` (or the ancilla-free variant).
pub fn entangling_power(u: &BipartiteUnitary, opts: &PowerOptions) -> Result<PowerEstimate> {
    let (dra, drb) = resolve_ancillas(u, opts, true);
    let l = Layout { da: u.da(), dra, db: u.db(), drb };
    let obj = ProductObjective { u: u.matrix(), layout: l };

    let mut fixed: Vec<Vec<f64>> = Vec::new();
    let mut seed_a = correlated_seed(l.da, dra);
    seed_a.extend(correlated_seed(l.db, drb));
    fixed.push(pack(&seed_a));
    for i in 0..l.da {
        for j in 0..l.db {
            let mut v = basis_seed(l.da, dra, i);
            v.extend(basis_seed(l.db, drb, j));
            fixed.push(pack(&v));
        }
    }
    let nfixed = fixed.len();
    let total = nfixed + opts.restarts;
    let lb = lbfgs_opts(opts);
    let results = map_indexed(total, opts.parallel, |k| {
        let x0 = if k < nfixed {
            fixed[k].clone()
        } else {
            let mut rng = rng_for(opts, k);
            let a = normalized(random_gaussian_vector(l.rows(), &mut rng));
            let b = normalized(random_gaussian_vector(l.cols(), &mut rng));
            let mut v: Vec<C64> = a.iter().copied().collect();
            v.extend(b.iter());
            pack(&v)
        };
        minimize(
            |x| {
                let (v, g) = obj.value_and_grad(x);
                (-v, g.into_iter().map(|z| -z).collect())
            },
            x0,
            &lb,
            |x| obj.renorm(x),
        )
    });
    let best = reduce(results);
    let (a, b) = obj.matrices(&best.result.x);
    let alpha = PureState::normalize(vec![l.da, dra], flat_rows(&a))?;
    let beta = PureState::normalize(vec![l.db, drb], flat_rows(&b))?;
    let value = output_entanglement(u, &alpha, &beta)?;

    let mut upper = vec![
        ("log2 Sch(U)".to_string(), log2(schmidt_rank(u))),
        ("log2 min(dA^2, dB^2)".to_string(), 2.0 * log2(u.da().min(u.db()))),
        ("log2 min(dA dRA, dB dRB)".to_string(), log2(l.rows().min(l.cols()))),
    ];
    upper.extend(controlled_caps(u));
    Ok(PowerEstimate {
        quantity: Quantity::KE,
        value,
        witness: Witness::Product { alpha, beta },
        restarts_used: total,
        best_restart: best.index,
        evaluations: best.evals,
        converged: best.result.converged,
        upper_bounds: upper,
        ancilla_dims: (dra, drb),
    })
}

fn flat_rows(m: &CMatrix) -> CVector {
    flatten(m)
}

/// Zero-pads the ancilla of a `d × dr` amplitude matrix to `d × new_dr`.
fn pad_ancilla(m: &CMatrix, new_dr: usize) -> CMatrix {
    let mut out = CMatrix::zeros(m.nrows(), new_dr.max(m.ncols()));
    out.view_mut((0, 0), (m.nrows(), m.ncols())).copy_from(m);
    out
}

fn product_to_joint(alpha: &PureState, beta: &PureState, l: &Layout) -> Vec<C64> {
    let a = pad_ancilla(&CMatrix::from_row_slice(l.da, alpha.dim() / l.da, alpha.amplitudes().as_slice()), l.dra);
    let b = pad_ancilla(&CMatrix::from_row_slice(l.db, beta.dim() / l.db, beta.amplitudes().as_slice()), l.drb);
    let av = flatten(&a.columns(0, l.dra).into_owned());
    let bv = flatten(&b.columns(0, l.drb).into_owned());
    av.kronecker(&bv).iter().copied().collect()
}

/// Maximizes `E(Uψ) − E(ψ)` on the given layout, with `seeds` tried first.
fn maximize_delta(u: &CMatrix, l: Layout, seeds: Vec<Vec<C64>>, opts: &PowerOptions) -> (usize, LbfgsResult, usize, usize) {
    let obj = DeltaObjective { u, layout: l };
    let nfixed = seeds.len();
    let total = nfixed + opts.restarts;
    let lb = lbfgs_opts(opts);
    let results = map_indexed(total, opts.parallel, |k| {
        let x0 = if k < nfixed {
            pack(&seeds[k])
        } else {
            let mut rng = rng_for(opts, k);
            pack(normalized(random_gaussian_vector(l.rows() * l.cols(), &mut rng)).as_slice())
        };
        minimize(
            |x| {
                let (v, g) = obj.value_and_grad(x);
                (-v, g.into_iter().map(|z| -z).collect())
            },
            x0,
            &lb,
            objective::renorm_block,
        )
    });
    let best = reduce(results);
    (best.index, best.result, best.evals, total)
}

/// Numeric assisted entangling power `K_Ea(U)`.
pub fn assisted_entangling_power(u: &BipartiteUnitary, opts: &PowerOptions) -> Result<PowerEstimate> {
    let ke = entangling_power(u, opts)?;
    assisted_entangling_power_seeded(u, opts, &ke)
}

/// As [`assisted_entangling_power`], reusing an existing `K_E` estimate as a seed.
pub fn assisted_entangling_power_seeded(u: &BipartiteUnitary, opts: &PowerOptions, ke: &PowerEstimate) -> Result<PowerEstimate> {
    let Witness::Product { alpha, beta } = &ke.witness else {
        return Err(Error::Precondition("seed estimate must carry a product witness".into()));
    };
    let reducible = opts.use_reductions && !opts.no_ancilla && opts.ancilla_a.is_none();
    let mut est = if let (true, Some(form)) = (reducible, controlled_from_a(u)) {
        assisted_controlled(u, &form, opts, alpha, beta)?
    } else if let (true, true, None) = (reducible, opts.ancilla_b.is_none(), controlled_from_b(u)) {
        assisted_general(u, opts, alpha, beta)?
    } else if reducible && opts.ancilla_b.is_none() && controlled_from_b(u).is_some() {
        let swapped = u.swap_parties();
        let form = controlled_from_a(&swapped).expect("swap of a B-controlled gate is A-controlled");
        let e = assisted_controlled(&swapped, &form, opts, beta, alpha)?;
        swap_joint_estimate(e)?
    } else {
        assisted_general(u, opts, alpha, beta)?
    };
    let mut upper = vec![("2 log2 min(dA, dB)".to_string(), 2.0 * log2(u.da().min(u.db())))];
    upper.extend(controlled_caps(u));
    est.upper_bounds = upper;
    Ok(est)
}

fn swap_joint_estimate(mut e: PowerEstimate) -> Result<PowerEstimate> {
    if let Witness::Joint { psi } = &e.witness {
        let d = psi.dims();
        let l = Layout { da: d[0], dra: d[1], db: d[2], drb: d[3] };
        let m = coefficient_matrix(psi.amplitudes().as_slice(), &l).transpose();
        let psi = PureState::normalize(vec![l.db, l.drb, l.da, l.dra], flatten(&m))?;
        e.witness = Witness::Joint { psi };
        e.ancilla_dims = (e.ancilla_dims.1, e.ancilla_dims.0);
    }
    Ok(e)
}

fn assisted_general(u: &BipartiteUnitary, opts: &PowerOptions, alpha: &PureState, beta: &PureState) -> Result<PowerEstimate> {
    let (dra, drb) = resolve_ancillas(u, opts, false);
    let dra = dra.max(alpha.dim() / u.da());
    let drb = drb.max(beta.dim() / u.db());
    let l = Layout { da: u.da(), dra, db: u.db(), drb };
    let seed = product_to_joint(alpha, beta, &l);
    let (index, res, evals, total) = maximize_delta(u.matrix(), l, vec![seed], opts);
    let psi = PureState::normalize(l.dims(), CVector::from_vec(unpack(&res.x)))?;
    let value = entanglement_change(u, &psi)?;
    Ok(PowerEstimate {
        quantity: Quantity::KEa,
        value,
        witness: Witness::Joint { psi },
        restarts_used: total,
        best_restart: index,
        evaluations: evals,
        converged: res.converged,
        upper_bounds: vec![],
        ancilla_dims: (dra, drb),
    })
}

/// Controlled-from-A path: the assisted objective only depends on the grouped
/// terms, so it is optimized on `Σ_j |j⟩⟨j| ⊗ U_j` with one control level per
/// term and an `R_A` large enough to realize any family of PSD blocks on `B R_B`.
fn assisted_controlled(
    u: &BipartiteUnitary,
    form: &ControlledForm,
    opts: &PowerOptions,
    alpha: &PureState,
    beta: &PureState,
) -> Result<PowerEstimate> {
    let m = form.m();
    let db = u.db();
    let drb = opts.ancilla_b.unwrap_or(db).max(beta.dim() / db);
    let k = db * drb;
    let reduced = crate::gates::controlled(crate::gates::Side::A, &form.terms)?;
    let l = Layout { da: m, dra: k, db, drb };

    // seed: Σ_j √p_j |j⟩|0⟩ ⊗ β with p_j the weight of α on group j
    let dra_in = alpha.dim() / u.da();
    let b = pad_ancilla(&CMatrix::from_row_slice(db, beta.dim() / db, beta.amplitudes().as_slice()), drb);
    let bvec = flatten(&b.columns(0, drb).into_owned());
    let mut seed = vec![c(0.0, 0.0); l.rows() * l.cols()];
    for (j, group) in form.groups.iter().enumerate() {
        let p: f64 = group
            .iter()
            .flat_map(|&lvl| (0..dra_in).map(move |r| lvl * dra_in + r))
            .map(|idx| alpha.amplitudes()[idx].norm_sqr())
            .sum();
        let row = j * k;
        for (col, bz) in bvec.iter().enumerate() {
            seed[row * l.cols() + col] = bz * p.sqrt();
        }
    }
    let (index, res, evals, total) = maximize_delta(reduced.matrix(), l, vec![seed], opts);
    let small = coefficient_matrix(&unpack(&res.x), &l);

    // embed back: group j lives on its first level, whose phase is 1
    let big_l = Layout { da: u.da(), dra: k, db, drb };
    let mut big = CMatrix::zeros(big_l.rows(), big_l.cols());
    for (j, group) in form.groups.iter().enumerate() {
        let lvl = group[0];
        let ph = form.level_phases[lvl].conj();
        for r in 0..k {
            for col in 0..l.cols() {
                big[(lvl * k + r, col)] = small[(j * k + r, col)] * ph;
            }
        }
    }
    let psi = PureState::normalize(big_l.dims(), flatten(&big))?;
    let value = entanglement_change(u, &psi)?;
    Ok(PowerEstimate {
        quantity: Quantity::KEa,
        value,
        witness: Witness::Joint { psi },
        restarts_used: total,
        best_restart: index,
        evaluations: evals,
        converged: res.converged,
        upper_bounds: vec![],
        ancilla_dims: (k, drb),
    })
}

/// Numeric disentangling power `K_d(U) = K_Ea(U†)`; the witness is a state
/// whose entanglement `U` lowers by the reported amount.
pub fn disentangling_power(u: &BipartiteUnitary, opts: &PowerOptions) -> Result<PowerEstimate> {
    let ud = u.adjoint();
    let mut e = assisted_entangling_power(&ud, opts)?;
    if let Witness::Joint { psi } = &e.witness {
        let phi = apply_gate(&ud, psi)?;
        let phi = PureState::normalize(phi.dims().to_vec(), phi.into_amplitudes())?;
        e.witness = Witness::Joint { psi: phi };
    }
    e.quantity = Quantity::Kd;
    e.value = e.recompute(u)?;
    Ok(e)
}

/// `max_{j>k} |Tr(σ U_j† U_k)|`.
pub fn sigma_residual(sigma: &CMatrix, terms: &[CMatrix]) -> f64 {
    let mut worst: f64 = 0.0;
    for j in 0..terms.len() {
        for k in 0..j {
            let w = terms[j].adjoint() * &terms[k];
            worst = worst.max(hs_inner(&sigma.adjoint(), &w).norm());
        }
    }
    worst
}

fn is_diagonal(m: &CMatrix) -> bool {
    (0..m.nrows()).all(|i| (0..m.ncols()).all(|j| i == j || m[(i, j)].norm() < 1e-12))
}

/// Searches for a state `σ` with `Tr(σ U_j† U_k) = 0` for all `j ≠ k`.
pub fn sigma_witness_search(terms: &[CMatrix]) -> Result<Option<DensityOperator>> {
    let Some(first) = terms.first() else {
        return Err(Error::Shape("need at least one term".into()));
    };
    let d = first.nrows();
    if terms.iter().any(|t| t.nrows() != d || t.ncols() != d || !crate::qcore::is_unitary(t, 1e-8)) {
        return Err(Error::InvalidUnitary("terms must be unitaries of one size".into()));
    }
    if terms.len() == 1 {
        return Ok(Some(DensityOperator::maximally_mixed(d)));
    }
    if terms.iter().all(is_diagonal) {
        let mut rows: Vec<Vec<f64>> = Vec::new();
        let mut rhs = Vec::new();
        for j in 0..terms.len() {
            for k in 0..j {
                let z: Vec<C64> = (0..d).map(|i| terms[j][(i, i)].conj() * terms[k][(i, i)]).collect();
                rows.push(z.iter().map(|v| v.re).collect());
                rows.push(z.iter().map(|v| v.im).collect());
                rhs.extend([0.0, 0.0]);
            }
        }
        rows.push(vec![1.0; d]);
        rhs.push(1.0);
        let Some(w) = lp::feasible_point(&rows, &rhs, 1e-12) else {
            return Ok(None);
        };
        let total: f64 = w.iter().sum();
        let sigma = CMatrix::from_diagonal(&CVector::from_iterator(d, w.iter().map(|x| c(x / total, 0.0))));
        if sigma_residual(&sigma, terms) < 1e-8 {
            return DensityOperator::new(sigma).map(Some);
        }
        return Ok(None);
    }
    let pairs: Vec<CMatrix> = (0..terms.len())
        .flat_map(|j| (0..j).map(move |k| (j, k)))
        .map(|(j, k)| terms[j].adjoint() * &terms[k])
        .collect();
    let f = |x: &[f64]| -> (f64, Vec<f64>) {
        let t = CMatrix::from_row_slice(d, d, &unpack(x));
        let tt = t.adjoint() * &t;
        let tau = tt.trace().re;
        let mut val = 0.0;
        let mut g = CMatrix::zeros(d, d);
        for w in &pairs {
            let r = hs_inner(&tt.adjoint(), w) / tau;
            val += r.norm_sqr();
            g += (&t * w * r.conj() + &t * w.adjoint() * r - &t * c(2.0 * r.norm_sqr(), 0.0)).unscale(tau);
        }
        (val, g.transpose().iter().flat_map(|z| [2.0 * z.re, 2.0 * z.im]).collect())
    };
    let lb = LbfgsOptions { max_evals: 20_000, f_tol: 1e-24, g_tol: 1e-16, stall_iters: 5, ..Default::default() };
    let results = map_indexed(16, true, |k| {
        let mut rng = ChaCha8Rng::seed_from_u64(k as u64);
        let x0 = pack(random_gaussian_vector(d * d, &mut rng).as_slice());
        minimize(f, x0, &lb, objective::renorm_block)
    });
    let best = reduce(results);
    let t = CMatrix::from_row_slice(d, d, &unpack(&best.result.x));
    let tt = t.adjoint() * &t;
    let sigma = tt.unscale(tt.trace().re);
    let res = sigma_residual(&sigma, terms);
    if res < 1e-8 {
        return DensityOperator::new((&sigma + sigma.adjoint()) * c(0.5, 0.0)).map(Some);
    }
    Ok(None)
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundsReport {
    pub k_e: f64,
    pub k_ea: f64,
    pub k_sch: f64,
    pub log2_schmidt_rank: f64,
    pub log2_m: Option<f64>,
    pub two_log2_dmin: f64,
    /// Asymptotic quantities in the chain, reported symbolically only.
    pub unevaluated: Vec<String>,
    /// Whether the numeric `K_Ea` stays below `log2 Sch(U)` (conjecture probe, not asserted).
    pub conjecture_probe_holds: bool,
    pub conjecture_probe_margin: f64,
    pub ke_estimate: PowerEstimate,
    pub kea_estimate: PowerEstimate,
}

/// Assembles the bound chain `K_Sch ≤ K_E ≤ K_Ea ≤ caps`.
pub fn bounds_report(u: &BipartiteUnitary, opts: &PowerOptions) -> Result<BoundsReport> {
    let ke = entangling_power(u, opts)?;
    let kea = assisted_entangling_power_seeded(u, opts, &ke)?;
    let k_sch = schmidt_strength_of(u);
    let log2_sch = log2(schmidt_rank(u));
    let log2_m = [controlled_from_a(u), controlled_from_b(u)]
        .into_iter()
        .flatten()
        .map(|f| log2(f.m()))
        .reduce(f64::min);
    let two_log2_dmin = 2.0 * log2(u.da().min(u.db()));
    if k_sch > ke.value + ORDER_TOL {
        return Err(Error::Numerical(format!("K_Sch {k_sch} exceeds K_E estimate {}", ke.value)));
    }
    if ke.value > kea.value + ORDER_TOL {
        return Err(Error::Numerical(format!("K_E {} exceeds K_Ea estimate {}", ke.value, kea.value)));
    }
    let cap = log2_m.unwrap_or(f64::INFINITY).min(two_log2_dmin);
    if kea.value > cap + ORDER_TOL {
        return Err(Error::Numerical(format!("K_Ea estimate {} exceeds proven cap {cap}", kea.value)));
    }
    Ok(BoundsReport {
        k_e: ke.value,
        k_ea: kea.value,
        k_sch,
        log2_schmidt_rank: log2_sch,
        log2_m,
        two_log2_dmin,
        unevaluated: vec!["K'_Ea(U)".into(), "E'_c(U)".into(), "E_c(U)".into()],
        conjecture_probe_holds: kea.value <= log2_sch + 1e-6,
        conjecture_probe_margin: log2_sch - kea.value,
        ke_estimate: ke,
        kea_estimate: kea,
    })
}
