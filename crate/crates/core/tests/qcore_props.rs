use entpower::qcore::{
    both_marginal_entropies, c, entanglement_entropy, partial_trace, random_density, random_unitary, shannon_entropy,
    von_neumann_entropy, DensityOperator, PureState,
};
use entpower::CMatrix;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn diag_state(p: &[f64], rot: &CMatrix) -> DensityOperator {
    let d = CMatrix::from_fn(p.len(), p.len(), |i, j| if i == j { c(p[i], 0.0) } else { c(0.0, 0.0) });
    DensityOperator::new(rot * d * rot.adjoint()).unwrap()
}

/// Whether `p` is majorized by `q` (both sorted descending inside).
fn majorized(p: &[f64], q: &[f64]) -> bool {
    let mut a = p.to_vec();
    let mut b = q.to_vec();
    a.sort_by(|x, y| y.total_cmp(x));
    b.sort_by(|x, y| y.total_cmp(x));
    let (mut sa, mut sb) = (0.0, 0.0);
    a.iter().zip(&b).all(|(x, y)| {
        sa += x;
        sb += y;
        sa <= sb + 1e-12
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn entropy_is_unitarily_invariant(seed in any::<u64>(), d in 2usize..6) {
        let mut r = rng(seed);
        let rho = random_density(d, &mut r);
        let v = random_unitary(d, &mut r);
        let turned = DensityOperator::new(&v * rho.matrix() * v.adjoint()).unwrap();
        prop_assert!((von_neumann_entropy(&rho) - von_neumann_entropy(&turned)).abs() < 1e-10);
    }

    #[test]
    fn subadditivity_and_araki_lieb(seed in any::<u64>(), da in 2usize..4, db in 2usize..4) {
        let rho = random_density(da * db, &mut rng(seed));
        let s = von_neumann_entropy(&rho);
        let sa = von_neumann_entropy(&partial_trace(&rho, &[da, db], &[0]).unwrap());
        let sb = von_neumann_entropy(&partial_trace(&rho, &[da, db], &[1]).unwrap());
        prop_assert!(s <= sa + sb + 1e-9);
        prop_assert!((sa - sb).abs() <= s + 1e-9);
    }

    #[test]
    fn concavity_with_mixing_cap(seed in any::<u64>(), d in 2usize..5, k in 2usize..5) {
        let mut r = rng(seed);
        let states: Vec<DensityOperator> = (0..k).map(|_| random_density(d, &mut r)).collect();
        let raw: Vec<f64> = (0..k).map(|_| r.random::<f64>() + 0.05).collect();
        let total: f64 = raw.iter().sum();
        let p: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let mix = DensityOperator::mixture(&p, &states).unwrap();
        let avg: f64 = p.iter().zip(&states).map(|(w, s)| w * von_neumann_entropy(s)).sum();
        let s = von_neumann_entropy(&mix);
        prop_assert!(s >= avg - 1e-9);
        prop_assert!(s <= avg + shannon_entropy(&p) + 1e-9);
    }

    #[test]
    fn strict_majorization_raises_entropy(seed in any::<u64>(), d in 2usize..6) {
        let mut r = rng(seed);
        let raw: Vec<f64> = (0..d).map(|_| r.random::<f64>() + 0.01).collect();
        let total: f64 = raw.iter().sum();
        let q: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // a T-transform on the largest and smallest entries
        let (hi, lo) = {
            let mut idx: Vec<usize> = (0..d).collect();
            idx.sort_by(|&a, &b| q[b].total_cmp(&q[a]));
            (idx[0], idx[d - 1])
        };
        prop_assume!(q[hi] - q[lo] > 1e-3);
        let t = 0.1 + 0.3 * r.random::<f64>();
        let mut p = q.clone();
        p[hi] = (1.0 - t) * q[hi] + t * q[lo];
        p[lo] = t * q[hi] + (1.0 - t) * q[lo];
        prop_assert!(majorized(&p, &q));
        let rho = diag_state(&p, &random_unitary(d, &mut r));
        let sigma = diag_state(&q, &random_unitary(d, &mut r));
        prop_assert!(von_neumann_entropy(&rho) > von_neumann_entropy(&sigma));
    }

    #[test]
    fn both_sides_of_a_cut_agree(seed in any::<u64>(), da in 1usize..4, db in 1usize..4, dc in 1usize..3) {
        let psi = PureState::random(vec![da, db, dc], &mut rng(seed));
        for cut in [vec![0], vec![1], vec![0, 2]] {
            let (ea, eb) = both_marginal_entropies(&psi, &cut).unwrap();
            prop_assert!((ea - eb).abs() < 1e-9);
            prop_assert!((entanglement_entropy(&psi, &cut).unwrap() - ea).abs() < 1e-9);
        }
    }
}

#[test]
fn maximally_entangled_state_has_log_d_ebits() {
    for d in 2..6 {
        let e = entanglement_entropy(&PureState::maximally_entangled(d), &[0]).unwrap();
        assert!((e - (d as f64).log2()).abs() < 1e-12);
    }
}
