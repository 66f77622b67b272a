//! Seeded random gate families.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{controlled, permutation_matrix, Side};
use crate::error::{Error, Result};
use crate::opschmidt::{schmidt_rank, BipartiteUnitary};
use crate::qcore::{cis, random_unitary, CMatrix};

pub const MAX_ATTEMPTS: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RandomKind {
    Haar,
    Permutation,
    ComplexPermutation,
    /// Controlled from `A` with Haar terms on `B`.
    Controlled,
}

impl std::str::FromStr for RandomKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "haar" | "haar-like" => Ok(Self::Haar),
            "permutation" => Ok(Self::Permutation),
            "complex-permutation" => Ok(Self::ComplexPermutation),
            "controlled" => Ok(Self::Controlled),
            other => Err(Error::Parse(format!("unknown random kind '{other}'"))),
        }
    }
}

fn sample_once(kind: RandomKind, da: usize, db: usize, target: Option<usize>, rng: &mut ChaCha8Rng) -> Result<BipartiteUnitary> {
    let n = da * db;
    match kind {
        RandomKind::Haar => BipartiteUnitary::new(da, db, random_unitary(n, rng)),
        RandomKind::Permutation | RandomKind::ComplexPermutation => {
            let mut images: Vec<usize> = (0..n).collect();
            images.shuffle(rng);
            let mut m = permutation_matrix(&images)?;
            if kind == RandomKind::ComplexPermutation {
                for (col, &row) in images.iter().enumerate() {
                    m[(row, col)] = cis(rng.random_range(0.0..std::f64::consts::TAU));
                }
            }
            BipartiteUnitary::new(da, db, m)
        }
        RandomKind::Controlled => {
            let m = target.unwrap_or(da).clamp(1, da);
            let distinct: Vec<CMatrix> = (0..m).map(|_| random_unitary(db, rng)).collect();
            let mut levels: Vec<CMatrix> = distinct.clone();
            for _ in m..da {
                levels.push(distinct[rng.random_range(0..m)].clone());
            }
            levels.shuffle(rng);
            controlled(Side::A, &levels)
        }
    }
}

/// Deterministic per `seed`; with a target rank, samples are rejected until the
/// Schmidt rank matches or the attempt budget runs out.
pub fn random_instance(kind: RandomKind, da: usize, db: usize, target_rank: Option<usize>, seed: u64) -> Result<BipartiteUnitary> {
    if da == 0 || db == 0 {
        return Err(Error::Shape("dimensions must be positive".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_ATTEMPTS {
        let u = sample_once(kind, da, db, target_rank, &mut rng)?;
        match target_rank {
            None => return Ok(u),
            Some(r) if schmidt_rank(&u) == r => return Ok(u),
            Some(_) => {}
        }
    }
    Err(Error::SamplingExhausted {
        attempts: MAX_ATTEMPTS,
        reason: format!("no {kind:?} instance of size {da}x{db} with Schmidt rank {}", target_rank.unwrap_or(0)),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::classify;

    #[test]
    fn permutation_rank_four_is_swap_class() {
        let u = random_instance(RandomKind::Permutation, 2, 2, Some(4), 7).unwrap();
        let r = classify(&u);
        assert!(r.is_permutation);
        assert_eq!(r.schmidt_rank, 4);
        assert!(r.controlled_a.is_none() && r.controlled_b.is_none());
    }

    #[test]
    fn permutation_rank_three() {
        for seed in 0..5 {
            let u = random_instance(RandomKind::Permutation, 3, 4, Some(3), seed).unwrap();
            let r = classify(&u);
            assert!(r.is_permutation);
            assert_eq!(r.schmidt_rank, 3);
        }
    }

    #[test]
    fn deterministic() {
        let a = random_instance(RandomKind::Haar, 2, 3, None, 42).unwrap();
        let b = random_instance(RandomKind::Haar, 2, 3, None, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn controlled_kind() {
        let u = random_instance(RandomKind::Controlled, 3, 2, Some(2), 1).unwrap();
        let f = classify(&u).controlled_a.unwrap();
        assert_eq!(f.m(), 2);
        let cp = random_instance(RandomKind::ComplexPermutation, 2, 3, None, 5).unwrap();
        assert!(classify(&cp).is_complex_permutation);
    }

    #[test]
    fn infeasible_target_exhausts() {
        let e = random_instance(RandomKind::Permutation, 2, 2, Some(3), 0).unwrap_err();
        assert!(matches!(e, Error::SamplingExhausted { .. }));
    }
}
