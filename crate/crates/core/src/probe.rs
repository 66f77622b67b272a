//! Numeric sweeps for the two open conjectures. Each point records the
//! conjectured value next to the optimizer's estimate; nothing is asserted.

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::closedform::ke_sr2;
use crate::error::Result;
use crate::gates::random::{random_instance, RandomKind};
use crate::gates::{build, GateSpec};
use crate::opschmidt::schmidt_rank;
use crate::optimize::{assisted_entangling_power_seeded, entangling_power, PowerOptions};

pub const NOT_ASSERTED: &str = "conjecture, not asserted";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sr2ProbePoint {
    pub thetas: Vec<f64>,
    pub conjectured: f64,
    pub numeric: f64,
    pub difference: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AssistedProbePoint {
    pub da: usize,
    pub db: usize,
    pub seed: u64,
    pub k_ea: f64,
    pub log2_schmidt_rank: f64,
    /// `log₂ Sch(U) − K_Ea`; negative values would contradict the conjecture.
    pub margin: f64,
}

/// Random phase vectors of length `n` on `|0⟩⟨0|⊗I + |1⟩⟨1|⊗diag(e^{iθ})`.
pub fn sr2_sweep(n: usize, count: usize, seed: u64, opts: &PowerOptions) -> Result<Vec<Sr2ProbePoint>> {
    (0..count)
        .map(|k| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(k as u64));
            let mut thetas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..TAU)).collect();
            thetas[0] = 0.0;
            let conjectured = ke_sr2(&thetas)?.value;
            let u = build(&GateSpec::Gcnot { thetas: thetas.clone() })?;
            let numeric = entangling_power(&u, opts)?.value;
            Ok(Sr2ProbePoint { thetas, conjectured, numeric, difference: numeric - conjectured })
        })
        .collect()
}

/// `K_Ea` against `log₂ Sch(U)` on seeded Haar gates of the given cut.
pub fn assisted_sweep(da: usize, db: usize, count: usize, seed: u64, opts: &PowerOptions) -> Result<Vec<AssistedProbePoint>> {
    (0..count)
        .map(|k| {
            let s = seed.wrapping_add(k as u64);
            let u = random_instance(RandomKind::Haar, da, db, None, s)?;
            let ke = entangling_power(&u, opts)?;
            let k_ea = assisted_entangling_power_seeded(&u, opts, &ke)?.value;
            let log2_schmidt_rank = (schmidt_rank(&u) as f64).log2();
            Ok(AssistedProbePoint { da, db, seed: s, k_ea, log2_schmidt_rank, margin: log2_schmidt_rank - k_ea })
        })
        .collect()
}
