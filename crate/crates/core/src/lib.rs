//! Entangling power, assisted entangling power and disentangling power of
//! bipartite unitary gates, with exact closed forms for the structured
//! families where they are known and a branch-level simulator for the
//! probabilistic Schmidt-decomposition protocol.

pub mod closedform;
pub mod error;
pub mod gates;
pub mod opschmidt;
pub mod optimize;
pub mod parallel;
pub mod probe;
pub mod protocol;
pub mod qcore;
pub mod report;
pub mod unital;

pub use error::{Error, Result};
pub use opschmidt::{BipartiteUnitary, OperatorSchmidt};
pub use qcore::{CMatrix, CVector, DensityOperator, PureState, C64};
