//! Correlation and information measures for finite-dimensional bipartite
//! quantum states.
//!
//! The crate covers von Neumann and relative entropies, mutual information,
//! Lüders measurement channels and the classical information they expose,
//! measurement-basis suprema (information gain, joint-measurement mutual
//! information, quantum discord), entropy of coherence, and verification and
//! construction of twin observables.

pub mod corpus;
pub mod entropy;
pub mod error;
pub mod measurement;
pub mod numeric;
mod optimize;
pub mod random;
pub mod state;
pub mod suprema;
pub mod twins;

pub use entropy::Bits;
pub use error::{Error, Result};
pub use measurement::{JointDistribution, Observable, SubsystemObservable};
pub use numeric::{ComplexMatrix, Dims, SpectralDecomposition, StateVector, Subsystem};
pub use state::{BipartiteState, DensityOperator, Purity, SchmidtForm};
pub use suprema::{OptimizationConfig, SupremumResult};
pub use twins::TwinReport;
