//! Multi-objective, multi-fidelity optimization engine.
//!
//! The engine runs Hyperband over tabular benchmarks with pluggable
//! sampling and ranking strategies: non-dominated sorting with an
//! epsilon-net tie-break, random-scalarization baselines, and a
//! transfer-learning sampler built on a probabilistic Pareto-front
//! surrogate. Hardware-aware benchmarks are derived by expanding a base
//! table across a hardware cost model.
//!
//! All objectives are minimized everywhere in this crate.

pub mod benchio;
pub mod error;
pub mod pareto;
pub mod rng;
pub mod runner;
pub mod scalarize;
pub mod scheduler;
pub mod transfer;
pub mod types;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::{Error, Result};
pub use rng::SeededRng;
pub use types::{dominates, zscore_normalize, ConfigId, Fidelity, ObjectiveVector};
