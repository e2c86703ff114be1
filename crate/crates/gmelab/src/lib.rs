//! gmelab decides, for small multiqubit mixed states, whether a separable or
//! biseparable decomposition exists. It projects a test state onto the chosen
//! convex set with a Gilbert-style iteration, extracts an entanglement
//! witness and distance bounds from the result, and provides the closed-form
//! indicators (partial-transpose negativity and its aggregates) that the
//! state constructions are checked against.
//!
//! Modules:
//! - [`operator`]: dense complex matrices, kets, density matrices, tensor
//!   calculus (partial trace/transpose, factor permutations), Hilbert-Schmidt
//!   geometry, and an in-repo Hermitian eigensolver.
//! - [`partition`]: parties, particles, groupings, bipartitions, and the
//!   separability classes the projection optimizes over.
//! - [`states`]: named state constructors, local projection maps, two-copy
//!   merges, and the state-conversion protocols with success probabilities.
//! - [`gilbert`]: the iterative closest-(bi)separable-state engine.
//! - [`witness`]: witness operators, per-class maximal mean values, and the
//!   witness distance lower bound.
//! - [`estimator`]: asymptotic distance estimation from the recorded decay of
//!   squared distances.
//! - [`negativity`]: bipartite and tripartite negativity plus the aggregate
//!   three-particle entanglement sums.
//!
//! All values are immutable after construction; every function is a pure
//! function of its inputs, and runs are reproducible from their seed.

pub mod eigen;
pub mod error;
pub mod estimator;
pub mod gilbert;
pub mod negativity;
pub mod operator;
pub mod partition;
pub mod states;
pub mod witness;

pub use error::{Error, Result};
