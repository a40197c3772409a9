//! Query-counted learners for shuffled monotone functions and halfspaces
//! with normal vectors from a known set.
//!
//! Given n elements, D orderings of them, and query access to a labeling
//! that is monotone under at least one ordering, the learners here recover
//! the labeling exactly in O(D + log n) queries, approximately in
//! O(D + log(1/eps)) queries, or tolerantly (surviving a small adversarial
//! corruption) in O(log D * min(D + log(1/(eps delta)), 1/(eps delta)))
//! queries. Geometric front-ends reduce point sets and direction sets to
//! this form by sorting projections.
//!
//! The crate also ships the verification side: brute-force distance and
//! realizability oracles, the exhaustive small-case driver, lower-bound
//! instance generators, and a query-counting label oracle, so every
//! guarantee can be checked at desk scale.

pub mod approx;
pub mod error;
pub mod exact;
pub mod generators;
pub mod geometry;
pub mod instance;
pub mod io;
pub mod oracle;
pub mod ror;
pub mod rng;
pub mod trace;
pub mod verify;

pub use error::{InstanceError, LearnError};
pub use instance::{PlantedTruth, ShuffledInstance, ThresholdHypothesis};
pub use oracle::{LabelOracle, LabelSource};
