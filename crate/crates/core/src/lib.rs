//! Leaky noisy-OR belief networks and their two-level abstraction.
//!
//! * [`network`], [`noisy_or`], [`sampling`]: the model, its local semantics
//!   and seeded ancestral sampling.
//! * [`reduction`]: eliminating intermediate (IPS) nodes to get a
//!   disease → finding network.
//! * [`inference`]: exact posteriors, the ground truth for everything else.
//! * [`analysis`]: closed-form predictors of the reduction's error.
//! * [`experiment`]: synthetic networks, phased test cases and paired t-tests
//!   comparing full and reduced networks.
//! * [`format`]: the `nornet 1` network file and the CSV reports.

pub mod analysis;
pub mod experiment;
pub mod format;
pub mod inference;
pub mod network;
pub mod noisy_or;
pub mod reduction;
pub mod sampling;

pub use inference::{posterior, PosteriorResult};
pub use network::{validate, Assignment, Edge, Network, Node, NodeId, NodeKind, Violation};
pub use reduction::{level_reduce, ReductionReport};
