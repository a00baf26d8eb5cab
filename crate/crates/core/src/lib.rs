//! Belief-function toolkit: basic probability assignments (bpas) over frames of
//! up to 64 elements, Dempster's rule of combination, focal-element reduction
//! algorithms, pignistic decision metrics, and a seeded benchmark harness that
//! measures how reduction degrades decision quality.

pub mod approx;
pub mod bpa;
pub mod doc;
pub mod error;
pub mod frame;
pub mod metrics;
pub mod report;
pub mod set;
pub mod testbed;

pub use bpa::{Bpa, Combination, PignisticDist};
pub use error::EvidenceError;
pub use frame::Frame;
pub use set::FocalSet;

/// Tolerance for mass-sum checks (`|Σ m(A) - 1| <= MASS_EPSILON`).
pub const MASS_EPSILON: f64 = 1e-9;

/// Entries with mass below this threshold are pruned when a bpa is built
/// from validated or normalized input.
pub const PRUNE_EPSILON: f64 = 1e-12;
