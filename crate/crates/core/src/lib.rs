//! Numerical laboratory for generalized convexity properties of extended-real
//! functions on R^n.
//!
//! The crate checks quasiconvexity, quasimonotonicity of the Fréchet
//! subdifferential, and α-robust quasiconvexity (stability of quasiconvexity
//! under linear perturbations of norm below α) from two sides:
//!
//! * primal, straight from the segment definition, and
//! * dual, through sampled Fréchet subgradients,
//!
//! cross-validating the two routes against each other. When a property fails,
//! the checkers return a concrete, re-verifiable witness rather than a bare
//! boolean. All sampling is deterministic given a seed, so every witness and
//! every report is reproducible.
//!
//! Module map:
//!
//! * [`exprlang`] — a small expression language for user-defined functions,
//!   with `+∞` encoding "outside the domain".
//! * [`geometry`] — points, boxes, segments and seeded deterministic sampling.
//! * [`catalog`] — ground-truth functions with exact subdifferential oracles
//!   and certified property labels.
//! * [`subdiff`] — finite-difference gradients, subgradient membership tests,
//!   and linear perturbations.
//! * [`checks`] — the property checkers and the α* bracketing estimators.
//! * [`lemmas`] — harnesses for the mean value theorem and the constructive
//!   segment lemmas used by the robustness criteria.
//! * [`report`] — run configuration, suite orchestration and serializable
//!   reports.

pub mod catalog;
pub mod checks;
pub mod exprlang;
pub mod geometry;
pub mod lemmas;
pub mod report;
pub mod subdiff;

pub use catalog::{AlphaStarLabel, ExactSubdiff, FunctionHandle, GroundTruth};
pub use checks::{AlphaEstimate, AlphaMethod, CheckStatus, CheckVerdict, RobustParams, Witness};
pub use exprlang::{Expr, ExtReal};
pub use geometry::{BoxDomain, Point, SamplePlan, SegmentNeighborhood};
pub use subdiff::SubgradientSample;
