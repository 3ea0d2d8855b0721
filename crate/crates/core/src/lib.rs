//! Construction and exact analysis of multipartite Bell-type inequalities.
//!
//! The crate builds linear functionals over correlation experiments
//! (correlation, joint-probability, and general-event forms), computes their
//! tight local-hidden-variable bounds by exact enumeration over hypercube
//! vertices / block assignments / outcome grids, evaluates them on concrete
//! behaviors and quantum states, and decides LHV membership of behaviors by
//! linear feasibility over deterministic strategies.
//!
//! Enumeration fans out over partitioned index ranges with rayon when the
//! default `parallel` feature is enabled; results are bit-identical for any
//! worker count because the partition and the merge order are fixed. Build
//! with `--no-default-features` for a fully sequential core.

pub mod behaviors;
mod error;
pub mod forms;
pub mod generators;
pub mod quantum;
pub mod scenario;

pub use error::{Error, Result};
