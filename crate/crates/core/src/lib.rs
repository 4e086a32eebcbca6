//! Stable matchings of agents to programs whose quotas are bought at a
//! per-seat cost.
//!
//! The base object is a two-sided [`Market`] of strict preference lists.
//! An [`SmfqInstance`] adds a cost per program and has no upper quotas; a
//! solution must match every agent and leave no agent envying another.
//! An [`HrInstance`] carries fixed quotas instead.

pub mod approx;
pub mod bench;
pub mod error;
pub mod extension;
pub mod format;
pub mod generators;
pub mod hr;
pub mod minmax;
pub mod minsum;
pub mod model;
pub mod oracle;

pub use error::*;
pub use model::*;
