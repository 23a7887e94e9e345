//! Correlation-based network filtering for multivariate yield series.
//!
//! The pipeline runs from a [`YieldPanel`](ingest::YieldPanel) through
//! sliding windows and (conditional) correlation matrices to metric distance
//! matrices, four filtered networks, per-network statistics, and
//! exponential random graph models with nodal covariates.

#![allow(clippy::needless_range_loop)]

pub mod correlation;
pub mod ergm;
pub mod error;
pub mod filter;
pub mod ingest;
pub mod netmetrics;
mod stats;

pub use correlation::{CorrKind, CorrelationMatrix, DistanceMatrix};
pub use error::{Error, Result};
pub use filter::{FilteredNetwork, Method};
pub use ingest::{SummaryRow, WindowSpec, YieldPanel};
pub use netmetrics::{NetworkStats, RollingSeries};
