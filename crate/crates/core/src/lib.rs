//! Exact invariants of polarized metrized graphs, Siegel theta numerics,
//! period matrices of superelliptic curves, and the bookkeeping that turns
//! per-place data into the height of a canonical Gross-Schoen cycle on a
//! genus-three curve.

pub mod electrical;
pub mod genus3;
pub mod heights;
pub mod periods;
pub mod pmgraph;
pub mod rational;
pub mod siegel;

pub use electrical::InvariantReport;
pub use pmgraph::{DeltaVector, EdgeType, GraphError, PmGraph};
pub use rational::Rational;
