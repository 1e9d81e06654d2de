//! Place tables and the global identities relating the height of the
//! canonical Gross-Schoen cycle to per-place invariants, the Faltings height
//! and the admissible self-intersection of the dualizing sheaf.
//!
//! Finite-place quantities are exact rationals. A local weight `log Nv` is
//! either an exact rational (a formal unit) or a float; sums keep the exact
//! part separate from the float part. Infinite places enter with weight one.

mod autofill;
mod identities;
pub mod synthetic;
mod sweep;
mod table;

pub use autofill::graph_autofill;
pub use identities::{
    assemble, place_contributions, IDENTITY_TOL, conjecture_report, faltings_from_chi18, faltings_route_height, gs_height, noether_check,
    omega_bar_from_hat, zhang_identity, AssemblyReport, ConjectureReport, PlaceContribution,
};
pub use sweep::{kappa_sweep, ols, Fit, SweepFailure, SweepOutcome, SweepRow, SWEEP_CSV_HEADER};
pub use table::{FinitePlace, InfinitePlace, LogNv, Mixed, PlaceTable};

use crate::electrical::ElectricalError;
use crate::genus3::Genus3Error;
use crate::periods::PeriodError;
use crate::pmgraph::GraphError;
use crate::siegel::SiegelError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum HeightError {
    #[error("place {place}: missing field {field}")]
    MissingField { place: String, field: &'static str },
    #[error("genus {0} not supported here")]
    WrongGenus(u32),
    #[error("place {place}: {field} provided as {provided} but the attached graph gives {derived}")]
    FieldConflict {
        place: String,
        field: &'static str,
        provided: String,
        derived: String,
    },
    #[error("place {place}: log Nv must be positive")]
    NonPositiveLogNorm { place: String },
    #[error("malformed place table: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Electrical(#[from] ElectricalError),
    #[error(transparent)]
    Genus3(#[from] Genus3Error),
    #[error(transparent)]
    Siegel(#[from] SiegelError),
    #[error(transparent)]
    Period(#[from] PeriodError),
}

#[cfg(test)]
mod tests;
