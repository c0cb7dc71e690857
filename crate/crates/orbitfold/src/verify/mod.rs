//! Numerical and exhaustive verification of the quotient-map constructions:
//! Jacobian determinants against finite differences, submersion ranks,
//! branched-covering fibers, exhaustive join bijectivity for finite groups,
//! the local orbit-space model, and the derived lower bounds.
//!
//! Every suite emits a [`Report`] that is byte-identical across reruns with
//! the same seed, at any Rayon worker count; per-sample generators are
//! derived from `(seed, index)` and aggregation is order-independent.

mod bounds;
mod fiber;
mod jacobian;
mod join;
mod local;
mod rank;
mod report;
mod sphere;

pub use bounds::{derived_bounds_verify, grid_min_invariant_bound, grid_min_normalizing_factor};
pub use fiber::{expected_fiber_size, fiber_real};
pub use jacobian::{
    case_a_chart_coords, case_a_det, case_a_extended_map, case_b_det, case_b_matrix, jacobian_fd,
    jacobian_verify, CASE_A_DIMS,
};
pub use join::{join_exhaustive, JoinExhaustiveConfig};
pub use local::local_model_verify;
pub use rank::{
    ambient_coords, degenerate_point, product_tangent_frame, project_ambient,
    projection_differential, rank_at, rank_at_with, rank_specs, rank_verify,
};
pub use report::{sample_rng, CheckOutcome, Report, ReportBuilder, SampleRow, SuiteRun, Tolerances};
pub use sphere::{
    degenerate_real_target, sample_target_w_zero, sample_target_xs_zero, sphere_quotient_verify,
};

use thiserror::Error;

use crate::actions::ActionError;
use crate::algebra::Field;
use crate::quotient::QuotientError;
use crate::spaces::SpacesError;

/// Errors from the verification suites.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum VerifyError {
    #[error("operation is defined for the real case only, got {0}")]
    NotRealField(Field),
    #[error("scalar coordinate {index} vanishes: point is off the case-(A) chart, use case (B)")]
    CaseAStratum { index: usize },
    #[error("leading block coordinate vanishes: point is off the case-(B) chart")]
    CaseBStratum,
    #[error("enumeration of {tuples} tuples exceeds the cap of {cap}")]
    ResourceCap { tuples: u128, cap: u64 },
    #[error("{0}")]
    InvalidArg(String),
    #[error(transparent)]
    Quotient(#[from] QuotientError),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Space(#[from] SpacesError),
}
