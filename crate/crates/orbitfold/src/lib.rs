//! Quotient maps of torus actions on products of spheres.
//!
//! The codiagonal action of the real, complex, or quaternionic torus
//! `S(K)^{k-1}` on `S^{m_1} x ... x S^{m_k}` has orbit space homeomorphic to a
//! sphere, with the projection given by an explicit invariant: keep the real
//! blocks and multiply the scalar coordinates. This crate implements
//!
//! * the division algebras R/C/H and finite groups by multiplication table
//!   ([`algebra`]),
//! * the sphere-product data model and join spaces ([`spaces`]),
//! * the group actions, orbit invariants and canonical representatives
//!   ([`actions`]),
//! * the quotient projections, their constructive inverse by bisection on the
//!   scaling parameter, the join quotient for finite groups, and the local
//!   orbit-space model `K^k / S(K)^{k-1} = R^(d+k-1)` ([`quotient`]),
//! * numerical verification: Jacobian determinants, submersion ranks, fiber
//!   enumeration of the real branched covering, exhaustive join bijectivity,
//!   and derived lower bounds ([`verify`]).
//!
//! All operations are pure and deterministic for a fixed seed; sample batches
//! may run on any number of Rayon workers without changing results.

pub mod actions;
pub mod algebra;
pub mod quotient;
pub mod spaces;
pub mod verify;

/// Norms below this count as zero (invertibility threshold).
pub const EPS_ZERO: f64 = 1e-12;

/// Tolerance on `|v|^2 - 1` for membership in a unit sphere.
pub const EPS_UNIT: f64 = 1e-9;
