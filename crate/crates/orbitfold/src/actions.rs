//! The codiagonal torus action on products of spheres, its orbit invariant,
//! canonical orbit representatives, and the finite-group analogues on joins.
//!
//! The element `(r_1, ..., r_{k-1})` of `S(K)^{k-1}` sends the scalar
//! coordinates to `q_i -> r_{i-1} q_i r_i^{-1}` with `r_0 = r_k = 1`; the real
//! blocks never move. The tuple `(x_1, ..., x_k, q_1 q_2 ... q_k)` is constant
//! on orbits and separates them, so orbit equality is a plain comparison.

use thiserror::Error;

use crate::algebra::{Field, FiniteGroup, KNum, UnitK};
use crate::spaces::{JoinFactorPoint, ProductPoint};
use crate::EPS_ZERO;

/// Default tolerance for [`orbit_equal`]: one order above the arithmetic
/// error accumulated by products of length `k <= 8`.
pub const ORBIT_TOL: f64 = 1e-9;

/// Errors from action arguments that do not fit together.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("field mismatch: point is over {point}, torus element over {torus}")]
    FieldMismatch { point: Field, torus: Field },
    #[error("arity mismatch: point has {factors} factors, acting tuple has {torus} components")]
    ArityMismatch { factors: usize, torus: usize },
    #[error("points live on different sphere products")]
    SpecMismatch,
    #[error("sign pattern has odd parity, not an element of G_k")]
    OddParity,
    #[error("sign patterns act on the real case only, point is over {0}")]
    FieldNotReal(Field),
    #[error("group element index {index} out of range for group of order {order}")]
    GroupIndex { index: usize, order: usize },
}

/// An element `(r_1, ..., r_{k-1})` of the torus `S(K)^{k-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TorusElement {
    field: Field,
    r: Vec<UnitK>,
}

impl TorusElement {
    pub fn new(field: Field, r: Vec<UnitK>) -> TorusElement {
        debug_assert!(r.iter().all(|u| u.field() == field));
        TorusElement { field, r }
    }

    pub fn identity(field: Field, len: usize) -> TorusElement {
        TorusElement { field, r: vec![UnitK::one(field); len] }
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    pub fn components(&self) -> &[UnitK] {
        &self.r
    }

    /// Componentwise product `(r s)_i = r_i s_i`.
    pub fn compose(&self, other: &TorusElement) -> TorusElement {
        debug_assert_eq!(self.field, other.field);
        debug_assert_eq!(self.r.len(), other.r.len());
        let r = self.r.iter().zip(&other.r).map(|(a, b)| *a * *b).collect();
        TorusElement { field: self.field, r }
    }

    /// Uniform sample of the torus.
    pub fn sample<R: rand::Rng>(field: Field, len: usize, rng: &mut R) -> TorusElement {
        TorusElement { field, r: (0..len).map(|_| KNum::sample_unit(field, rng)).collect() }
    }
}

fn check_arity(p: &ProductPoint, r: &TorusElement) -> Result<(), ActionError> {
    if p.spec.field() != r.field() {
        return Err(ActionError::FieldMismatch { point: p.spec.field(), torus: r.field() });
    }
    if p.factors.len() != r.len() + 1 {
        return Err(ActionError::ArityMismatch { factors: p.factors.len(), torus: r.len() });
    }
    Ok(())
}

/// The codiagonal action: `q_i -> r_{i-1} q_i r_i^{-1}`, `r_0 = r_k = 1`.
pub fn act(p: &ProductPoint, r: &TorusElement) -> Result<ProductPoint, ActionError> {
    check_arity(p, r)?;
    let k = p.factors.len();
    let one = UnitK::one(r.field());
    let mut out = p.clone();
    for i in 0..k {
        let left = if i == 0 { one } else { r.components()[i - 1] };
        let right = if i == k - 1 { one } else { r.components()[i] };
        out.factors[i].q = left.value() * p.factors[i].q * right.inverse().value();
    }
    Ok(out)
}

/// The orbit invariant `(x_1, ..., x_k, q_1 q_2 ... q_k)`, not normalized.
///
/// For valid product points its squared norm is at least `1 - 1e-9`.
#[derive(Debug, Clone, PartialEq)]
pub struct OrbitInvariant {
    pub xs: Vec<Vec<f64>>,
    pub w: KNum,
}

impl OrbitInvariant {
    pub fn norm_sq(&self) -> f64 {
        self.xs.iter().flatten().map(|v| v * v).sum::<f64>() + self.w.norm_sq()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.xs.iter().flatten().copied().collect();
        out.extend_from_slice(self.w.coeffs());
        out
    }

    pub fn distance(&self, other: &OrbitInvariant) -> f64 {
        let a = self.flat();
        let b = other.flat();
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }
}

/// The separating orbit invariant: real blocks plus the ordered product of
/// the scalar coordinates.
pub fn raw_invariant(p: &ProductPoint) -> OrbitInvariant {
    let xs = p.factors.iter().map(|f| f.x.clone()).collect();
    let mut w = KNum::one(p.spec.field());
    for f in &p.factors {
        w = w * f.q;
    }
    OrbitInvariant { xs, w }
}

/// Whether two points lie on the same orbit, decided by comparing invariants
/// at tolerance `tol` (use [`ORBIT_TOL`] unless a caller needs otherwise).
pub fn orbit_equal(p: &ProductPoint, q: &ProductPoint, tol: f64) -> Result<bool, ActionError> {
    if p.spec != q.spec {
        return Err(ActionError::SpecMismatch);
    }
    Ok(raw_invariant(p).distance(&raw_invariant(q)) <= tol)
}

/// Moves `p` inside its orbit to the representative with `q_1, ..., q_{k-1}`
/// real and nonnegative; returns the representative and the torus element
/// used, so `act(p, r) = p*`.
///
/// Sweeps left to right accumulating phases: `r_i = unit(r_{i-1} q_i)` when
/// `|q_i|` is nonzero, else the phase carries forward unchanged.
pub fn canonicalize(p: &ProductPoint) -> (ProductPoint, TorusElement) {
    let field = p.spec.field();
    let k = p.factors.len();
    let mut r = Vec::with_capacity(k - 1);
    let mut carry = UnitK::one(field);
    for i in 0..k - 1 {
        let rotated = carry.value() * p.factors[i].q;
        if rotated.norm() > EPS_ZERO {
            carry = rotated.unit().expect("norm above threshold");
        }
        r.push(carry);
    }
    let torus = TorusElement::new(field, r);
    let moved = act(p, &torus).expect("canonicalize builds a matching torus element");
    (moved, torus)
}

/// The codiagonal action of `G^{k-1}` on `prod (X_i * G)`: group slots
/// transform as `g_i -> r_{i-1} g_i r_i^{-1}`, the `x` and `t` slots are
/// fixed.
pub fn join_act(
    group: &FiniteGroup,
    r: &[usize],
    factors: &[JoinFactorPoint],
) -> Result<Vec<JoinFactorPoint>, ActionError> {
    let k = factors.len();
    if r.len() + 1 != k {
        return Err(ActionError::ArityMismatch { factors: k, torus: r.len() });
    }
    let n = group.order();
    for &g in r.iter().chain(factors.iter().map(|f| &f.g)) {
        if g >= n {
            return Err(ActionError::GroupIndex { index: g, order: n });
        }
    }
    let out = factors
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let left = if i == 0 { group.identity() } else { r[i - 1] };
            let right = if i == k - 1 { group.identity() } else { group.inverse(r[i]) };
            JoinFactorPoint { g: group.mul(group.mul(left, f.g), right), ..*f }
        })
        .collect();
    Ok(out)
}

/// An even sign pattern: an element of the orientation-preserving subgroup
/// `G_k` of `Z_2^k` acting by flipping scalar coordinates.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignPattern {
    eps: Vec<i8>,
}

impl SignPattern {
    /// Requires an even number of `-1` entries.
    pub fn new(eps: Vec<i8>) -> Result<SignPattern, ActionError> {
        debug_assert!(eps.iter().all(|&e| e == 1 || e == -1));
        let flips = eps.iter().filter(|&&e| e == -1).count();
        if flips % 2 != 0 {
            return Err(ActionError::OddParity);
        }
        Ok(SignPattern { eps })
    }

    pub fn signs(&self) -> &[i8] {
        &self.eps
    }

    pub fn len(&self) -> usize {
        self.eps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eps.is_empty()
    }
}

/// Flips the scalar coordinates of a real product point: `q_i -> eps_i q_i`.
pub fn real_act(p: &ProductPoint, e: &SignPattern) -> Result<ProductPoint, ActionError> {
    if p.spec.field() != Field::Real {
        return Err(ActionError::FieldNotReal(p.spec.field()));
    }
    if e.len() != p.factors.len() {
        return Err(ActionError::ArityMismatch { factors: p.factors.len(), torus: e.len() });
    }
    let mut out = p.clone();
    for (f, &sign) in out.factors.iter_mut().zip(e.signs()) {
        f.q = f.q.scale(f64::from(sign));
    }
    Ok(out)
}

/// All `2^{k-1}` even sign patterns of length `k`.
pub fn real_group(k: usize) -> Vec<SignPattern> {
    (0u32..1 << k)
        .filter(|mask| mask.count_ones() % 2 == 0)
        .map(|mask| {
            let eps = (0..k).map(|i| if mask >> i & 1 == 1 { -1 } else { 1 }).collect();
            SignPattern::new(eps).expect("mask has even popcount")
        })
        .collect()
}

/// The codiagonal action on unconstrained `K^k`; norms `|q_i|` and the
/// ordered product `q_1 ... q_k` are preserved.
pub fn euclid_act(q: &[KNum], r: &TorusElement) -> Result<Vec<KNum>, ActionError> {
    let k = q.len();
    if let Some(bad) = q.iter().find(|v| v.field() != r.field()) {
        return Err(ActionError::FieldMismatch { point: bad.field(), torus: r.field() });
    }
    if r.len() + 1 != k {
        return Err(ActionError::ArityMismatch { factors: k, torus: r.len() });
    }
    let one = UnitK::one(r.field());
    let out = (0..k)
        .map(|i| {
            let left = if i == 0 { one } else { r.components()[i - 1] };
            let right = if i == k - 1 { one } else { r.components()[i] };
            left.value() * q[i] * right.inverse().value()
        })
        .collect();
    Ok(out)
}
