//! Division algebras over the reals and finite groups by multiplication table.
//!
//! [`KNum`] holds an element of R, C, or H as real coefficients in the basis
//! `(1, i, j, k)` with `ij = k`, real part first. Since R and C sit inside H
//! with the same basis, one quaternion product implements all three algebras.

mod group;

pub use group::{fg_load, FiniteGroup, GroupError};

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rand::Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::{EPS_UNIT, EPS_ZERO};

/// The base division algebra: R, C, or H.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Field {
    Real,
    Complex,
    Quaternion,
}

impl Field {
    /// Dimension over the reals: 1, 2, or 4.
    pub fn dim(self) -> usize {
        match self {
            Field::Real => 1,
            Field::Complex => 2,
            Field::Quaternion => 4,
        }
    }

    /// One-letter name used in file formats and CLI flags.
    pub fn letter(self) -> char {
        match self {
            Field::Real => 'R',
            Field::Complex => 'C',
            Field::Quaternion => 'H',
        }
    }

    /// Parses `R`, `C`, or `H` (case-insensitive).
    pub fn parse(s: &str) -> Result<Field, AlgebraError> {
        match s.trim() {
            "R" | "r" => Ok(Field::Real),
            "C" | "c" => Ok(Field::Complex),
            "H" | "h" => Ok(Field::Quaternion),
            other => Err(AlgebraError::UnknownField(other.to_string())),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Errors from division-algebra operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error("incompatible algebras: {0} vs {1}")]
    TagMismatch(Field, Field),
    #[error("division by (near-)zero element, |a| = {norm:.3e}")]
    DivisionByZero { norm: f64 },
    #[error("not a unit element: | |a|^2 - 1 | = {deviation:.3e} exceeds {EPS_UNIT:.0e}")]
    NotUnit { deviation: f64 },
    #[error("coefficient list has length {got}, field {field} needs {expected}")]
    BadCoefficientCount { field: Field, expected: usize, got: usize },
    #[error("unknown field tag {0:?}, expected R, C, or H")]
    UnknownField(String),
}

/// An element of R, C, or H, stored as real coefficients, real part first.
///
/// Unused coefficients (the `j`, `k` parts of a complex number, the imaginary
/// parts of a real) are kept at zero, so the quaternion product below is the
/// correct product in every field.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KNum {
    field: Field,
    c: [f64; 4],
}

impl KNum {
    pub fn real(x: f64) -> KNum {
        KNum { field: Field::Real, c: [x, 0.0, 0.0, 0.0] }
    }

    pub fn complex(re: f64, im: f64) -> KNum {
        KNum { field: Field::Complex, c: [re, im, 0.0, 0.0] }
    }

    pub fn quaternion(w: f64, x: f64, y: f64, z: f64) -> KNum {
        KNum { field: Field::Quaternion, c: [w, x, y, z] }
    }

    pub fn zero(field: Field) -> KNum {
        KNum { field, c: [0.0; 4] }
    }

    /// The real scalar `x` embedded in `field`.
    pub fn scalar(field: Field, x: f64) -> KNum {
        KNum { field, c: [x, 0.0, 0.0, 0.0] }
    }

    pub fn one(field: Field) -> KNum {
        KNum { field, c: [1.0, 0.0, 0.0, 0.0] }
    }

    /// Builds an element from exactly `field.dim()` coefficients.
    pub fn from_coeffs(field: Field, coeffs: &[f64]) -> Result<KNum, AlgebraError> {
        if coeffs.len() != field.dim() {
            return Err(AlgebraError::BadCoefficientCount {
                field,
                expected: field.dim(),
                got: coeffs.len(),
            });
        }
        let mut c = [0.0; 4];
        c[..coeffs.len()].copy_from_slice(coeffs);
        Ok(KNum { field, c })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    /// The `field.dim()` real coefficients, real part first.
    pub fn coeffs(&self) -> &[f64] {
        &self.c[..self.field.dim()]
    }

    pub fn re(&self) -> f64 {
        self.c[0]
    }

    pub fn norm_sq(&self) -> f64 {
        self.c.iter().map(|v| v * v).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn conj(&self) -> KNum {
        KNum { field: self.field, c: [self.c[0], -self.c[1], -self.c[2], -self.c[3]] }
    }

    pub fn scale(&self, s: f64) -> KNum {
        KNum { field: self.field, c: self.c.map(|v| v * s) }
    }

    /// Algebra product, failing on mixed fields.
    pub fn checked_mul(&self, rhs: &KNum) -> Result<KNum, AlgebraError> {
        if self.field != rhs.field {
            return Err(AlgebraError::TagMismatch(self.field, rhs.field));
        }
        Ok(self.mul_unchecked(rhs))
    }

    fn mul_unchecked(&self, rhs: &KNum) -> KNum {
        let [a, b, c, d] = self.c;
        let [e, f, g, h] = rhs.c;
        KNum {
            field: self.field,
            c: [
                a * e - b * f - c * g - d * h,
                a * f + b * e + c * h - d * g,
                a * g - b * h + c * e + d * f,
                a * h + b * g - c * f + d * e,
            ],
        }
    }

    /// Multiplicative inverse `conj(a) / |a|^2`.
    pub fn inv(&self) -> Result<KNum, AlgebraError> {
        let n2 = self.norm_sq();
        if n2.sqrt() <= EPS_ZERO {
            return Err(AlgebraError::DivisionByZero { norm: n2.sqrt() });
        }
        Ok(self.conj().scale(1.0 / n2))
    }

    /// Normalizes to unit length; fails near zero.
    pub fn unit(&self) -> Result<UnitK, AlgebraError> {
        let n = self.norm();
        if n <= EPS_ZERO {
            return Err(AlgebraError::DivisionByZero { norm: n });
        }
        Ok(UnitK(self.scale(1.0 / n)))
    }

    /// Standard Gaussian on each coefficient.
    pub fn sample_gaussian<R: Rng>(field: Field, rng: &mut R) -> KNum {
        let mut c = [0.0; 4];
        for v in c.iter_mut().take(field.dim()) {
            *v = rng.sample(StandardNormal);
        }
        KNum { field, c }
    }

    /// Uniform on the unit sphere of the algebra.
    pub fn sample_unit<R: Rng>(field: Field, rng: &mut R) -> UnitK {
        loop {
            let q = KNum::sample_gaussian(field, rng);
            if let Ok(u) = q.unit() {
                return u;
            }
        }
    }
}

impl Mul for KNum {
    type Output = KNum;

    /// Panics on mixed fields; use [`KNum::checked_mul`] for fallible code paths.
    fn mul(self, rhs: KNum) -> KNum {
        assert_eq!(self.field, rhs.field, "KNum field mismatch: {} vs {}", self.field, rhs.field);
        self.mul_unchecked(&rhs)
    }
}

impl Add for KNum {
    type Output = KNum;
    fn add(self, rhs: KNum) -> KNum {
        assert_eq!(self.field, rhs.field, "KNum field mismatch: {} vs {}", self.field, rhs.field);
        let mut c = self.c;
        for (a, b) in c.iter_mut().zip(rhs.c) {
            *a += b;
        }
        KNum { field: self.field, c }
    }
}

impl Sub for KNum {
    type Output = KNum;
    fn sub(self, rhs: KNum) -> KNum {
        self + (-rhs)
    }
}

impl Neg for KNum {
    type Output = KNum;
    fn neg(self) -> KNum {
        self.scale(-1.0)
    }
}

/// A unit-norm element of R, C, or H; inversion is conjugation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitK(KNum);

impl UnitK {
    /// Validates `| |q|^2 - 1 | <= EPS_UNIT`.
    pub fn new(q: KNum) -> Result<UnitK, AlgebraError> {
        let deviation = (q.norm_sq() - 1.0).abs();
        if deviation > EPS_UNIT {
            return Err(AlgebraError::NotUnit { deviation });
        }
        Ok(UnitK(q))
    }

    pub fn one(field: Field) -> UnitK {
        UnitK(KNum::one(field))
    }

    pub fn value(&self) -> KNum {
        self.0
    }

    pub fn field(&self) -> Field {
        self.0.field
    }

    /// Inverse of a unit element is its conjugate.
    pub fn inverse(&self) -> UnitK {
        UnitK(self.0.conj())
    }
}

impl Mul for UnitK {
    type Output = UnitK;
    fn mul(self, rhs: UnitK) -> UnitK {
        UnitK(self.0 * rhs.0)
    }
}

/// Algebra product of two elements sharing a field tag.
pub fn kmul(a: &KNum, b: &KNum) -> Result<KNum, AlgebraError> {
    a.checked_mul(b)
}

/// Euclidean norm of the coefficient vector.
pub fn knorm(a: &KNum) -> f64 {
    a.norm()
}

/// Conjugation: negates the imaginary coefficients.
pub fn kconj(a: &KNum) -> KNum {
    a.conj()
}

/// Multiplicative inverse; errors for `|a| <= 1e-12`.
pub fn kinv(a: &KNum) -> Result<KNum, AlgebraError> {
    a.inv()
}

/// `a / |a|`; errors for `|a| <= 1e-12`.
pub fn unit_of(a: &KNum) -> Result<UnitK, AlgebraError> {
    a.unit()
}

/// Ordered (left-to-right) product `q_1 q_2 ... q_k`.
///
/// Quaternions do not commute; every product of scalar coordinates in this
/// crate uses this order.
pub fn ordered_product(qs: &[KNum]) -> KNum {
    let mut acc = KNum::one(qs[0].field());
    for q in qs {
        acc = acc * *q;
    }
    acc
}
