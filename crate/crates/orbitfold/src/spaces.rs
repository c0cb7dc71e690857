//! Products of spheres in split coordinates, the target quotient sphere, and
//! join spaces over finite groups.
//!
//! A factor sphere `S^{m_i}` is stored as `(x, q)` with `x` a real vector of
//! length `m_i - d + 1` and `q` in the division algebra, `|x|^2 + |q|^2 = 1`.
//! Every projection formula in this crate is written in these coordinates.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{Field, KNum};
use crate::{EPS_UNIT, EPS_ZERO};

/// Errors from the sphere-product and join data model.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpacesError {
    #[error("invalid sphere spec: {0}")]
    InvalidSpec(String),
    #[error("factor {index}: |x|^2 + |q|^2 deviates from 1 by {deviation:.3e}")]
    FactorNorm { index: usize, deviation: f64 },
    #[error("factor {index}: expected x-part length {expected}, got {got}")]
    FactorShape { index: usize, expected: usize, got: usize },
    #[error("factor {index}: field {got}, spec requires {expected}")]
    FactorField { index: usize, expected: Field, got: Field },
    #[error("expected {expected} factors, got {got}")]
    FactorCount { expected: usize, got: usize },
    #[error("target point: squared norm deviates from 1 by {deviation:.3e}")]
    TargetNorm { deviation: f64 },
    #[error("target point: block {index} has length {got}, expected {expected}")]
    TargetShape { index: usize, expected: usize, got: usize },
    #[error("join point: coordinate {index} is negative ({value})")]
    NegativeBarycentric { index: usize, value: f64 },
    #[error("join point: barycentric coordinates sum to 1 {deviation:.3e} off")]
    BarycentricSum { deviation: f64 },
    #[error("join point: {got} barycentric coordinates for {expected} factor slots")]
    BarycentricShape { expected: usize, got: usize },
    #[error("json decode: {0}")]
    Json(String),
}

/// The shape of a product of spheres: the field and the factor dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereSpec {
    field: Field,
    dims: Vec<usize>,
}

impl SphereSpec {
    /// Requires `k >= 2` factors, each of dimension at least `d(field)`.
    pub fn new(field: Field, dims: Vec<usize>) -> Result<SphereSpec, SpacesError> {
        if dims.len() < 2 {
            return Err(SpacesError::InvalidSpec(format!("need k >= 2 factors, got {}", dims.len())));
        }
        let d = field.dim();
        for (i, &m) in dims.iter().enumerate() {
            if m < d {
                return Err(SpacesError::InvalidSpec(format!(
                    "factor {i} has dimension {m}, field {field} requires at least {d}"
                )));
            }
        }
        Ok(SphereSpec { field, dims })
    }

    pub fn field(&self) -> Field {
        self.field
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Number of factors.
    pub fn k(&self) -> usize {
        self.dims.len()
    }

    /// Length of the real block of factor `i`: `m_i - d + 1`.
    pub fn x_len(&self, i: usize) -> usize {
        self.dims[i] - self.field.dim() + 1
    }

    /// Dimension of the quotient sphere: `sum m_i - (d-1)(k-1)`.
    pub fn target_dim(&self) -> usize {
        let total: usize = self.dims.iter().sum();
        total - (self.field.dim() - 1) * (self.k() - 1)
    }

    /// Ambient dimension of the target sphere, `target_dim() + 1`.
    pub fn target_ambient_dim(&self) -> usize {
        self.target_dim() + 1
    }
}

/// A point of one factor sphere in split coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct SpherePoint {
    pub x: Vec<f64>,
    pub q: KNum,
}

impl SpherePoint {
    pub fn norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum::<f64>() + self.q.norm_sq()
    }
}

/// A point of the product `S^{m_1} x ... x S^{m_k}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductPoint {
    pub spec: SphereSpec,
    pub factors: Vec<SpherePoint>,
}

/// Checks the shape and unit-norm invariants of a product point.
///
/// The norm deviation is measured on `|x|^2 + |q|^2`, tolerance [`EPS_UNIT`].
pub fn validate_product_point(p: &ProductPoint) -> Result<(), SpacesError> {
    if p.factors.len() != p.spec.k() {
        return Err(SpacesError::FactorCount { expected: p.spec.k(), got: p.factors.len() });
    }
    for (i, f) in p.factors.iter().enumerate() {
        if f.q.field() != p.spec.field() {
            return Err(SpacesError::FactorField {
                index: i,
                expected: p.spec.field(),
                got: f.q.field(),
            });
        }
        if f.x.len() != p.spec.x_len(i) {
            return Err(SpacesError::FactorShape {
                index: i,
                expected: p.spec.x_len(i),
                got: f.x.len(),
            });
        }
        let deviation = (f.norm_sq() - 1.0).abs();
        if deviation > EPS_UNIT {
            return Err(SpacesError::FactorNorm { index: i, deviation });
        }
    }
    Ok(())
}

/// A point of the target sphere `S^m` in block coordinates `(x_1,...,x_k; w)`.
///
/// Valid points are unit vectors of the ambient `R^{m+1}`; see
/// [`TargetPoint::validate`].
#[derive(Debug, Clone, PartialEq)]
pub struct TargetPoint {
    pub xs: Vec<Vec<f64>>,
    pub w: KNum,
}

impl TargetPoint {
    pub fn norm_sq(&self) -> f64 {
        let xs: f64 = self.xs.iter().flatten().map(|v| v * v).sum();
        xs + self.w.norm_sq()
    }

    /// All ambient coordinates, blocks concatenated, `w` last.
    pub fn flat(&self) -> Vec<f64> {
        let mut out: Vec<f64> = self.xs.iter().flatten().copied().collect();
        out.extend_from_slice(self.w.coeffs());
        out
    }

    pub fn distance(&self, other: &TargetPoint) -> f64 {
        let a = self.flat();
        let b = other.flat();
        debug_assert_eq!(a.len(), b.len());
        a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
    }

    /// Checks block shapes against `spec` and the unit-norm invariant.
    pub fn validate(&self, spec: &SphereSpec) -> Result<(), SpacesError> {
        if self.xs.len() != spec.k() {
            return Err(SpacesError::FactorCount { expected: spec.k(), got: self.xs.len() });
        }
        for (i, block) in self.xs.iter().enumerate() {
            if block.len() != spec.x_len(i) {
                return Err(SpacesError::TargetShape {
                    index: i,
                    expected: spec.x_len(i),
                    got: block.len(),
                });
            }
        }
        if self.w.field() != spec.field() {
            return Err(SpacesError::FactorField {
                index: spec.k(),
                expected: spec.field(),
                got: self.w.field(),
            });
        }
        let deviation = (self.norm_sq() - 1.0).abs();
        if deviation > EPS_UNIT {
            return Err(SpacesError::TargetNorm { deviation });
        }
        Ok(())
    }
}

/// A finite stand-in for the compact Hausdorff factors of a join.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteSpace {
    pub labels: Vec<String>,
}

impl FiniteSpace {
    /// A space with `n >= 1` anonymous points.
    pub fn with_size(n: usize) -> FiniteSpace {
        assert!(n >= 1, "finite space must be nonempty");
        FiniteSpace { labels: (0..n).map(|i| format!("x{i}")).collect() }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// A point of one join factor `X_i * G`, written `(x, 1-t; g, t)`.
///
/// `t = 0` is the pure `X_i` end (the group slot is immaterial), `t = 1` the
/// pure group end (the `x` slot is immaterial).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JoinFactorPoint {
    pub x: usize,
    pub t: f64,
    pub g: usize,
}

impl JoinFactorPoint {
    pub fn new(x: usize, t: f64, g: usize) -> JoinFactorPoint {
        debug_assert!((0.0..=1.0).contains(&t));
        JoinFactorPoint { x, t, g }
    }

    /// Canonical representative of the identification class: the `x` slot is
    /// zeroed at `t = 1`, the `g` slot at `t = 0`.
    pub fn canonical(&self) -> JoinFactorPoint {
        let mut out = *self;
        if self.t >= 1.0 {
            out.x = 0;
        }
        if self.t <= 0.0 {
            out.g = 0;
        }
        out
    }
}

/// A point of the iterated join `X_1 * ... * X_k * G` with barycentric
/// coordinates `s_1, ..., s_k, s_{k+1}` (the last one for `G`).
#[derive(Debug, Clone, PartialEq)]
pub struct JoinTargetPoint {
    pub xs: Vec<usize>,
    pub g: usize,
    pub s: Vec<f64>,
}

impl JoinTargetPoint {
    /// Checks `s_j >= 0`, `sum s_j = 1` within 1e-12, and shape.
    pub fn validate(&self) -> Result<(), SpacesError> {
        if self.s.len() != self.xs.len() + 1 {
            return Err(SpacesError::BarycentricShape {
                expected: self.xs.len() + 1,
                got: self.s.len(),
            });
        }
        for (i, &v) in self.s.iter().enumerate() {
            if v < 0.0 {
                return Err(SpacesError::NegativeBarycentric { index: i, value: v });
            }
        }
        let deviation = (self.s.iter().sum::<f64>() - 1.0).abs();
        if deviation > 1e-12 {
            return Err(SpacesError::BarycentricSum { deviation });
        }
        Ok(())
    }
}

/// Canonical representative of a join identification class: every slot whose
/// barycentric coordinate is at most [`EPS_ZERO`] gets its point (or group)
/// index replaced by the sentinel 0 and the coordinate clamped to exactly 0.
///
/// Two inputs are join-equivalent iff their canonical forms are identical.
pub fn join_canonical(j: &JoinTargetPoint) -> JoinTargetPoint {
    let mut out = j.clone();
    let k = out.xs.len();
    for i in 0..k {
        if out.s[i] <= EPS_ZERO {
            out.s[i] = 0.0;
            out.xs[i] = 0;
        }
    }
    if out.s[k] <= EPS_ZERO {
        out.s[k] = 0.0;
        out.g = 0;
    }
    out
}

fn sample_unit_vector<R: Rng>(len: usize, rng: &mut R) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..len).map(|_| rng.sample(StandardNormal)).collect();
        let norm = v.iter().map(|a| a * a).sum::<f64>().sqrt();
        if norm > 1e-6 {
            return v.into_iter().map(|a| a / norm).collect();
        }
    }
}

/// Uniform point on one factor sphere: a normalized Gaussian ambient vector.
pub fn sample_sphere_point_with<R: Rng>(spec: &SphereSpec, i: usize, rng: &mut R) -> SpherePoint {
    let d = spec.field().dim();
    let ambient = sample_unit_vector(spec.x_len(i) + d, rng);
    let (x, q) = ambient.split_at(spec.x_len(i));
    SpherePoint {
        x: x.to_vec(),
        q: KNum::from_coeffs(spec.field(), q).expect("split matches field dim"),
    }
}

/// Deterministic uniform sample of the product of spheres.
pub fn sample_product_point(spec: &SphereSpec, seed: u64) -> ProductPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_product_point_with(spec, &mut rng)
}

/// As [`sample_product_point`] but drawing from a caller-provided generator.
pub fn sample_product_point_with<R: Rng>(spec: &SphereSpec, rng: &mut R) -> ProductPoint {
    let factors = (0..spec.k()).map(|i| sample_sphere_point_with(spec, i, rng)).collect();
    ProductPoint { spec: spec.clone(), factors }
}

/// Deterministic uniform sample of the target sphere `S^m`.
pub fn sample_target_point(spec: &SphereSpec, seed: u64) -> TargetPoint {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    sample_target_point_with(spec, &mut rng)
}

/// As [`sample_target_point`] but drawing from a caller-provided generator.
pub fn sample_target_point_with<R: Rng>(spec: &SphereSpec, rng: &mut R) -> TargetPoint {
    let ambient = sample_unit_vector(spec.target_ambient_dim(), rng);
    split_target(spec, &ambient)
}

/// Splits ambient target coordinates into blocks `(x_1,...,x_k; w)`.
pub fn split_target(spec: &SphereSpec, ambient: &[f64]) -> TargetPoint {
    debug_assert_eq!(ambient.len(), spec.target_ambient_dim());
    let mut xs = Vec::with_capacity(spec.k());
    let mut off = 0;
    for i in 0..spec.k() {
        xs.push(ambient[off..off + spec.x_len(i)].to_vec());
        off += spec.x_len(i);
    }
    let w = KNum::from_coeffs(spec.field(), &ambient[off..]).expect("remainder has field dim");
    TargetPoint { xs, w }
}

// --- JSON encodings -------------------------------------------------------
//
// ProductPoint: {"field": "R"|"C"|"H", "dims": [...], "factors": [{"x": [...], "q": [...]}]}
// TargetPoint:  {"xs": [[...]], "w": [...]}
// Numbers are written with 17 significant digits so decoding reproduces the
// exact f64 values.

#[derive(Serialize, Deserialize)]
struct FactorJson {
    x: Vec<f64>,
    q: Vec<f64>,
}

#[derive(Serialize, Deserialize)]
struct ProductPointJson {
    field: String,
    dims: Vec<usize>,
    factors: Vec<FactorJson>,
}

#[derive(Serialize, Deserialize)]
struct TargetPointJson {
    xs: Vec<Vec<f64>>,
    w: Vec<f64>,
}

struct SigFigFormatter;

impl serde_json::ser::Formatter for SigFigFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        write!(writer, "{value:.16e}")
    }
}

fn to_json_17<T: Serialize>(value: &T) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SigFigFormatter);
    value.serialize(&mut ser).expect("in-memory serialization cannot fail");
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

impl ProductPoint {
    pub fn to_json_string(&self) -> String {
        let doc = ProductPointJson {
            field: self.spec.field().letter().to_string(),
            dims: self.spec.dims().to_vec(),
            factors: self
                .factors
                .iter()
                .map(|f| FactorJson { x: f.x.clone(), q: f.q.coeffs().to_vec() })
                .collect(),
        };
        to_json_17(&doc)
    }

    /// Decodes and validates the JSON encoding.
    pub fn from_json_str(text: &str) -> Result<ProductPoint, SpacesError> {
        let doc: ProductPointJson =
            serde_json::from_str(text).map_err(|e| SpacesError::Json(e.to_string()))?;
        let field = Field::parse(&doc.field).map_err(|e| SpacesError::Json(e.to_string()))?;
        let spec = SphereSpec::new(field, doc.dims)?;
        let factors: Result<Vec<SpherePoint>, SpacesError> = doc
            .factors
            .iter()
            .map(|f| {
                let q = KNum::from_coeffs(field, &f.q)
                    .map_err(|e| SpacesError::Json(e.to_string()))?;
                Ok(SpherePoint { x: f.x.clone(), q })
            })
            .collect();
        let p = ProductPoint { spec, factors: factors? };
        validate_product_point(&p)?;
        Ok(p)
    }
}

impl TargetPoint {
    pub fn to_json_string(&self) -> String {
        let doc = TargetPointJson { xs: self.xs.clone(), w: self.w.coeffs().to_vec() };
        to_json_17(&doc)
    }

    /// Decodes the JSON encoding; the field is inferred from the length of `w`.
    pub fn from_json_str(text: &str) -> Result<TargetPoint, SpacesError> {
        let doc: TargetPointJson =
            serde_json::from_str(text).map_err(|e| SpacesError::Json(e.to_string()))?;
        let field = match doc.w.len() {
            1 => Field::Real,
            2 => Field::Complex,
            4 => Field::Quaternion,
            n => return Err(SpacesError::Json(format!("w has {n} coefficients, expected 1, 2, or 4"))),
        };
        let w = KNum::from_coeffs(field, &doc.w).map_err(|e| SpacesError::Json(e.to_string()))?;
        Ok(TargetPoint { xs: doc.xs, w })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real_spec(dims: &[usize]) -> SphereSpec {
        SphereSpec::new(Field::Real, dims.to_vec()).unwrap()
    }

    #[test]
    fn spec_rejects_small_dims() {
        assert!(SphereSpec::new(Field::Quaternion, vec![4, 3]).is_err());
        assert!(SphereSpec::new(Field::Complex, vec![2, 1]).is_err());
        assert!(SphereSpec::new(Field::Real, vec![1]).is_err());
        assert!(SphereSpec::new(Field::Real, vec![1, 1]).is_ok());
    }

    #[test]
    fn target_dimensions_by_field() {
        // real: sum m_i; complex: sum - (k-1); quaternionic: sum - 3(k-1)
        assert_eq!(real_spec(&[1, 1]).target_dim(), 2);
        assert_eq!(real_spec(&[2, 3, 2]).target_dim(), 7);
        assert_eq!(SphereSpec::new(Field::Complex, vec![2, 2]).unwrap().target_dim(), 3);
        assert_eq!(SphereSpec::new(Field::Complex, vec![2, 2, 2]).unwrap().target_dim(), 4);
        assert_eq!(SphereSpec::new(Field::Quaternion, vec![4, 4]).unwrap().target_dim(), 5);
        assert_eq!(SphereSpec::new(Field::Quaternion, vec![4, 5, 6]).unwrap().target_dim(), 9);
    }

    #[test]
    fn validate_accepts_simple_point() {
        let spec = real_spec(&[1, 1]);
        let p = ProductPoint {
            spec,
            factors: vec![
                SpherePoint { x: vec![0.6], q: KNum::real(0.8) },
                SpherePoint { x: vec![0.0], q: KNum::real(1.0) },
            ],
        };
        validate_product_point(&p).unwrap();
    }

    #[test]
    fn validate_reports_factor_and_deviation() {
        let spec = real_spec(&[1, 1]);
        let p = ProductPoint {
            spec,
            factors: vec![
                SpherePoint { x: vec![1.0], q: KNum::real(0.1) },
                SpherePoint { x: vec![0.0], q: KNum::real(1.0) },
            ],
        };
        match validate_product_point(&p) {
            Err(SpacesError::FactorNorm { index, deviation }) => {
                assert_eq!(index, 0);
                assert!((deviation - 0.01).abs() < 1e-12);
            }
            other => panic!("expected FactorNorm, got {other:?}"),
        }
    }

    #[test]
    fn validate_norm_boundary() {
        let spec = real_spec(&[1, 1]);
        let make = |dev: f64| ProductPoint {
            spec: spec.clone(),
            factors: vec![
                SpherePoint { x: vec![(1.0 + dev).sqrt()], q: KNum::real(0.0) },
                SpherePoint { x: vec![0.0], q: KNum::real(1.0) },
            ],
        };
        assert!(validate_product_point(&make(0.9 * EPS_UNIT)).is_ok());
        assert!(validate_product_point(&make(1.1 * EPS_UNIT)).is_err());
    }

    #[test]
    fn sampler_is_deterministic_and_valid() {
        let spec = SphereSpec::new(Field::Quaternion, vec![4, 5]).unwrap();
        let a = sample_product_point(&spec, 7);
        let b = sample_product_point(&spec, 7);
        assert_eq!(a, b);
        validate_product_point(&a).unwrap();
    }

    #[test]
    fn sampler_mean_on_s2() {
        // 1e4 uniform samples on S^2 (real, dims (1,1) -> first factor is S^1;
        // use a single S^2 through dims (2,1) factor 0): empirical mean of each
        // ambient coordinate stays within 0.05 of zero.
        let spec = real_spec(&[2, 1]);
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let n = 10_000;
        let mut mean = [0.0f64; 3];
        for _ in 0..n {
            let p = sample_sphere_point_with(&spec, 0, &mut rng);
            mean[0] += p.x[0];
            mean[1] += p.x[1];
            mean[2] += p.q.re();
        }
        for m in mean {
            assert!((m / n as f64).abs() < 0.05);
        }
    }

    #[test]
    fn finite_space_labels() {
        let x = FiniteSpace::with_size(3);
        assert_eq!(x.len(), 3);
        assert_eq!(x.labels, vec!["x0", "x1", "x2"]);
        assert!(!x.is_empty());
    }

    #[test]
    fn join_canonical_zeroes_immaterial_slots() {
        // vanishing group coefficient
        let j = JoinTargetPoint { xs: vec![3], g: 5, s: vec![1.0, 0.0] };
        let c = join_canonical(&j);
        assert_eq!(c, JoinTargetPoint { xs: vec![3], g: 0, s: vec![1.0, 0.0] });
        // vanishing space coefficient
        let j = JoinTargetPoint { xs: vec![3], g: 5, s: vec![0.0, 1.0] };
        let c = join_canonical(&j);
        assert_eq!(c, JoinTargetPoint { xs: vec![0], g: 5, s: vec![0.0, 1.0] });
        // no zero coefficient
        let j = JoinTargetPoint { xs: vec![3], g: 5, s: vec![0.5, 0.5] };
        assert_eq!(join_canonical(&j), j);
    }

    #[test]
    fn join_canonical_is_idempotent() {
        let j = JoinTargetPoint { xs: vec![1, 2], g: 3, s: vec![0.0, 0.75, 0.25] };
        let once = join_canonical(&j);
        assert_eq!(join_canonical(&once), once);
    }

    #[test]
    fn join_validate_checks_sum_and_sign() {
        let j = JoinTargetPoint { xs: vec![0, 0], g: 0, s: vec![0.5, 0.5, 0.1] };
        assert!(matches!(j.validate(), Err(SpacesError::BarycentricSum { .. })));
        let j = JoinTargetPoint { xs: vec![0, 0], g: 0, s: vec![-0.1, 1.0, 0.1] };
        assert!(matches!(j.validate(), Err(SpacesError::NegativeBarycentric { .. })));
    }

    #[test]
    fn product_point_json_roundtrip_exact() {
        let spec = SphereSpec::new(Field::Complex, vec![2, 3]).unwrap();
        let p = sample_product_point(&spec, 11);
        let text = p.to_json_string();
        let back = ProductPoint::from_json_str(&text).unwrap();
        assert_eq!(p, back);
    }

    #[test]
    fn target_point_json_roundtrip_exact() {
        let spec = SphereSpec::new(Field::Quaternion, vec![4, 4]).unwrap();
        let y = sample_target_point(&spec, 3);
        let back = TargetPoint::from_json_str(&y.to_json_string()).unwrap();
        assert_eq!(y, back);
        back.validate(&spec).unwrap();
    }

    #[test]
    fn product_json_rejects_invalid_point() {
        let text = r#"{"field":"R","dims":[1,1],"factors":[{"x":[1.0],"q":[0.1]},{"x":[0.0],"q":[1.0]}]}"#;
        assert!(matches!(
            ProductPoint::from_json_str(text),
            Err(SpacesError::FactorNorm { index: 0, .. })
        ));
    }
}
