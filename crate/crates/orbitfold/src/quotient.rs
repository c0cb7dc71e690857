//! The quotient projections onto the orbit-space spheres, their constructive
//! inverse, the join quotient map for finite groups, and the local model of
//! the orbit space `K^k / S(K)^{k-1}`.
//!
//! The projection keeps the real blocks, multiplies the scalar coordinates,
//! and normalizes. Its inverse scales a target point by the parameter `mu`
//! solving `prod_i sqrt(1 - mu^2 |t_i|^2) = mu |w|`; the left side decreases
//! strictly on `(0, mu_0)` while the right side increases, so bisection on
//! the difference always converges.

use thiserror::Error;

use crate::actions::raw_invariant;
use crate::algebra::{ordered_product, FiniteGroup, KNum};
use crate::spaces::{
    join_canonical, JoinFactorPoint, JoinTargetPoint, ProductPoint, SpacesError, SpherePoint,
    SphereSpec, TargetPoint,
};
use crate::EPS_ZERO;

/// Errors from quotient-map operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuotientError {
    #[error("invalid target point: {0}")]
    InvalidTarget(#[from] SpacesError),
    #[error("mu_root: block norms and |w| must form a unit vector, deviation {deviation:.3e}")]
    NotUnitData { deviation: f64 },
    #[error("mu_root: tau[{index}] = {value} outside [0, 1]")]
    TauOutOfRange { index: usize, value: f64 },
    #[error("mu_root: no positive block norm, the scaling interval is unbounded")]
    NoPositiveTau,
    #[error("mu_root: |w| must be positive, got {0}")]
    NonPositiveTnorm(f64),
    #[error("orthant point has negative coordinate {value} at index {index}")]
    NegativeOrthant { index: usize, value: f64 },
}

/// The canonical projection: `raw_invariant(p)` divided by its norm.
///
/// The denominator is at least `1 - 1e-9` for valid points, so the output is
/// a unit vector of the target sphere and the map is constant on orbits.
pub fn project(p: &ProductPoint) -> TargetPoint {
    let inv = raw_invariant(p);
    let norm = inv.norm();
    debug_assert!(norm > 0.5, "projection denominator collapsed: {norm}");
    let xs = inv.xs.iter().map(|b| b.iter().map(|v| v / norm).collect()).collect();
    TargetPoint { xs, w: inv.w.scale(1.0 / norm) }
}

/// Result of [`mu_root`]: the scaling parameter, the bisection step count,
/// and the residual of the defining equation at the returned value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MuRoot {
    pub mu: f64,
    pub iterations: usize,
    pub residual: f64,
}

const MAX_BISECTION_STEPS: usize = 200;

/// Solves `prod_i sqrt(1 - mu^2 tau_i^2) = mu * tnorm` for the unique root in
/// `(0, mu_0)`, `mu_0 = 1 / max tau_i`, by bisection on the strictly
/// decreasing difference.
///
/// `(taus, tnorm)` must be the block norms of a unit target point with
/// `tnorm > 0` and at least one positive `tau_i`. The returned `mu` always
/// satisfies `difference(mu) >= 0`, so every factor `1 - mu^2 tau_i^2` stays
/// strictly positive.
pub fn mu_root(taus: &[f64], tnorm: f64) -> Result<MuRoot, QuotientError> {
    for (index, &t) in taus.iter().enumerate() {
        if !(0.0..=1.0).contains(&t) {
            return Err(QuotientError::TauOutOfRange { index, value: t });
        }
    }
    if tnorm <= 0.0 {
        return Err(QuotientError::NonPositiveTnorm(tnorm));
    }
    let sum_sq = taus.iter().map(|t| t * t).sum::<f64>() + tnorm * tnorm;
    let deviation = (sum_sq - 1.0).abs();
    if deviation > crate::EPS_UNIT {
        return Err(QuotientError::NotUnitData { deviation });
    }
    let tau_max = taus.iter().cloned().fold(0.0, f64::max);
    if tau_max <= 0.0 {
        return Err(QuotientError::NoPositiveTau);
    }
    let mu0 = 1.0 / tau_max;

    let diff = |mu: f64| -> f64 {
        let prod: f64 = taus.iter().map(|t| (1.0 - mu * mu * t * t).max(0.0).sqrt()).product();
        prod - mu * tnorm
    };

    // diff(lo) ~ 1 > 0 and diff(mu0) = -mu0 * tnorm < 0 bracket the root.
    let mut lo = 1e-15 * mu0;
    let mut hi = mu0;
    let mut iterations = 0;
    for _ in 0..MAX_BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break; // interval exhausted at f64 resolution
        }
        iterations += 1;
        let g = diff(mid);
        if g == 0.0 {
            return Ok(MuRoot { mu: mid, iterations, residual: 0.0 });
        }
        if g > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return the lower endpoint: there diff >= 0, which keeps the lifted
    // scalar coordinates strictly positive.
    Ok(MuRoot { mu: lo, iterations, residual: diff(lo) })
}

/// A preimage produced by [`lift`].
#[derive(Debug, Clone, PartialEq)]
pub struct LiftResult {
    pub point: ProductPoint,
    /// The scaling parameter; always in `(0, mu_0]`.
    pub mu: f64,
    /// Bisection step count (0 in the degenerate strata).
    pub iterations: usize,
}

// Snap threshold for scalar coordinates forced to zero by `mu = mu_0` in the
// `w = 0` stratum; keeps tied blocks exactly zero despite rounding.
const DEGENERACY_SNAP: f64 = 1e-12;

/// Constructs a preimage of the unit target point `y` under [`project`].
///
/// The representative puts all direction information into the last scalar
/// coordinate (or the first one when every block vanishes), keeping
/// `q_1, ..., q_{k-1}` real and nonnegative, so `project(lift(y)) = y` up to
/// roundoff.
pub fn lift(y: &TargetPoint, spec: &SphereSpec) -> Result<LiftResult, QuotientError> {
    y.validate(spec)?;
    let k = spec.k();
    let field = spec.field();
    let taus: Vec<f64> = y.xs.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let tnorm = y.w.norm();
    let tau_max = taus.iter().cloned().fold(0.0, f64::max);

    if tau_max <= EPS_ZERO {
        // All blocks vanish, |w| = 1: the point (0, w), (0, 1), ..., (0, 1).
        let mut factors = Vec::with_capacity(k);
        factors.push(SpherePoint { x: vec![0.0; spec.x_len(0)], q: y.w });
        for i in 1..k {
            factors.push(SpherePoint { x: vec![0.0; spec.x_len(i)], q: KNum::one(field) });
        }
        let point = ProductPoint { spec: spec.clone(), factors };
        return Ok(LiftResult { point, mu: 1.0, iterations: 0 });
    }

    if tnorm <= EPS_ZERO {
        // w = 0: scale by mu_0 so the largest block reaches full norm and its
        // scalar coordinate vanishes; ties are snapped to zero as well.
        let mu0 = 1.0 / tau_max;
        let i0 = taus
            .iter()
            .position(|&t| t >= tau_max)
            .expect("tau_max attained");
        let factors = (0..k)
            .map(|i| {
                let x: Vec<f64> = y.xs[i].iter().map(|v| v * mu0).collect();
                let arg = 1.0 - x.iter().map(|v| v * v).sum::<f64>();
                let q = if i == i0 || arg <= DEGENERACY_SNAP {
                    KNum::zero(field)
                } else {
                    KNum::scalar(field, arg.sqrt())
                };
                SpherePoint { x, q }
            })
            .collect();
        let point = ProductPoint { spec: spec.clone(), factors };
        return Ok(LiftResult { point, mu: mu0, iterations: 0 });
    }

    // Generic stratum: solve for the scaling parameter, make q_1..q_{k-1}
    // real nonnegative, and put the direction of w into q_k. The division is
    // by a positive real scalar, hence exact in direction.
    let root = mu_root(&taus, tnorm)?;
    let mu = root.mu;
    let mut factors: Vec<SpherePoint> = Vec::with_capacity(k);
    let mut head_prod = 1.0;
    for i in 0..k - 1 {
        let x: Vec<f64> = y.xs[i].iter().map(|v| v * mu).collect();
        let arg = (1.0 - x.iter().map(|v| v * v).sum::<f64>()).max(0.0);
        let q = arg.sqrt();
        head_prod *= q;
        factors.push(SpherePoint { x, q: KNum::scalar(field, q) });
    }
    let x_last: Vec<f64> = y.xs[k - 1].iter().map(|v| v * mu).collect();
    debug_assert!(head_prod > 0.0, "mu_root keeps head coordinates positive");
    let q_last = y.w.scale(mu / head_prod);
    factors.push(SpherePoint { x: x_last, q: q_last });
    let point = ProductPoint { spec: spec.clone(), factors };
    Ok(LiftResult { point, mu, iterations: root.iterations })
}

/// Barycentric coordinates of the cube-to-simplex map: `( (1-t_1)/A, ...,
/// (1-t_k)/A, t_1...t_k / A )` with `A = t_1...t_k + sum (1 - t_i)`.
///
/// `A >= 1` on the whole cube, so the map never degenerates.
pub fn simplex_coords(ts: &[f64]) -> Vec<f64> {
    let prod: f64 = ts.iter().product();
    let a: f64 = prod + ts.iter().map(|t| 1.0 - t).sum::<f64>();
    let mut s: Vec<f64> = ts.iter().map(|t| (1.0 - t) / a).collect();
    s.push(prod / a);
    s
}

/// The join quotient map: barycentric coordinates from the `t_i`, the ordered
/// product of the group slots, output canonicalized.
pub fn join_project(factors: &[JoinFactorPoint], group: &FiniteGroup) -> JoinTargetPoint {
    let ts: Vec<f64> = factors.iter().map(|f| f.t).collect();
    let s = simplex_coords(&ts);
    let g = group.product(&factors.iter().map(|f| f.g).collect::<Vec<_>>());
    let xs = factors.iter().map(|f| f.x).collect();
    join_canonical(&JoinTargetPoint { xs, g, s })
}

/// The product-of-cones specialization of [`join_project`] (trivial group):
/// cone points `(x_i, rho_i)` with apex at radius 0 map to barycentric
/// coordinates over the `X_i` plus an overall cone radius.
pub fn cone_product_map(points: &[(usize, f64)]) -> JoinTargetPoint {
    let trivial = FiniteGroup::trivial();
    let factors: Vec<JoinFactorPoint> =
        points.iter().map(|&(x, radius)| JoinFactorPoint::new(x, 1.0 - radius, 0)).collect();
    join_project(&factors, &trivial)
}

/// Homeomorphism of the nonnegative orthant onto the half-space
/// `R^{k-1} x R_{>=0}`, built from the complex squaring `H_2(a, b) =
/// (a^2 - b^2, 2ab)` applied pairwise from the last coordinate inward.
///
/// Returns `k - 1` free coordinates and the boundary coordinate, which
/// vanishes exactly when some input coordinate does.
pub fn orthant_to_halfspace(a: &[f64]) -> Result<(Vec<f64>, f64), QuotientError> {
    for (index, &v) in a.iter().enumerate() {
        if v < 0.0 {
            return Err(QuotientError::NegativeOrthant { index, value: v });
        }
    }
    assert!(!a.is_empty(), "orthant point needs at least one coordinate");
    let k = a.len();
    let mut free = vec![0.0; k - 1];
    let mut v = a[k - 1];
    for i in (0..k - 1).rev() {
        free[i] = a[i] * a[i] - v * v;
        v *= 2.0 * a[i];
    }
    Ok((free, v))
}

/// The local orbit-space model: maps `q in K^k` to `R^{k-1} x K` through the
/// orthant coordinates of the norms and the direction of the ordered product.
///
/// Constant on the orbits of the codiagonal action on `K^k`; the final
/// coordinate collapses to 0 exactly when the product vanishes.
pub fn local_model(q: &[KNum]) -> (Vec<f64>, KNum) {
    let field = q[0].field();
    let norms: Vec<f64> = q.iter().map(KNum::norm).collect();
    let (free, s) = orthant_to_halfspace(&norms).expect("norms are nonnegative");
    let prod = ordered_product(q);
    let pn = prod.norm();
    let last = if s <= EPS_ZERO || pn == 0.0 {
        KNum::zero(field)
    } else {
        prod.scale(s / pn)
    };
    (free, last)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::actions::{act, euclid_act, TorusElement};
    use crate::algebra::Field;
    use crate::spaces::{
        sample_product_point_with, sample_target_point_with, validate_product_point,
    };
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn spec(field: Field, dims: &[usize]) -> SphereSpec {
        SphereSpec::new(field, dims.to_vec()).unwrap()
    }

    #[test]
    fn project_north_pole() {
        let sp = spec(Field::Quaternion, &[4, 4]);
        let p = ProductPoint {
            spec: sp.clone(),
            factors: vec![
                SpherePoint { x: vec![0.0], q: KNum::one(Field::Quaternion) },
                SpherePoint { x: vec![0.0], q: KNum::one(Field::Quaternion) },
            ],
        };
        let y = project(&p);
        assert_eq!(y.xs, vec![vec![0.0], vec![0.0]]);
        assert!((y.w - KNum::one(Field::Quaternion)).norm() < 1e-15);
        y.validate(&sp).unwrap();
    }

    #[test]
    fn project_complex_hand_case() {
        // x_1 = (0.6), z_1 = 0.8; x_2 = (0), z_2 = i: raw = (0.6, 0; 0.8i),
        // norm 1, so the image is (0.6, 0, (0, 0.8)) on S^3.
        let sp = spec(Field::Complex, &[2, 2]);
        let p = ProductPoint {
            spec: sp,
            factors: vec![
                SpherePoint { x: vec![0.6], q: KNum::complex(0.8, 0.0) },
                SpherePoint { x: vec![0.0], q: KNum::complex(0.0, 1.0) },
            ],
        };
        let y = project(&p);
        assert!((y.xs[0][0] - 0.6).abs() < 1e-15);
        assert!(y.xs[1][0].abs() < 1e-15);
        assert!((y.w - KNum::complex(0.0, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn project_vanishing_product() {
        let sp = spec(Field::Quaternion, &[4, 4]);
        let p = ProductPoint {
            spec: sp,
            factors: vec![
                SpherePoint { x: vec![1.0], q: KNum::zero(Field::Quaternion) },
                SpherePoint { x: vec![0.0], q: KNum::one(Field::Quaternion) },
            ],
        };
        let y = project(&p);
        assert!((y.xs[0][0] - 1.0).abs() < 1e-15);
        assert!(y.w.norm() < 1e-15);
    }

    #[test]
    fn project_is_unit_and_orbit_constant() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            let d = field.dim();
            let sp = spec(field, &[d, d + 1]);
            for _ in 0..500 {
                let p = sample_product_point_with(&sp, &mut rng);
                let y = project(&p);
                assert!((y.norm_sq() - 1.0).abs() < 1e-12);
                let r = TorusElement::sample(field, 1, &mut rng);
                let moved = act(&p, &r).unwrap();
                assert!(y.distance(&project(&moved)) <= 1e-12);
            }
        }
    }

    #[test]
    fn mu_root_closed_form_cases() {
        // tau = (0.6, 0), tnorm = 0.8: 1 - 0.36 mu^2 = 0.64 mu^2 gives mu = 1.
        let r = mu_root(&[0.6, 0.0], 0.8).unwrap();
        assert!((r.mu - 1.0).abs() < 1e-12);
        assert!(r.residual.abs() <= 1e-12);

        // tau = (0.5, 0.5), tnorm = sqrt(0.5): the quadratic
        // 0.25 mu^2 + sqrt(0.5) mu - 1 = 0 gives mu = 2 (sqrt(1.5) - sqrt(0.5)).
        let expected = 2.0 * ((1.5f64).sqrt() - (0.5f64).sqrt());
        let r = mu_root(&[0.5, 0.5], 0.5f64.sqrt()).unwrap();
        assert!((r.mu - expected).abs() < 1e-12, "mu = {}, expected {expected}", r.mu);
        assert!(r.residual.abs() <= 1e-12);
    }

    #[test]
    fn mu_root_residual_on_random_targets() {
        let sp = spec(Field::Quaternion, &[4, 5, 6]);
        let mut rng = ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let y = sample_target_point_with(&sp, &mut rng);
            let taus: Vec<f64> =
                y.xs.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
            let tnorm = y.w.norm();
            let r = mu_root(&taus, tnorm).unwrap();
            assert!(r.residual.abs() <= 1e-12, "residual {:.3e}", r.residual);
            assert!(r.mu > 0.0 && r.mu <= 1.0 / taus.iter().cloned().fold(0.0, f64::max));
        }
    }

    #[test]
    fn mu_root_domain_errors() {
        assert!(matches!(mu_root(&[1.2, 0.0], 0.5), Err(QuotientError::TauOutOfRange { .. })));
        assert!(matches!(mu_root(&[0.6, 0.0], 0.0), Err(QuotientError::NonPositiveTnorm(_))));
        assert!(matches!(mu_root(&[0.5, 0.5], 0.5), Err(QuotientError::NotUnitData { .. })));
        assert!(matches!(mu_root(&[0.0, 0.0], 1.0), Err(QuotientError::NoPositiveTau)));
    }

    #[test]
    fn lift_pure_scalar_stratum() {
        // y = (0, ..., 0; w with |w| = 1): q_1 = w, the rest 1.
        let sp = spec(Field::Quaternion, &[4, 4, 5]);
        let w = KNum::quaternion(0.5, 0.5, 0.5, 0.5);
        let y = TargetPoint { xs: vec![vec![0.0], vec![0.0], vec![0.0, 0.0]], w };
        let lifted = lift(&y, &sp).unwrap();
        assert_eq!(lifted.iterations, 0);
        assert!((lifted.point.factors[0].q - w).norm() < 1e-15);
        assert!((lifted.point.factors[1].q - KNum::one(Field::Quaternion)).norm() < 1e-15);
        validate_product_point(&lifted.point).unwrap();
        assert!(project(&lifted.point).distance(&y) <= 1e-8);
    }

    #[test]
    fn lift_hand_case_quaternionic() {
        // y = (0.6, 0; 0.8 j): mu = 1, x_1 = (0.6), q_1 = 0.8, q_2 = j.
        let sp = spec(Field::Quaternion, &[4, 4]);
        let y = TargetPoint {
            xs: vec![vec![0.6], vec![0.0]],
            w: KNum::quaternion(0.0, 0.0, 0.8, 0.0),
        };
        let lifted = lift(&y, &sp).unwrap();
        assert!((lifted.mu - 1.0).abs() < 1e-12);
        let p = &lifted.point;
        assert!((p.factors[0].x[0] - 0.6).abs() < 1e-12);
        assert!((p.factors[0].q - KNum::quaternion(0.8, 0.0, 0.0, 0.0)).norm() < 1e-12);
        assert!((p.factors[1].q - KNum::quaternion(0.0, 0.0, 1.0, 0.0)).norm() < 1e-12);
        assert!(project(p).distance(&y) <= 1e-12);
    }

    #[test]
    fn lift_w_zero_stratum() {
        let sp = spec(Field::Complex, &[2, 2]);
        let y = TargetPoint {
            xs: vec![vec![0.8], vec![0.6]],
            w: KNum::zero(Field::Complex),
        };
        let lifted = lift(&y, &sp).unwrap();
        // mu_0 = 1/0.8; the first block reaches unit norm and q_1 = 0.
        assert!((lifted.mu - 1.25).abs() < 1e-12);
        assert!(lifted.point.factors[0].q.norm() == 0.0);
        validate_product_point(&lifted.point).unwrap();
        assert!(project(&lifted.point).distance(&y) <= 1e-12);
    }

    #[test]
    fn lift_round_trip_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            let d = field.dim();
            let sp = spec(field, &[d, d + 1, d + 2]);
            for _ in 0..2000 {
                let y = sample_target_point_with(&sp, &mut rng);
                let lifted = lift(&y, &sp).unwrap();
                validate_product_point(&lifted.point).unwrap();
                let err = project(&lifted.point).distance(&y);
                assert!(err <= 1e-8, "round trip error {err:.3e} over {field}");
                // q_1, ..., q_{k-1} real nonnegative (canonical stratum)
                for f in &lifted.point.factors[..sp.k() - 1] {
                    assert!(f.q.re() >= 0.0);
                    assert!(f.q.coeffs()[1..].iter().all(|&v| v == 0.0));
                }
            }
        }
    }

    #[test]
    fn lift_rejects_non_unit_targets() {
        let sp = spec(Field::Complex, &[2, 2]);
        let y = TargetPoint { xs: vec![vec![0.8], vec![0.6]], w: KNum::complex(0.5, 0.0) };
        assert!(matches!(lift(&y, &sp), Err(QuotientError::InvalidTarget(_))));
    }

    #[test]
    fn join_project_hand_cases() {
        let g2 = FiniteGroup::cyclic(2);
        // t = (1, 1): pure group stratum, s = (0, 0, 1), slot = g_1 g_2.
        let f = [JoinFactorPoint::new(1, 1.0, 1), JoinFactorPoint::new(1, 1.0, 1)];
        let out = join_project(&f, &g2);
        assert_eq!(out.s, vec![0.0, 0.0, 1.0]);
        assert_eq!(out.g, 0); // 1 XOR 1
        assert_eq!(out.xs, vec![0, 0]); // immaterial after canonicalization

        // t = (1/2, 1/2): A = 5/4, s = (2/5, 2/5, 1/5).
        let f = [JoinFactorPoint::new(0, 0.5, 0), JoinFactorPoint::new(1, 0.5, 1)];
        let out = join_project(&f, &g2);
        assert!((out.s[0] - 0.4).abs() < 1e-15);
        assert!((out.s[1] - 0.4).abs() < 1e-15);
        assert!((out.s[2] - 0.2).abs() < 1e-15);
        assert_eq!(out.xs, vec![0, 1]);
        assert_eq!(out.g, 1);

        // t = (1, 0): A = 1, s = (0, 1, 0), group slot immaterial.
        let f = [JoinFactorPoint::new(1, 1.0, 1), JoinFactorPoint::new(1, 0.0, 1)];
        let out = join_project(&f, &g2);
        assert_eq!(out.s, vec![0.0, 1.0, 0.0]);
        assert_eq!(out.g, 0);
        out.validate().unwrap();
    }

    #[test]
    fn cone_map_specializes_join() {
        // all radii 0: the apex (pure group stratum of the trivial group)
        let out = cone_product_map(&[(0, 0.0), (0, 0.0)]);
        assert_eq!(out.s, vec![0.0, 0.0, 1.0]);
        // radii (1, 1): s = (1/2, 1/2, 0)
        let out = cone_product_map(&[(1, 1.0), (0, 1.0)]);
        assert_eq!(out.s, vec![0.5, 0.5, 0.0]);
        assert_eq!(out.xs, vec![1, 0]);
    }

    #[test]
    fn orthant_map_hand_cases() {
        let (free, last) = orthant_to_halfspace(&[1.0, 0.0]).unwrap();
        assert_eq!((free.as_slice(), last), ([1.0].as_slice(), 0.0));
        let (free, last) = orthant_to_halfspace(&[0.0, 1.0]).unwrap();
        assert_eq!((free.as_slice(), last), ([-1.0].as_slice(), 0.0));
        let (free, last) = orthant_to_halfspace(&[1.0, 1.0]).unwrap();
        assert_eq!((free.as_slice(), last), ([0.0].as_slice(), 2.0));
        assert!(matches!(
            orthant_to_halfspace(&[0.5, -0.1]),
            Err(QuotientError::NegativeOrthant { index: 1, .. })
        ));
    }

    #[test]
    fn orthant_boundary_iff_zero_coordinate() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..1000 {
            let a: Vec<f64> = (0..4).map(|_| rng.gen_range(0.0..2.0)).collect();
            let (_, last) = orthant_to_halfspace(&a).unwrap();
            let has_zero = a.contains(&0.0);
            assert_eq!(last == 0.0, has_zero);
            assert!(last >= 0.0);
        }
        let (_, last) = orthant_to_halfspace(&[0.3, 0.0, 1.7]).unwrap();
        assert_eq!(last, 0.0);
    }

    #[test]
    fn orthant_map_injective_on_samples() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        for _ in 0..10_000 {
            let a: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0)).collect();
            let b: Vec<f64> = (0..3).map(|_| rng.gen_range(0.0..2.0)).collect();
            let da: f64 = a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt();
            if da < 1e-6 {
                continue;
            }
            let (fa, la) = orthant_to_halfspace(&a).unwrap();
            let (fb, lb) = orthant_to_halfspace(&b).unwrap();
            let dist = fa
                .iter()
                .zip(&fb)
                .map(|(x, y)| (x - y) * (x - y))
                .sum::<f64>()
                + (la - lb) * (la - lb);
            assert!(dist.sqrt() > 0.0, "distinct orthant points collided");
        }
    }

    #[test]
    fn local_model_hand_cases() {
        // origin maps to the origin
        let (free, last) = local_model(&[KNum::complex(0.0, 0.0), KNum::complex(0.0, 0.0)]);
        assert_eq!(free, vec![0.0]);
        assert_eq!(last, KNum::zero(Field::Complex));

        // q = (1, i): H_2(1, 1) = (0, 2), unit(1 * i) = i, so (0, 2i).
        let (free, last) = local_model(&[KNum::complex(1.0, 0.0), KNum::complex(0.0, 1.0)]);
        assert_eq!(free, vec![0.0]);
        assert!((last - KNum::complex(0.0, 2.0)).norm() < 1e-15);
    }

    #[test]
    fn local_model_invariant_under_euclid_act() {
        let mut rng = ChaCha8Rng::seed_from_u64(10);
        for field in [Field::Real, Field::Complex, Field::Quaternion] {
            for _ in 0..1000 {
                let q: Vec<KNum> =
                    (0..3).map(|_| KNum::sample_gaussian(field, &mut rng)).collect();
                let r = TorusElement::sample(field, 2, &mut rng);
                let moved = euclid_act(&q, &r).unwrap();
                let (f1, l1) = local_model(&q);
                let (f2, l2) = local_model(&moved);
                let err = f1
                    .iter()
                    .zip(&f2)
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt()
                    .max((l1 - l2).norm());
                assert!(err <= 1e-10, "invariance error {err:.3e} over {field}");
            }
        }
    }

    #[test]
    fn local_model_dimension() {
        let q = vec![KNum::quaternion(1.0, 0.0, 0.5, 0.0); 4];
        let (free, last) = local_model(&q);
        assert_eq!(free.len() + last.coeffs().len(), 3 + 4);
    }
}
