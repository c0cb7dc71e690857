//! Fibers of the real quotient map, enumerated through the sign group.
//!
//! Over the reals the quotient is by the orientation-preserving subgroup
//! `G_k` of `Z_2^k`, so the fiber of a target point is the `G_k`-orbit of any
//! one preimage: `2^{k-1}` points generically, fewer where at least two
//! scalar coordinates vanish.

use crate::algebra::Field;
use crate::quotient::{lift, project};
use crate::spaces::{ProductPoint, SphereSpec, TargetPoint};
use crate::actions::{real_act, real_group};
use crate::verify::VerifyError;

/// Points closer than this are the same fiber member (sign flips of exactly
/// vanishing coordinates reproduce the point bit-for-bit; the margin only
/// absorbs roundoff in constructed inputs).
const FIBER_DEDUP_TOL: f64 = 1e-9;

/// Tolerance for membership: every enumerated preimage must project back
/// onto `y` at least this closely.
const FIBER_MAP_TOL: f64 = 1e-8;

/// All preimages of the unit target `y` under the real quotient projection.
///
/// One preimage comes from [`lift`]; the rest are its images under the sign
/// group, filtered to distinct points that still map onto `y`.
pub fn fiber_real(y: &TargetPoint, spec: &SphereSpec) -> Result<Vec<ProductPoint>, VerifyError> {
    if spec.field() != Field::Real {
        return Err(VerifyError::NotRealField(spec.field()));
    }
    let base = lift(y, spec)?.point;
    let mut fiber: Vec<ProductPoint> = Vec::new();
    for pattern in real_group(spec.k()) {
        let candidate = real_act(&base, &pattern).expect("real point, matching arity");
        if project(&candidate).distance(y) > FIBER_MAP_TOL {
            continue;
        }
        let duplicate = fiber.iter().any(|p| point_distance(p, &candidate) <= FIBER_DEDUP_TOL);
        if !duplicate {
            fiber.push(candidate);
        }
    }
    Ok(fiber)
}

/// Expected fiber size over a point whose preimages have `vanishing` zero
/// scalar coordinates: `2^{k-1}` for 0 or 1 of them, `2^{k-j}` for `j >= 2`.
pub fn expected_fiber_size(k: usize, vanishing: usize) -> usize {
    if vanishing == 0 {
        1 << (k - 1)
    } else {
        1 << (k - vanishing)
    }
}

fn point_distance(a: &ProductPoint, b: &ProductPoint) -> f64 {
    a.factors
        .iter()
        .zip(&b.factors)
        .map(|(f, g)| {
            let dx: f64 = f.x.iter().zip(&g.x).map(|(u, v)| (u - v) * (u - v)).sum();
            dx + (f.q - g.q).norm_sq()
        })
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::KNum;
    use crate::spaces::sample_target_point;

    fn spec(dims: &[usize]) -> SphereSpec {
        SphereSpec::new(Field::Real, dims.to_vec()).unwrap()
    }

    #[test]
    fn generic_fiber_sizes() {
        // k = 2: two preimages; k = 3: four.
        let sp2 = spec(&[1, 1]);
        for seed in 0..50 {
            let y = sample_target_point(&sp2, seed);
            let fiber = fiber_real(&y, &sp2).unwrap();
            assert_eq!(fiber.len(), 2, "seed {seed}");
        }
        let sp3 = spec(&[2, 1, 2]);
        for seed in 0..50 {
            let y = sample_target_point(&sp3, seed);
            let fiber = fiber_real(&y, &sp3).unwrap();
            assert_eq!(fiber.len(), 4, "seed {seed}");
        }
    }

    #[test]
    fn fiber_members_are_distinct_preimages() {
        let sp = spec(&[2, 3, 2]);
        let y = sample_target_point(&sp, 11);
        let fiber = fiber_real(&y, &sp).unwrap();
        assert_eq!(fiber.len(), 4);
        for (i, p) in fiber.iter().enumerate() {
            assert!(project(p).distance(&y) <= 1e-8);
            for q in &fiber[i + 1..] {
                assert!(point_distance(p, q) > 1e-6);
            }
        }
    }

    #[test]
    fn two_vanishing_coordinates_collapse_the_fiber() {
        // k = 2: both blocks at norm 1/sqrt(2) and w = 0 force q_1 = q_2 = 0
        // in the preimage; the only sign flips fixing the point are trivial,
        // so the fiber is a single point.
        let sp = spec(&[1, 1]);
        let c = 0.5f64.sqrt();
        let y = TargetPoint { xs: vec![vec![c], vec![c]], w: KNum::real(0.0) };
        let fiber = fiber_real(&y, &sp).unwrap();
        assert_eq!(fiber.len(), 1);
        assert_eq!(expected_fiber_size(2, 2), 1);
    }

    #[test]
    fn one_vanishing_coordinate_keeps_the_generic_count() {
        // w = 0 with a unique maximal block: only one q vanishes, and the
        // covering is still a local homeomorphism with 2^{k-1} sheets.
        let sp = spec(&[1, 1]);
        let y = TargetPoint { xs: vec![vec![0.8], vec![0.6]], w: KNum::real(0.0) };
        let fiber = fiber_real(&y, &sp).unwrap();
        assert_eq!(fiber.len(), 2);
        assert_eq!(expected_fiber_size(2, 1), 2);
    }

    #[test]
    fn three_factor_branch_strata() {
        let sp = spec(&[1, 1, 1]);
        // two of three blocks tied at the max, w = 0: j = 2 vanishing, fiber 2
        let c = (0.45f64).sqrt();
        let b = (0.1f64).sqrt();
        let y = TargetPoint { xs: vec![vec![c], vec![c], vec![b]], w: KNum::real(0.0) };
        let fiber = fiber_real(&y, &sp).unwrap();
        assert_eq!(fiber.len(), expected_fiber_size(3, 2));
        // all three tied: j = 3, fiber size 1
        let c = (1.0f64 / 3.0).sqrt();
        let y = TargetPoint { xs: vec![vec![c], vec![c], vec![c]], w: KNum::real(0.0) };
        let fiber = fiber_real(&y, &sp).unwrap();
        assert_eq!(fiber.len(), expected_fiber_size(3, 3));
    }

    #[test]
    fn rejects_non_real_specs() {
        let sp = SphereSpec::new(Field::Complex, vec![2, 2]).unwrap();
        let y = sample_target_point(&sp, 1);
        assert!(matches!(fiber_real(&y, &sp), Err(VerifyError::NotRealField(Field::Complex))));
    }
}
