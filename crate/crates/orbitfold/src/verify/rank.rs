//! Numerical rank of the differential of the quotient projection.
//!
//! The projection extends smoothly off the product of spheres (the formula
//! only divides by the invariant norm, which stays near 1), so the rank of
//! the restricted differential is read off finite differences along an
//! orthonormal tangent frame of the product. On free orbits it equals the
//! target dimension `m`; on the degeneration locus it drops.

use nalgebra::DMatrix;
use serde_json::json;

use crate::algebra::{Field, KNum};
use crate::spaces::{ProductPoint, SpherePoint, SphereSpec};
use crate::verify::report::{sample_rng, CheckOutcome, ReportBuilder, SuiteRun, Tolerances};

/// Evaluates the projection formula on raw ambient coordinates (factor
/// blocks `[x_i, q_i]` concatenated), without sphere validation.
pub fn project_ambient(spec: &SphereSpec, ambient: &[f64]) -> Vec<f64> {
    let d = spec.field().dim();
    let mut xs: Vec<f64> = Vec::new();
    let mut w = KNum::one(spec.field());
    let mut off = 0;
    for i in 0..spec.k() {
        let len = spec.x_len(i);
        xs.extend_from_slice(&ambient[off..off + len]);
        off += len;
        let q = KNum::from_coeffs(spec.field(), &ambient[off..off + d]).expect("d coefficients");
        off += d;
        w = w * q;
    }
    debug_assert_eq!(off, ambient.len());
    let norm =
        (xs.iter().map(|v| v * v).sum::<f64>() + w.norm_sq()).sqrt();
    let mut out: Vec<f64> = xs.iter().map(|v| v / norm).collect();
    out.extend(w.coeffs().iter().map(|v| v / norm));
    out
}

/// Raw ambient coordinates of a product point, factor blocks concatenated.
pub fn ambient_coords(p: &ProductPoint) -> Vec<f64> {
    let mut out = Vec::new();
    for f in &p.factors {
        out.extend_from_slice(&f.x);
        out.extend_from_slice(f.q.coeffs());
    }
    out
}

/// Orthonormal tangent basis of a sphere at the unit vector `v`: ambient
/// basis vectors are projected onto the tangent space and orthonormalized,
/// dropping the one most parallel to `v`.
fn sphere_tangent_frame(v: &[f64]) -> Vec<Vec<f64>> {
    let n = v.len();
    let drop = (0..n)
        .max_by(|&a, &b| v[a].abs().partial_cmp(&v[b].abs()).expect("finite coords"))
        .expect("nonempty");
    let mut frame: Vec<Vec<f64>> = Vec::with_capacity(n - 1);
    for e in 0..n {
        if e == drop {
            continue;
        }
        let mut u: Vec<f64> = (0..n).map(|i| if i == e { 1.0 } else { 0.0 }).collect();
        let dot: f64 = u.iter().zip(v).map(|(a, b)| a * b).sum();
        for (ui, vi) in u.iter_mut().zip(v) {
            *ui -= dot * vi;
        }
        for prev in &frame {
            let dot: f64 = u.iter().zip(prev).map(|(a, b)| a * b).sum();
            for (ui, pi) in u.iter_mut().zip(prev) {
                *ui -= dot * pi;
            }
        }
        let norm = u.iter().map(|a| a * a).sum::<f64>().sqrt();
        debug_assert!(norm > 1e-8, "tangent frame degenerated");
        frame.push(u.into_iter().map(|a| a / norm).collect());
    }
    frame
}

/// Orthonormal tangent frame of the whole product, embedded block-sparsely
/// into the full ambient space.
pub fn product_tangent_frame(p: &ProductPoint) -> Vec<Vec<f64>> {
    let total: usize = (0..p.spec.k())
        .map(|i| p.spec.x_len(i) + p.spec.field().dim())
        .sum();
    let mut frame = Vec::new();
    let mut off = 0;
    for f in &p.factors {
        let mut v = f.x.clone();
        v.extend_from_slice(f.q.coeffs());
        for tangent in sphere_tangent_frame(&v) {
            let mut embedded = vec![0.0; total];
            embedded[off..off + v.len()].copy_from_slice(&tangent);
            frame.push(embedded);
        }
        off += v.len();
    }
    frame
}

/// Finite-difference Jacobian of the projection restricted to the tangent
/// space of the product at `p`.
pub fn projection_differential(p: &ProductPoint, h: f64) -> DMatrix<f64> {
    let base = ambient_coords(p);
    let frame = product_tangent_frame(p);
    let m = p.spec.target_ambient_dim();
    let mut jac = DMatrix::zeros(m, frame.len());
    for (j, dir) in frame.iter().enumerate() {
        let plus: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b + h * d).collect();
        let minus: Vec<f64> = base.iter().zip(dir).map(|(b, d)| b - h * d).collect();
        let fp = project_ambient(&p.spec, &plus);
        let fm = project_ambient(&p.spec, &minus);
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
    }
    jac
}

/// Numerical rank of the differential of the projection at `p`: the count of
/// singular values above `sv_threshold * sigma_max`.
pub fn rank_at_with(p: &ProductPoint, h: f64, sv_threshold: f64) -> usize {
    let jac = projection_differential(p, h);
    let svs = jac.svd(false, false).singular_values;
    let sigma_max = svs.iter().cloned().fold(0.0, f64::max);
    if sigma_max <= 0.0 {
        return 0;
    }
    svs.iter().filter(|&&s| s > sv_threshold * sigma_max).count()
}

/// [`rank_at_with`] at the default step `1e-6` and threshold `1e-7`.
pub fn rank_at(p: &ProductPoint) -> usize {
    let tol = Tolerances::default();
    rank_at_with(p, tol.fd_step, tol.rank_sv_threshold)
}

/// A point with two vanishing scalar coordinates; its orbit is not free and
/// the projection loses rank there.
pub fn degenerate_point(spec: &SphereSpec) -> ProductPoint {
    let field = spec.field();
    let factors = (0..spec.k())
        .map(|i| {
            let mut x = vec![0.0; spec.x_len(i)];
            if i < 2 {
                x[0] = 1.0;
                SpherePoint { x, q: KNum::zero(field) }
            } else {
                SpherePoint { x, q: KNum::one(field) }
            }
        })
        .collect();
    ProductPoint { spec: spec.clone(), factors }
}

/// Per-field specs exercised by the rank suite.
pub fn rank_specs() -> Vec<SphereSpec> {
    vec![
        SphereSpec::new(Field::Real, vec![2, 3]).expect("valid"),
        SphereSpec::new(Field::Complex, vec![2, 2]).expect("valid"),
        SphereSpec::new(Field::Quaternion, vec![4, 4]).expect("valid"),
    ]
}

/// Checks that the projection is a submersion at freely sampled points
/// (`rank = m`) and loses rank at constructed degenerate points.
pub fn rank_verify(samples: u64, seed: u64, tol: &Tolerances) -> SuiteRun {
    let specs = rank_specs();
    let params = json!({
        "specs": specs.iter().map(|s| json!({
            "field": s.field().letter().to_string(),
            "dims": s.dims(),
            "target_dim": s.target_dim(),
        })).collect::<Vec<_>>(),
        "fd_step": tol.fd_step,
        "rank_sv_threshold": tol.rank_sv_threshold,
    });
    let mut builder = ReportBuilder::new("rank", params, seed, samples);
    for index in 0..samples {
        let mut rng = sample_rng(seed, index);
        let mut outcomes = Vec::new();
        for spec in &specs {
            // generic points: keep every scalar coordinate well away from 0
            // so the sample sits in the free stratum
            let p = loop {
                let p = crate::spaces::sample_product_point_with(spec, &mut rng);
                if p.factors.iter().all(|f| f.q.norm() > 0.1) {
                    break p;
                }
            };
            let m = spec.target_dim();
            let rank = rank_at_with(&p, tol.fd_step, tol.rank_sv_threshold);
            let error = if rank == m { 0.0 } else { 1.0 };
            outcomes.push(CheckOutcome::measure("rank_free_mismatch", error, 0.5, || {
                json!({"field": spec.field().letter().to_string(), "dims": spec.dims(),
                       "expected": m, "rank": rank, "point": p.to_json_string()})
            }));
        }
        builder.record(index, outcomes);
    }
    // degenerate points once per suite, recorded under the last index
    let mut outcomes = Vec::new();
    for spec in &specs {
        let p = degenerate_point(spec);
        let m = spec.target_dim();
        let rank = rank_at_with(&p, tol.fd_step, tol.rank_sv_threshold);
        let error = if rank < m { 0.0 } else { 1.0 };
        outcomes.push(CheckOutcome::measure("rank_degenerate_not_detected", error, 0.5, || {
            json!({"field": spec.field().letter().to_string(), "dims": spec.dims(),
                   "target_dim": m, "rank": rank})
        }));
    }
    builder.record(samples, outcomes);
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spaces::sample_product_point;

    #[test]
    fn tangent_frame_is_orthonormal_and_tangent() {
        let v = vec![0.6, 0.0, 0.8];
        let frame = sphere_tangent_frame(&v);
        assert_eq!(frame.len(), 2);
        for (i, u) in frame.iter().enumerate() {
            let vdot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
            assert!(vdot.abs() < 1e-12);
            for (j, w) in frame.iter().enumerate() {
                let dot: f64 = u.iter().zip(w).map(|(a, b)| a * b).sum();
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((dot - expect).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn quaternionic_free_point_has_rank_five() {
        let spec = SphereSpec::new(Field::Quaternion, vec![4, 4]).unwrap();
        let p = sample_product_point(&spec, 3);
        assert!(p.factors.iter().all(|f| f.q.norm() > 0.05), "sample is free enough");
        assert_eq!(rank_at(&p), 5);
    }

    #[test]
    fn complex_degenerate_point_loses_rank() {
        let spec = SphereSpec::new(Field::Complex, vec![2, 2]).unwrap();
        let p = degenerate_point(&spec);
        let m = spec.target_dim();
        assert!(rank_at(&p) < m, "rank must drop at two vanishing scalars");
    }

    #[test]
    fn real_generic_point_is_local_diffeo() {
        let spec = SphereSpec::new(Field::Real, vec![1, 1]).unwrap();
        let p = sample_product_point(&spec, 5);
        assert_eq!(rank_at(&p), 2);
    }

    #[test]
    fn rank_suite_passes() {
        let run = rank_verify(25, 7, &Tolerances::default());
        assert!(run.report.pass, "{}", run.report.to_json_string());
    }
}
