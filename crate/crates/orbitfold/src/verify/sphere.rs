//! The bundled property suite for the sphere quotient maps: orbit invariance
//! of the projection, unit-norm outputs, lift round-trips over every stratum,
//! separation of distinct orbits, and (real case) fiber counts.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::actions::{act, raw_invariant, TorusElement};
use crate::algebra::{Field, KNum};
use crate::quotient::{lift, project};
use crate::spaces::{
    sample_product_point_with, sample_target_point_with, split_target, SphereSpec, TargetPoint,
};
use crate::verify::fiber::{expected_fiber_size, fiber_real};
use crate::verify::report::{sample_rng, CheckOutcome, ReportBuilder, SuiteRun, Tolerances};

/// A unit target in the `w = 0` stratum.
pub fn sample_target_w_zero<R: Rng>(spec: &SphereSpec, rng: &mut R) -> TargetPoint {
    loop {
        let mut y = sample_target_point_with(spec, rng);
        y.w = KNum::zero(spec.field());
        let norm = y.norm_sq().sqrt();
        if norm > 1e-3 {
            for block in &mut y.xs {
                for v in block.iter_mut() {
                    *v /= norm;
                }
            }
            return y;
        }
    }
}

/// A unit target with every block zero (`|w| = 1`).
pub fn sample_target_xs_zero<R: Rng>(spec: &SphereSpec, rng: &mut R) -> TargetPoint {
    let w = KNum::sample_unit(spec.field(), rng).value();
    let xs = (0..spec.k()).map(|i| vec![0.0; spec.x_len(i)]).collect();
    TargetPoint { xs, w }
}

/// A real target whose preimages have `vanishing >= 2` zero scalar
/// coordinates: that many blocks tied at the maximal norm, `w = 0`.
pub fn degenerate_real_target<R: Rng>(
    spec: &SphereSpec,
    vanishing: usize,
    rng: &mut R,
) -> TargetPoint {
    assert!(spec.field() == Field::Real && vanishing >= 2 && vanishing <= spec.k());
    let k = spec.k();
    // tied blocks carry the strictly maximal weight
    let weights: Vec<f64> = (0..k)
        .map(|i| if i < vanishing { 1.0 } else { rng.gen_range(0.1..0.7) })
        .collect();
    let total: f64 = weights.iter().sum();
    let mut ambient = vec![0.0; spec.target_ambient_dim()];
    let mut off = 0;
    for (i, wgt) in weights.iter().enumerate() {
        let len = spec.x_len(i);
        let dir: Vec<f64> = (0..len).map(|_| rng.sample::<f64, _>(rand_distr::StandardNormal)).collect();
        let dn = dir.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
        let scale = (wgt / total).sqrt() / dn;
        for j in 0..len {
            ambient[off + j] = dir[j] * scale;
        }
        off += len;
    }
    // w block stays zero
    let mut y = split_target(spec, &ambient);
    // snap the tied blocks to exactly equal norms
    let norms: Vec<f64> =
        y.xs.iter().map(|b| b.iter().map(|v| v * v).sum::<f64>().sqrt()).collect();
    let target_norm = norms[..vanishing].iter().cloned().fold(0.0, f64::max);
    for (block, norm) in y.xs.iter_mut().zip(&norms).take(vanishing) {
        let factor = target_norm / norm;
        for v in block.iter_mut() {
            *v *= factor;
        }
    }
    let renorm = y.norm_sq().sqrt();
    for block in &mut y.xs {
        for v in block.iter_mut() {
            *v /= renorm;
        }
    }
    y
}

fn roundtrip_error(y: &TargetPoint, spec: &SphereSpec) -> f64 {
    match lift(y, spec) {
        Ok(res) => project(&res.point).distance(y),
        Err(_) => f64::INFINITY,
    }
}

/// Runs the full quotient-map property suite on `spec`.
///
/// Sample batches are indexed, so the result is identical for any number of
/// Rayon workers.
pub fn sphere_quotient_verify(
    spec: &SphereSpec,
    samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> SuiteRun {
    let params = json!({
        "field": spec.field().letter().to_string(),
        "dims": spec.dims(),
        "target_dim": spec.target_dim(),
        "tolerances": tol,
    });
    let mut builder = ReportBuilder::new("verify-sphere", params, seed, samples);
    let k = spec.k();
    let torus_len = k - 1;
    let is_real = spec.field() == Field::Real;

    let outcomes: Vec<Vec<CheckOutcome>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(seed, index);
            let mut out = Vec::with_capacity(6);

            // orbit invariance and unit norm
            let p = sample_product_point_with(spec, &mut rng);
            let r = TorusElement::sample(spec.field(), torus_len, &mut rng);
            let y = project(&p);
            let moved = act(&p, &r).expect("matching spec");
            let inv_err = y.distance(&project(&moved));
            out.push(CheckOutcome::measure(
                "project_invariance",
                inv_err,
                tol.project_invariance,
                || json!({"point": p.to_json_string()}),
            ));
            let norm_err = (y.norm_sq().sqrt() - 1.0).abs();
            out.push(CheckOutcome::measure("unit_norm", norm_err, tol.unit_norm, || {
                json!({"point": p.to_json_string()})
            }));
            // the projection denominator never falls below 1 - 1e-9
            let floor_deficit = ((1.0 - 1e-9) - raw_invariant(&p).norm_sq()).max(0.0);
            out.push(CheckOutcome::measure("invariant_norm_floor", floor_deficit, 1e-12, || {
                json!({"point": p.to_json_string()})
            }));

            // round trip on a generic target and on both degenerate strata
            let y_t = sample_target_point_with(spec, &mut rng);
            out.push(CheckOutcome::measure(
                "roundtrip",
                roundtrip_error(&y_t, spec),
                tol.roundtrip,
                || json!({"target": y_t.to_json_string()}),
            ));
            let y0 = sample_target_w_zero(spec, &mut rng);
            out.push(CheckOutcome::measure(
                "roundtrip_w_zero",
                roundtrip_error(&y0, spec),
                tol.roundtrip,
                || json!({"target": y0.to_json_string()}),
            ));
            let yx = sample_target_xs_zero(spec, &mut rng);
            out.push(CheckOutcome::measure(
                "roundtrip_xs_zero",
                roundtrip_error(&yx, spec),
                tol.roundtrip,
                || json!({"target": yx.to_json_string()}),
            ));

            // separation: distinct invariants must stay apart after projection
            let p2 = sample_product_point_with(spec, &mut rng);
            let raw_sep = raw_invariant(&p).distance(&raw_invariant(&p2));
            if raw_sep >= tol.separation_input {
                let projected = y.distance(&project(&p2));
                // normalized so that the configured minimum maps to ratio 1
                let ratio = tol.separation_output / projected.max(f64::MIN_POSITIVE);
                out.push(CheckOutcome::measure("separation_ratio", ratio, 1.0, || {
                    json!({"p": p.to_json_string(), "q": p2.to_json_string(),
                           "raw_separation": raw_sep, "projected_separation": projected})
                }));
            }

            // real case: exhaustive sign-group fibers
            if is_real {
                let fiber = fiber_real(&y_t, spec).expect("real spec");
                let generic = expected_fiber_size(k, 0);
                let fiber_err = if fiber.len() == generic { 0.0 } else { 1.0 };
                out.push(CheckOutcome::measure("fiber_generic_mismatch", fiber_err, 0.5, || {
                    json!({"target": y_t.to_json_string(), "expected": generic, "got": fiber.len()})
                }));
                let j = 2 + (index as usize % (k - 1));
                let yd = degenerate_real_target(spec, j, &mut rng);
                let fiber = fiber_real(&yd, spec).expect("real spec");
                let expect = expected_fiber_size(k, j);
                let fiber_err = if fiber.len() == expect { 0.0 } else { 1.0 };
                out.push(CheckOutcome::measure("fiber_branch_mismatch", fiber_err, 0.5, || {
                    json!({"target": yd.to_json_string(), "vanishing": j,
                           "expected": expect, "got": fiber.len()})
                }));
            }
            out
        })
        .collect();

    for (index, sample_outcomes) in outcomes.into_iter().enumerate() {
        builder.record(index as u64, sample_outcomes);
    }
    builder.finish()
}
