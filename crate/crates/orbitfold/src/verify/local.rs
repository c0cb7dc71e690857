//! Sampling verification of the local orbit-space model
//! `K^k / S(K)^{k-1} = R^{d+k-1}`.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use crate::actions::{euclid_act, TorusElement};
use crate::algebra::{ordered_product, Field, KNum};
use crate::quotient::local_model;
use crate::verify::report::{sample_rng, CheckOutcome, ReportBuilder, SuiteRun, Tolerances};
use crate::verify::VerifyError;

fn model_distance(a: &(Vec<f64>, KNum), b: &(Vec<f64>, KNum)) -> f64 {
    let free: f64 = a.0.iter().zip(&b.0).map(|(x, y)| (x - y) * (x - y)).sum();
    (free + (a.1 - b.1).norm_sq()).sqrt()
}

/// The separating tuple of a Euclidean orbit: the norms and the product.
fn orbit_data(q: &[KNum]) -> Vec<f64> {
    let mut out: Vec<f64> = q.iter().map(KNum::norm).collect();
    out.extend_from_slice(ordered_product(q).coeffs());
    out
}

fn sample_tuple<R: Rng>(field: Field, k: usize, rng: &mut R) -> Vec<KNum> {
    (0..k).map(|_| KNum::sample_gaussian(field, rng)).collect()
}

/// Checks invariance under the codiagonal action, injectivity across orbits,
/// and collapse of the `S(K)` direction on the boundary stratum.
pub fn local_model_verify(
    field: Field,
    k: usize,
    samples: u64,
    seed: u64,
    tol: &Tolerances,
) -> Result<SuiteRun, VerifyError> {
    if k < 2 {
        return Err(VerifyError::InvalidArg(format!("local model needs k >= 2, got {k}")));
    }
    let params = json!({
        "field": field.letter().to_string(),
        "k": k,
        "local_invariance": tol.local_invariance,
        "local_collapse": tol.local_collapse,
        "separation_input": tol.separation_input,
    });
    let mut builder = ReportBuilder::new("verify-local", params, seed, samples);

    let outcomes: Vec<Vec<CheckOutcome>> = (0..samples)
        .into_par_iter()
        .map(|index| {
            let mut rng = sample_rng(seed, index);
            let mut out = Vec::with_capacity(3);

            // (i) invariance under the action
            let q = sample_tuple(field, k, &mut rng);
            let r = TorusElement::sample(field, k - 1, &mut rng);
            let moved = euclid_act(&q, &r).expect("matching field and arity");
            let err = model_distance(&local_model(&q), &local_model(&moved));
            out.push(CheckOutcome::measure("local_invariance", err, tol.local_invariance, || {
                json!({"q": q.iter().map(|v| v.coeffs().to_vec()).collect::<Vec<_>>()})
            }));

            // (ii) injectivity across orbits: distinct invariant data must
            // give distinct outputs
            let q2 = sample_tuple(field, k, &mut rng);
            let da = orbit_data(&q);
            let db = orbit_data(&q2);
            let sep = da.iter().zip(&db).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if sep >= tol.separation_input {
                let dist = model_distance(&local_model(&q), &local_model(&q2));
                let collided = if dist > 0.0 { 0.0 } else { 1.0 };
                out.push(CheckOutcome::measure("local_injectivity_collision", collided, 0.5, || {
                    json!({"invariant_separation": sep, "output_distance": dist})
                }));
            }

            // (iii) boundary collapse: a vanishing coordinate kills the
            // product, and the S(K) directions of the others must not matter
            let mut q3 = sample_tuple(field, k, &mut rng);
            let zero_at = rng.gen_range(0..k);
            q3[zero_at] = KNum::zero(field);
            let q4: Vec<KNum> = q3
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    if i == zero_at {
                        *v
                    } else {
                        KNum::sample_unit(field, &mut rng).value().scale(v.norm())
                    }
                })
                .collect();
            let err = model_distance(&local_model(&q3), &local_model(&q4));
            out.push(CheckOutcome::measure("local_collapse", err, tol.local_collapse, || {
                json!({"q": q3.iter().map(|v| v.coeffs().to_vec()).collect::<Vec<_>>(),
                       "q_rephased": q4.iter().map(|v| v.coeffs().to_vec()).collect::<Vec<_>>()})
            }));
            out
        })
        .collect();

    for (index, sample_outcomes) in outcomes.into_iter().enumerate() {
        builder.record(index as u64, sample_outcomes);
    }
    Ok(builder.finish())
}
