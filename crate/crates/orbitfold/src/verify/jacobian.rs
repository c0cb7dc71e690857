//! Closed-form Jacobian determinants of the extended quotient map in the two
//! coordinate charts of the real nondegeneracy proof, with a central
//! finite-difference oracle.
//!
//! The extended map sends `(x_{1,1}, ..., x_{m_k,k}; mu)` to
//! `mu (x_{1,1}, ..., x_{m_k,k}, q_1 ... q_k)` where, on the chart with all
//! `q_i` nonzero (case A), `q_i = sigma_i sqrt(1 - |x_i|^2)`. Column
//! elimination leaves a lower triangular matrix, so the determinant has the
//! closed form below. Case B (a single `q_j = 0`) reduces to a matrix whose
//! skew part cannot produce a real eigenvalue, with determinant
//! `x_1^{m_1 - 2} |x|^2`.

use nalgebra::DMatrix;
use rand::Rng;
use serde_json::json;

use crate::algebra::Field;
use crate::spaces::{ProductPoint, SphereSpec};
use crate::verify::report::{sample_rng, CheckOutcome, ReportBuilder, SuiteRun, Tolerances};
use crate::verify::VerifyError;
use crate::EPS_ZERO;

/// Central-difference Jacobian of `f` at `x`: entry error is `O(h^2)`.
pub fn jacobian_fd<F>(f: &F, x: &[f64], h: f64) -> DMatrix<f64>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = x.len();
    let m = f(x).len();
    let mut jac = DMatrix::zeros(m, n);
    let mut plus = x.to_vec();
    let mut minus = x.to_vec();
    for j in 0..n {
        plus[j] = x[j] + h;
        minus[j] = x[j] - h;
        let fp = f(&plus);
        let fm = f(&minus);
        for i in 0..m {
            jac[(i, j)] = (fp[i] - fm[i]) / (2.0 * h);
        }
        plus[j] = x[j];
        minus[j] = x[j];
    }
    jac
}

/// Closed-form determinant of the extended map on the case-(A) chart:
/// `mu^m * q * (1 + sum_i |x_i|^2 / q_i^2)` with `q = q_1 ... q_k` and
/// `m = sum m_i`; nonzero whenever `q` is.
pub fn case_a_det(p: &ProductPoint, mu: f64) -> Result<f64, VerifyError> {
    if p.spec.field() != Field::Real {
        return Err(VerifyError::NotRealField(p.spec.field()));
    }
    assert!(mu > 0.0, "the extended map needs mu > 0");
    let mut q = 1.0;
    let mut correction = 1.0;
    for (i, f) in p.factors.iter().enumerate() {
        let qi = f.q.re();
        if qi.abs() <= EPS_ZERO {
            return Err(VerifyError::CaseAStratum { index: i });
        }
        q *= qi;
        correction += f.x.iter().map(|v| v * v).sum::<f64>() / (qi * qi);
    }
    let m: usize = p.spec.dims().iter().sum();
    Ok(mu.powi(m as i32) * q * correction)
}

/// The extended map of the case-(A) chart as a plain vector function, for
/// finite differencing. `signs[i]` fixes the branch of `q_i` at the base
/// point; input layout is all `x` blocks concatenated, then `mu`.
pub fn case_a_extended_map(spec: &SphereSpec, signs: Vec<f64>) -> impl Fn(&[f64]) -> Vec<f64> {
    let x_lens: Vec<usize> = (0..spec.k()).map(|i| spec.x_len(i)).collect();
    move |input: &[f64]| {
        let mu = input[input.len() - 1];
        let mut out = Vec::with_capacity(input.len());
        let mut prod = 1.0;
        let mut off = 0;
        for (i, &len) in x_lens.iter().enumerate() {
            let block = &input[off..off + len];
            off += len;
            out.extend(block.iter().map(|v| mu * v));
            let arg = (1.0 - block.iter().map(|v| v * v).sum::<f64>()).max(0.0);
            prod *= signs[i] * arg.sqrt();
        }
        out.push(mu * prod);
        out
    }
}

/// Chart coordinates of `p` for [`case_a_extended_map`]: the `x` blocks and
/// the scaling parameter.
pub fn case_a_chart_coords(p: &ProductPoint, mu: f64) -> Vec<f64> {
    let mut coords: Vec<f64> = p.factors.iter().flat_map(|f| f.x.iter().copied()).collect();
    coords.push(mu);
    coords
}

/// The case-(B) matrix: diagonal `x_1`, first row `(x_1, -x_2, ..., -x_m)`,
/// first column `(x_1, x_2, ..., x_m)`.
pub fn case_b_matrix(x: &[f64]) -> DMatrix<f64> {
    let m = x.len();
    let mut a = DMatrix::zeros(m, m);
    for i in 0..m {
        a[(i, i)] = x[0];
    }
    for i in 1..m {
        a[(0, i)] = -x[i];
        a[(i, 0)] = x[i];
    }
    a
}

/// Closed-form determinant of the case-(B) matrix:
/// `x_1^{m-2} (x_1^2 + ... + x_m^2)`; nonzero whenever `x_1` is.
pub fn case_b_det(x: &[f64]) -> Result<f64, VerifyError> {
    if x[0].abs() <= EPS_ZERO {
        return Err(VerifyError::CaseBStratum);
    }
    let m = x.len();
    let norm_sq: f64 = x.iter().map(|v| v * v).sum();
    Ok(x[0].powi(m as i32 - 2) * norm_sq)
}

/// Draws a real product point on the case-(A) chart: every scalar coordinate
/// bounded away from zero so the chart and the finite differences behave.
fn sample_case_a_point<R: rand::Rng>(spec: &SphereSpec, rng: &mut R) -> ProductPoint {
    loop {
        let p = crate::spaces::sample_product_point_with(spec, rng);
        if p.factors.iter().all(|f| f.q.re().abs() > 0.15) {
            return p;
        }
    }
}

/// Dimension sets exercised by the case-(A) oracle comparison.
pub const CASE_A_DIMS: [&[usize]; 3] = [&[1, 1], &[2, 1], &[2, 3]];

/// Compares the closed-form determinants against their numeric oracles:
/// case (A) vs the determinant of the finite-difference Jacobian of the
/// extended map, case (B) vs the direct numeric determinant of the matrix,
/// for block sizes 2 through 8.
pub fn jacobian_verify(samples: u64, seed: u64, tol: &Tolerances) -> SuiteRun {
    let params = json!({
        "case_a_dims": CASE_A_DIMS,
        "case_b_block_sizes": [2, 3, 4, 5, 6, 7, 8],
        "fd_step": tol.fd_step,
        "case_a_rel": tol.case_a_rel,
        "case_b_rel": tol.case_b_rel,
    });
    let mut builder = ReportBuilder::new("jacobian", params, seed, samples);
    for index in 0..samples {
        let mut rng = sample_rng(seed, index);
        let mut outcomes = Vec::new();
        for dims in CASE_A_DIMS {
            let spec = SphereSpec::new(Field::Real, dims.to_vec()).expect("valid real dims");
            let p = sample_case_a_point(&spec, &mut rng);
            let mu = rng.gen_range(0.5..1.5);
            let closed = case_a_det(&p, mu).expect("chart point has nonzero scalars");
            let signs: Vec<f64> = p.factors.iter().map(|f| f.q.re().signum()).collect();
            let f = case_a_extended_map(&spec, signs);
            let coords = case_a_chart_coords(&p, mu);
            let numeric = jacobian_fd(&f, &coords, tol.fd_step).determinant();
            let rel = (closed - numeric).abs() / closed.abs().max(1e-30);
            outcomes.push(CheckOutcome::measure("case_a_rel", rel, tol.case_a_rel, || {
                json!({"dims": dims, "mu": mu, "point": p.to_json_string(),
                       "closed": closed, "numeric": numeric})
            }));
        }
        for m in 2..=8usize {
            let x: Vec<f64> = (0..m)
                .map(|i| {
                    let v: f64 = rng.gen_range(-2.0..2.0);
                    // keep the leading coordinate off the case-B stratum
                    if i == 0 && v.abs() < 0.1 {
                        0.5 + v.abs()
                    } else {
                        v
                    }
                })
                .collect();
            let closed = case_b_det(&x).expect("x_1 bounded away from zero");
            let numeric = case_b_matrix(&x).determinant();
            let rel = (closed - numeric).abs() / closed.abs().max(1e-30);
            outcomes.push(CheckOutcome::measure("case_b_rel", rel, tol.case_b_rel, || {
                json!({"m": m, "x": x, "closed": closed, "numeric": numeric})
            }));
        }
        builder.record(index, outcomes);
    }
    builder.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::KNum;
    use crate::spaces::SpherePoint;

    #[test]
    fn fd_of_identity_is_identity() {
        let f = |x: &[f64]| x.to_vec();
        let jac = jacobian_fd(&f, &[0.3, -0.7, 1.1], 1e-6);
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((jac[(i, j)] - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn fd_of_polynomial_map() {
        // f(x) = (x1^2, x1 x2) at (1, 1) has Jacobian [[2, 0], [1, 1]].
        let f = |x: &[f64]| vec![x[0] * x[0], x[0] * x[1]];
        let jac = jacobian_fd(&f, &[1.0, 1.0], 1e-6);
        let expect = [[2.0, 0.0], [1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((jac[(i, j)] - expect[i][j]).abs() < 1e-8);
            }
        }
    }

    fn real_point(dims: &[usize], xs: Vec<Vec<f64>>, qs: Vec<f64>) -> ProductPoint {
        let spec = SphereSpec::new(Field::Real, dims.to_vec()).unwrap();
        let factors = xs
            .into_iter()
            .zip(qs)
            .map(|(x, q)| SpherePoint { x, q: KNum::real(q) })
            .collect();
        ProductPoint { spec, factors }
    }

    #[test]
    fn case_a_hand_value() {
        // dims (1,1), x = ((0.6), (0)), q = (0.8, 1), mu = 1:
        // det = 0.8 * (1 + 0.36/0.64) = 1.25.
        let p = real_point(&[1, 1], vec![vec![0.6], vec![0.0]], vec![0.8, 1.0]);
        let det = case_a_det(&p, 1.0).unwrap();
        assert!((det - 1.25).abs() < 1e-12);
    }

    #[test]
    fn case_a_sign_points() {
        // all x_i = 0, q_i = +-1, mu = 1: determinant is the product of signs.
        let p = real_point(&[1, 1], vec![vec![0.0], vec![0.0]], vec![1.0, -1.0]);
        assert!((case_a_det(&p, 1.0).unwrap() + 1.0).abs() < 1e-15);
        let p = real_point(&[1, 1], vec![vec![0.0], vec![0.0]], vec![-1.0, -1.0]);
        assert!((case_a_det(&p, 1.0).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn case_a_rejects_vanishing_scalar() {
        let p = real_point(&[1, 1], vec![vec![1.0], vec![0.0]], vec![0.0, 1.0]);
        assert!(matches!(case_a_det(&p, 1.0), Err(VerifyError::CaseAStratum { index: 0 })));
    }

    #[test]
    fn case_a_matches_finite_differences() {
        let run = jacobian_verify(100, 2024, &Tolerances::default());
        assert!(run.report.pass, "jacobian suite failed: {}", run.report.to_json_string());
    }

    #[test]
    fn case_b_hand_values() {
        // m = 2: det = x1^2 + x2^2; at (3, 4) this is 25.
        assert!((case_b_det(&[3.0, 4.0]).unwrap() - 25.0).abs() < 1e-12);
        // m = 3, x = (1, 2, 2): 1 * 9 = 9.
        assert!((case_b_det(&[1.0, 2.0, 2.0]).unwrap() - 9.0).abs() < 1e-12);
        // x = (1, 0, ..., 0): the matrix is the identity, determinant 1.
        assert!((case_b_det(&[1.0, 0.0, 0.0, 0.0]).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn case_b_matrix_shape() {
        let a = case_b_matrix(&[1.0, 2.0, 2.0]);
        let expect = DMatrix::from_row_slice(3, 3, &[1.0, -2.0, -2.0, 2.0, 1.0, 0.0, 2.0, 0.0, 1.0]);
        assert_eq!(a, expect);
        assert!((a.determinant() - 9.0).abs() < 1e-12);
    }

    #[test]
    fn case_b_rejects_vanishing_leading_coordinate() {
        assert!(matches!(case_b_det(&[0.0, 1.0]), Err(VerifyError::CaseBStratum)));
    }
}
