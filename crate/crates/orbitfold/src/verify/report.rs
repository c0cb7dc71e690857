//! Verification reports and the shared tolerance table.

use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

/// Outcome of one verification suite.
///
/// `max_error` is normalized: every sub-check reports `observed / tolerance`,
/// so the pass threshold is 1 regardless of which tolerances a suite mixes.
/// Raw per-check maxima are echoed under `params.observed`. A report passes
/// iff `failures` is empty and `max_error <= 1`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Report {
    pub command: String,
    pub params: Value,
    pub seed: u64,
    pub samples: u64,
    pub max_error: f64,
    pub failures: Vec<Value>,
    pub pass: bool,
    pub elapsed_ms: u64,
}

impl Report {
    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }

    /// The report with `elapsed_ms` zeroed, for byte-level comparisons.
    pub fn without_elapsed(&self) -> Report {
        Report { elapsed_ms: 0, ..self.clone() }
    }
}

/// One per-sample measurement, used for CSV output.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleRow {
    pub index: u64,
    pub check: String,
    pub error: f64,
}

/// A suite run: the report plus the raw per-sample rows behind it.
#[derive(Debug, Clone)]
pub struct SuiteRun {
    pub report: Report,
    pub rows: Vec<SampleRow>,
}

/// Named tolerances used by the verification suites; every value can be
/// overridden from the CLI with `--tol name=value`.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Tolerances {
    /// `|project(act(p, r)) - project(p)|`
    pub project_invariance: f64,
    /// `| |project(p)| - 1 |`
    pub unit_norm: f64,
    /// `|project(lift(y)) - y|`
    pub roundtrip: f64,
    /// invariant separation above which projections must separate
    pub separation_input: f64,
    /// minimum projected separation demanded at `separation_input`
    pub separation_output: f64,
    /// local model invariance under the Euclidean codiagonal action
    pub local_invariance: f64,
    /// local model boundary collapse
    pub local_collapse: f64,
    /// relative error, closed-form case-(A) determinant vs finite differences
    pub case_a_rel: f64,
    /// relative error, closed-form case-(B) determinant vs numeric determinant
    pub case_b_rel: f64,
    /// singular values above `rank_sv_threshold * sigma_max` count toward rank
    pub rank_sv_threshold: f64,
    /// allowed deficiency below 1 in the grid-minimized lower bounds
    pub bound_deficiency: f64,
    /// finite-difference step
    pub fd_step: f64,
}

impl Default for Tolerances {
    fn default() -> Tolerances {
        Tolerances {
            project_invariance: 1e-12,
            unit_norm: 1e-12,
            roundtrip: 1e-8,
            separation_input: 1e-4,
            separation_output: 1e-5,
            local_invariance: 1e-10,
            local_collapse: 1e-10,
            case_a_rel: 1e-5,
            case_b_rel: 1e-10,
            rank_sv_threshold: 1e-7,
            bound_deficiency: 1e-9,
            fd_step: 1e-6,
        }
    }
}

impl Tolerances {
    /// Sets a tolerance by its field name; returns false for unknown names.
    pub fn set(&mut self, name: &str, value: f64) -> bool {
        match name {
            "project_invariance" => self.project_invariance = value,
            "unit_norm" => self.unit_norm = value,
            "roundtrip" => self.roundtrip = value,
            "separation_input" => self.separation_input = value,
            "separation_output" => self.separation_output = value,
            "local_invariance" => self.local_invariance = value,
            "local_collapse" => self.local_collapse = value,
            "case_a_rel" => self.case_a_rel = value,
            "case_b_rel" => self.case_b_rel = value,
            "rank_sv_threshold" => self.rank_sv_threshold = value,
            "bound_deficiency" => self.bound_deficiency = value,
            "fd_step" => self.fd_step = value,
            _ => return false,
        }
        true
    }
}

/// Generator for sample `index` of a run seeded with `seed`; identical for
/// any partitioning of the index range across workers.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    rng
}

/// One sub-check measurement inside a sample.
#[derive(Debug, Clone)]
pub struct CheckOutcome {
    pub check: &'static str,
    /// raw observed error
    pub error: f64,
    /// configured tolerance for this check
    pub tolerance: f64,
    /// witness payload, present only when the check failed
    pub witness: Option<Value>,
}

impl CheckOutcome {
    /// Records `error` against `tolerance`; on violation the witness produced
    /// by `witness` is attached so the case can be rerun from the report.
    pub fn measure(
        check: &'static str,
        error: f64,
        tolerance: f64,
        witness: impl FnOnce() -> Value,
    ) -> CheckOutcome {
        let error = if error.is_nan() { f64::INFINITY } else { error };
        let witness = (error > tolerance).then(witness);
        CheckOutcome { check, error, tolerance, witness }
    }
}

const MAX_STORED_FAILURES: usize = 100;

/// Deterministic aggregation of per-sample outcomes into a [`Report`].
pub struct ReportBuilder {
    command: String,
    params: Value,
    seed: u64,
    samples: u64,
    max_ratio: f64,
    observed: serde_json::Map<String, Value>,
    failures: Vec<Value>,
    failure_count: u64,
    rows: Vec<SampleRow>,
    started: Instant,
}

impl ReportBuilder {
    pub fn new(command: &str, params: Value, seed: u64, samples: u64) -> ReportBuilder {
        ReportBuilder {
            command: command.to_string(),
            params,
            seed,
            samples,
            max_ratio: 0.0,
            observed: serde_json::Map::new(),
            failures: Vec::new(),
            failure_count: 0,
            rows: Vec::new(),
            started: Instant::now(),
        }
    }

    /// Folds the outcomes of sample `index` in; call in index order.
    pub fn record(&mut self, index: u64, outcomes: Vec<CheckOutcome>) {
        for o in outcomes {
            let ratio = if o.tolerance > 0.0 { o.error / o.tolerance } else { f64::INFINITY };
            self.max_ratio = self.max_ratio.max(ratio);
            let entry = self
                .observed
                .entry(o.check.to_string())
                .or_insert_with(|| Value::from(0.0));
            if entry.as_f64().unwrap_or(0.0) < o.error {
                *entry = Value::from(o.error);
            }
            if let Some(witness) = o.witness {
                self.failure_count += 1;
                if self.failures.len() < MAX_STORED_FAILURES {
                    self.failures.push(json!({
                        "index": index,
                        "check": o.check,
                        "error": o.error,
                        "tolerance": o.tolerance,
                        "witness": witness,
                    }));
                }
            }
            self.rows.push(SampleRow { index, check: o.check.to_string(), error: o.error });
        }
    }

    pub fn finish(mut self) -> SuiteRun {
        let pass = self.failure_count == 0 && self.max_ratio <= 1.0;
        if let Value::Object(map) = &mut self.params {
            map.insert("observed".to_string(), Value::Object(self.observed));
            map.insert("failure_count".to_string(), Value::from(self.failure_count));
        }
        let report = Report {
            command: self.command,
            params: self.params,
            seed: self.seed,
            samples: self.samples,
            max_error: self.max_ratio,
            failures: self.failures,
            pass,
            elapsed_ms: self.started.elapsed().as_millis() as u64,
        };
        SuiteRun { report, rows: self.rows }
    }
}
