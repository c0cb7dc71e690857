//! Exhaustive verification that the join quotient map is a bijection on
//! identification classes, for finite groups and finite factor spaces.
//!
//! The `t` coordinates are discretized on a grid containing 0 and 1; the
//! factor spaces and the group are already finite, so "bijectivity" becomes a
//! finite statement: group the grid tuples of `prod (X_i * G)` into orbit
//! classes of the codiagonal `G^{k-1}` action, project every member, and
//! check (i) constancy on classes, (ii) injectivity across classes, and
//! (iii) that the image fills every grid-compatible canonical target.
//!
//! Comparisons are exact: members of one class share their `t` tuple, so the
//! projected barycentric coordinates agree bit-for-bit.

use std::collections::HashMap;

use serde_json::json;

use crate::algebra::FiniteGroup;
use crate::quotient::{join_project, simplex_coords};
use crate::spaces::{join_canonical, JoinFactorPoint, JoinTargetPoint};
use crate::verify::report::{ReportBuilder, SuiteRun};
use crate::verify::VerifyError;

/// Options for [`join_exhaustive`].
#[derive(Debug, Clone)]
pub struct JoinExhaustiveConfig {
    /// Grid points on `[0, 1]`, endpoints included (5 gives steps of 1/4).
    pub tgrid: usize,
    /// Enumeration guard: error out above this many tuples.
    pub tuple_cap: u64,
    /// Negative control: drop the first inverse in the action, which must
    /// break constancy for any group with an element of order above 2.
    pub corrupt_action: bool,
}

impl Default for JoinExhaustiveConfig {
    fn default() -> JoinExhaustiveConfig {
        JoinExhaustiveConfig { tgrid: 5, tuple_cap: 10_000_000, corrupt_action: false }
    }
}

/// A grid point of one factor `X_i * G` in canonical form: `g = 0` at
/// `t_idx = 0`, `x = 0` at the top of the grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct FactorState {
    x: usize,
    t_idx: usize,
    g: usize,
}

struct Enumeration {
    k: usize,
    tgrid: usize,
    xsizes: Vec<usize>,
    order: usize,
    /// canonical states of each factor, lexicographic
    states: Vec<Vec<FactorState>>,
}

impl Enumeration {
    fn new(group: &FiniteGroup, xsizes: &[usize], tgrid: usize) -> Enumeration {
        let top = tgrid - 1;
        let order = group.order();
        let states = xsizes
            .iter()
            .map(|&nx| {
                let mut v = Vec::new();
                for x in 0..nx {
                    v.push(FactorState { x, t_idx: 0, g: 0 });
                }
                for t_idx in 1..top {
                    for x in 0..nx {
                        for g in 0..order {
                            v.push(FactorState { x, t_idx, g });
                        }
                    }
                }
                for g in 0..order {
                    v.push(FactorState { x: 0, t_idx: top, g });
                }
                v
            })
            .collect();
        Enumeration { k: xsizes.len(), tgrid, xsizes: xsizes.to_vec(), order, states }
    }

    fn tuple_count(&self) -> u128 {
        self.states.iter().map(|s| s.len() as u128).product()
    }

    fn t_value(&self, t_idx: usize) -> f64 {
        t_idx as f64 / (self.tgrid - 1) as f64
    }

    /// Mixed-radix encoding of a canonical tuple.
    fn encode(&self, tuple: &[FactorState]) -> u64 {
        let mut code: u64 = 0;
        for (i, st) in tuple.iter().enumerate() {
            let radix = (self.xsizes[i] * self.tgrid * self.order) as u64;
            let digit = ((st.x * self.tgrid + st.t_idx) * self.order + st.g) as u64;
            code = code * radix + digit;
        }
        code
    }

    fn canonicalize(&self, tuple: &mut [FactorState]) {
        let top = self.tgrid - 1;
        for st in tuple.iter_mut() {
            if st.t_idx == 0 {
                st.g = 0;
            }
            if st.t_idx == top {
                st.x = 0;
            }
        }
    }

    /// The codiagonal action by `r in G^{k-1}`, canonicalized; `corrupt`
    /// replaces `r_1^{-1}` by `r_1` on the first slot.
    fn act(
        &self,
        group: &FiniteGroup,
        tuple: &[FactorState],
        r: &[usize],
        corrupt: bool,
    ) -> Vec<FactorState> {
        let mut out = tuple.to_vec();
        for (i, st) in out.iter_mut().enumerate() {
            let left = if i == 0 { 0 } else { r[i - 1] };
            let right = if i == self.k - 1 {
                0
            } else if i == 0 && corrupt {
                r[i]
            } else {
                group.inverse(r[i])
            };
            st.g = group.mul(group.mul(left, st.g), right);
        }
        self.canonicalize(&mut out);
        out
    }

    fn to_join_factors(&self, tuple: &[FactorState]) -> Vec<JoinFactorPoint> {
        tuple
            .iter()
            .map(|st| JoinFactorPoint::new(st.x, self.t_value(st.t_idx), st.g))
            .collect()
    }
}

/// Exact comparison key for a canonical join target.
fn target_key(t: &JoinTargetPoint) -> Vec<u64> {
    let mut key: Vec<u64> = t.xs.iter().map(|&x| x as u64).collect();
    key.push(t.g as u64);
    key.extend(t.s.iter().map(|v| v.to_bits()));
    key
}

/// Every grid-compatible canonical target of `X_1 * ... * X_k * G`.
fn expected_targets(enumeration: &Enumeration, group: &FiniteGroup) -> Vec<Vec<u64>> {
    let k = enumeration.k;
    let mut t_idx = vec![0usize; k];
    let mut out = Vec::new();
    loop {
        let ts: Vec<f64> = t_idx.iter().map(|&i| enumeration.t_value(i)).collect();
        let s = simplex_coords(&ts);
        // slot j is material iff s_j > 0; enumerate material indices only
        let material_x: Vec<usize> = (0..k).filter(|&j| s[j] > 0.0).collect();
        let group_material = s[k] > 0.0;
        let mut xs_choice = vec![0usize; k];
        enumerate_material(
            enumeration,
            group,
            &material_x,
            0,
            &mut xs_choice,
            group_material,
            &s,
            &mut out,
        );
        // advance the mixed-radix counter over t grids
        let mut pos = 0;
        loop {
            if pos == k {
                return out;
            }
            t_idx[pos] += 1;
            if t_idx[pos] < enumeration.tgrid {
                break;
            }
            t_idx[pos] = 0;
            pos += 1;
        }
    }
}

#[allow(clippy::too_many_arguments)]
fn enumerate_material(
    enumeration: &Enumeration,
    group: &FiniteGroup,
    material_x: &[usize],
    depth: usize,
    xs_choice: &mut Vec<usize>,
    group_material: bool,
    s: &[f64],
    out: &mut Vec<Vec<u64>>,
) {
    if depth == material_x.len() {
        let gs = if group_material { 0..group.order() } else { 0..1 };
        for g in gs {
            let point =
                JoinTargetPoint { xs: xs_choice.clone(), g, s: s.to_vec() };
            out.push(target_key(&join_canonical(&point)));
        }
        return;
    }
    let slot = material_x[depth];
    for x in 0..enumeration.xsizes[slot] {
        xs_choice[slot] = x;
        enumerate_material(enumeration, group, material_x, depth + 1, xs_choice, group_material, s, out);
        xs_choice[slot] = 0;
    }
}

/// Runs the exhaustive bijectivity check; see the module docs.
pub fn join_exhaustive(
    group: &FiniteGroup,
    xsizes: &[usize],
    cfg: &JoinExhaustiveConfig,
) -> Result<SuiteRun, VerifyError> {
    if xsizes.len() < 2 {
        return Err(VerifyError::InvalidArg(format!(
            "join verification needs k >= 2 factors, got {}",
            xsizes.len()
        )));
    }
    if cfg.tgrid < 2 {
        return Err(VerifyError::InvalidArg("t grid must contain 0 and 1".into()));
    }
    let enumeration = Enumeration::new(group, xsizes, cfg.tgrid);
    let tuples = enumeration.tuple_count();
    if tuples > u128::from(cfg.tuple_cap) {
        return Err(VerifyError::ResourceCap { tuples, cap: cfg.tuple_cap });
    }
    let k = enumeration.k;
    let params = json!({
        "group_order": group.order(),
        "xsizes": xsizes,
        "tgrid": cfg.tgrid,
        "corrupt_action": cfg.corrupt_action,
    });
    let mut builder = ReportBuilder::new("verify-join", params, 0, tuples as u64);

    // enumerate orbit classes
    let mut class_of: HashMap<u64, u32> = HashMap::new();
    let mut class_members: Vec<Vec<Vec<FactorState>>> = Vec::new();
    let mut torus = vec![0usize; k - 1];
    let mut indices = vec![0usize; k];
    let mut tuple: Vec<FactorState> = indices
        .iter()
        .enumerate()
        .map(|(i, &j)| enumeration.states[i][j])
        .collect();
    loop {
        let code = enumeration.encode(&tuple);
        if !class_of.contains_key(&code) {
            let id = class_members.len() as u32;
            let mut members: Vec<Vec<FactorState>> = Vec::new();
            torus.iter_mut().for_each(|r| *r = 0);
            loop {
                let moved = enumeration.act(group, &tuple, &torus, cfg.corrupt_action);
                let mcode = enumeration.encode(&moved);
                if class_of.insert(mcode, id).is_none() {
                    members.push(moved);
                }
                // advance r over G^{k-1}
                let mut pos = 0;
                loop {
                    if pos == k - 1 {
                        break;
                    }
                    torus[pos] += 1;
                    if torus[pos] < group.order() {
                        break;
                    }
                    torus[pos] = 0;
                    pos += 1;
                }
                if torus.iter().all(|&r| r == 0) {
                    break;
                }
            }
            class_members.push(members);
        }
        // advance the tuple
        let mut pos = 0;
        loop {
            if pos == k {
                break;
            }
            indices[pos] += 1;
            if indices[pos] < enumeration.states[pos].len() {
                tuple[pos] = enumeration.states[pos][indices[pos]];
                break;
            }
            indices[pos] = 0;
            tuple[pos] = enumeration.states[pos][0];
            pos += 1;
        }
        if pos == k {
            break;
        }
    }

    // (i) constancy on classes and (ii) injectivity across classes
    let mut image: HashMap<Vec<u64>, u32> = HashMap::new();
    let mut constancy_failures = 0u64;
    let mut injectivity_failures = 0u64;
    for (id, members) in class_members.iter().enumerate() {
        let mut first: Option<Vec<u64>> = None;
        for member in members {
            let projected = join_project(&enumeration.to_join_factors(member), group);
            let key = target_key(&projected);
            match &first {
                None => {
                    match image.get(&key) {
                        Some(&other) if other != id as u32 => {
                            injectivity_failures += 1;
                            if injectivity_failures <= 10 {
                                builder.record(
                                    id as u64,
                                    vec![crate::verify::report::CheckOutcome::measure(
                                        "class_collision",
                                        1.0,
                                        0.5,
                                        || json!({"class": id, "other": other}),
                                    )],
                                );
                            }
                        }
                        _ => {
                            image.insert(key.clone(), id as u32);
                        }
                    }
                    first = Some(key);
                }
                Some(expect) => {
                    if key != *expect {
                        constancy_failures += 1;
                        if constancy_failures <= 10 {
                            builder.record(
                                id as u64,
                                vec![crate::verify::report::CheckOutcome::measure(
                                    "class_constancy",
                                    1.0,
                                    0.5,
                                    || {
                                        json!({"class": id,
                                               "member": format!("{member:?}"),
                                               "projected": format!("{key:?}"),
                                               "expected": format!("{expect:?}")})
                                    },
                                )],
                            );
                        }
                    }
                }
            }
        }
    }

    // (iii) the image is exactly the grid-compatible target set
    let mut expected = expected_targets(&enumeration, group);
    expected.sort();
    expected.dedup();
    let mut image_keys: Vec<Vec<u64>> = image.keys().cloned().collect();
    image_keys.sort();
    if image_keys != expected {
        let missing = expected.iter().filter(|k| !image.contains_key(*k)).count();
        let extra = image_keys.len() - (expected.len() - missing);
        builder.record(
            0,
            vec![crate::verify::report::CheckOutcome::measure(
                "image_mismatch",
                1.0,
                0.5,
                || {
                    json!({"expected_targets": expected.len(), "image_targets": image_keys.len(),
                           "missing": missing, "extra": extra})
                },
            )],
        );
    }

    let mut run = builder.finish();
    if let serde_json::Value::Object(map) = &mut run.report.params {
        map.insert("classes".into(), json!(class_members.len()));
        map.insert("expected_targets".into(), json!(expected.len()));
        map.insert("constancy_failures".into(), json!(constancy_failures));
        map.insert("injectivity_failures".into(), json!(injectivity_failures));
    }
    Ok(run)
}
