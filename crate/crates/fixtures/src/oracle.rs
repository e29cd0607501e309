//! Brute-force reference for parameter scenarios. Evaluates constraint
//! semantics on every subset directly, without the clause encoding, so it
//! can be checked against the solver.

use std::collections::BTreeSet;

use apirefine::model::{
    make_param_id, Constraint, InputParameter, Location, Method, Operand, Operation, ParamType, RelOp, Relation,
    Selection, ValueConstraints,
};
use apirefine::scenario::ScenarioKind;
use rand::Rng;
use serde_json::json;

/// Cap on maximal scenarios, as in the solver defaults.
pub const MAX_MAXIMAL: usize = 8;

fn is_mandatory(op: &Operation, p: &InputParameter) -> bool {
    p.is_required || op.local_constraints.contains(&Constraint::AdditionalMandatory { param: p.id.clone() })
}

fn group_ok(kind: &str, ps: &[String], sel: &BTreeSet<String>, optional: &[&String]) -> bool {
    let n = ps.iter().filter(|p| sel.contains(*p)).count();
    match kind {
        // the empty optional selection is admitted
        "or" => !optional.iter().any(|p| sel.contains(*p)) || n > 0,
        "one" => n <= 1,
        _ => n == 0 || n == ps.len(),
    }
}

fn admits(op: &Operation, c: &Constraint, sel: &BTreeSet<String>) -> bool {
    let optional: Vec<&String> = op.live_inputs().filter(|p| !is_mandatory(op, p)).map(|p| &p.id).collect();
    match c {
        Constraint::AdditionalMandatory { param } => sel.contains(param),
        Constraint::Or { params } => group_ok("or", params, sel, &optional),
        Constraint::One { params } => group_ok("one", params, sel, &optional),
        Constraint::AllOrNone { params } => group_ok("all", params, sel, &optional),
        Constraint::ConditionalParameterRequired { p1, p1_present, p2, p2_present } => {
            sel.contains(p2) != *p2_present || sel.contains(p1) == *p1_present
        }
        _ => true,
    }
}

fn consequent_admits(op: &Operation, s: &Selection, sel: &BTreeSet<String>) -> bool {
    let c = match s {
        Selection::Present { param } => return sel.contains(param),
        Selection::Absent { param } => return !sel.contains(param),
        Selection::Or { params } => Constraint::Or { params: params.clone() },
        Selection::One { params } => Constraint::One { params: params.clone() },
        Selection::AllOrNone { params } => Constraint::AllOrNone { params: params.clone() },
        Selection::Conditional { p1, p1_present, p2, p2_present } => Constraint::ConditionalParameterRequired {
            p1: p1.clone(),
            p1_present: *p1_present,
            p2: p2.clone(),
            p2_present: *p2_present,
        },
    };
    admits(op, &c, sel)
}

/// Every admitted subset filtered to maximal, minimal and covering
/// scenarios, in solver order.
pub fn scenarios(op: &Operation) -> Vec<(BTreeSet<String>, ScenarioKind)> {
    let vars: Vec<&InputParameter> = op.live_inputs().collect();
    let n = vars.len();
    let mandatory: Vec<bool> = vars.iter().map(|p| is_mandatory(op, p)).collect();
    let splits: Vec<&Constraint> =
        op.local_constraints.iter().filter(|c| matches!(c, Constraint::DataInfluencedParamSelection { .. })).collect();
    let mut result: Vec<(BTreeSet<String>, ScenarioKind)> = Vec::new();
    for choice in 0u32..(1 << splits.len()) {
        let mut sols: Vec<Vec<usize>> = Vec::new();
        for mask in 0u32..(1 << n) {
            let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
            let sel: BTreeSet<String> = idx.iter().map(|i| vars[*i].id.clone()).collect();
            let base = (0..n).all(|i| !mandatory[i] || sel.contains(&vars[i].id))
                && op.local_constraints.iter().all(|c| admits(op, c, &sel));
            let split_ok = splits.iter().enumerate().all(|(j, c)| {
                let Constraint::DataInfluencedParamSelection { antecedent, consequent } = c else { unreachable!() };
                if choice >> (splits.len() - 1 - j) & 1 == 1 {
                    return true;
                }
                consequent_admits(op, consequent, &sel) && antecedent.params().iter().all(|p| sel.contains(*p))
            });
            if base && split_ok {
                sols.push(idx);
            }
        }
        if sols.is_empty() {
            continue;
        }
        sols.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        let min_len = sols[0].len();
        let max_len = sols.iter().map(Vec::len).max().unwrap_or(0);
        let mut picked: Vec<(Vec<usize>, ScenarioKind)> = sols
            .iter()
            .filter(|s| s.len() == max_len)
            .take(MAX_MAXIMAL)
            .map(|s| (s.clone(), ScenarioKind::Maximal))
            .collect();
        let minimal = sols.iter().find(|s| s.len() == min_len).cloned().unwrap_or_default();
        if !picked.iter().any(|(s, _)| *s == minimal) {
            picked.push((minimal, ScenarioKind::Minimal));
        }
        for v in (0..n).filter(|v| !mandatory[*v]) {
            if picked.iter().any(|(s, _)| s.contains(&v)) {
                continue;
            }
            if let Some(s) = sols.iter().find(|s| s.contains(&v)) {
                picked.push((s.clone(), ScenarioKind::OptionalCovering));
            }
        }
        for (s, kind) in picked {
            let set: BTreeSet<String> = s.iter().map(|i| vars[*i].id.clone()).collect();
            if !result.iter().any(|(r, _)| *r == set) {
                result.push((set, kind));
            }
        }
    }
    result
}

pub fn query_param(op: &str, name: &str, required: bool) -> InputParameter {
    InputParameter {
        id: make_param_id(op, Location::Query, name),
        name: name.into(),
        ptype: ParamType::String,
        is_required: required,
        loc: Location::Query,
        pc: ValueConstraints::default(),
        examples: vec![],
        locally_required: required,
        recursive: false,
        body_root: false,
        removed: false,
    }
}

pub fn bare_operation(name: &str, inputs: Vec<InputParameter>, constraints: Vec<Constraint>) -> Operation {
    Operation {
        opname: name.into(),
        path: format!("/{name}"),
        tag: vec![],
        method: Method::Get,
        inputs,
        outputs: vec![],
        local_constraints: constraints,
        request_media_type: None,
        produces_collection: false,
        needs_user_input: false,
    }
}

/// A random operation with up to `max_vars` query parameters and up to four
/// selection constraints of every kind.
pub fn random_operation(rng: &mut impl Rng, max_vars: usize) -> Operation {
    let n = rng.gen_range(1..=max_vars);
    let inputs: Vec<InputParameter> =
        (0..n).map(|i| query_param("r", &format!("p{i}"), i % 3 == 0 && rng.gen_bool(0.5))).collect();
    let id = |i: usize| make_param_id("r", Location::Query, &format!("p{}", i % n));
    let mut constraints = Vec::new();
    for _ in 0..rng.gen_range(0..=4) {
        let width = rng.gen_range(2..=3);
        let mut ps: Vec<String> = (0..width).map(|_| id(rng.gen_range(0..12))).collect();
        ps.sort();
        ps.dedup();
        if ps.len() < 2 {
            continue;
        }
        constraints.push(match rng.gen_range(0..6) {
            0 => Constraint::Or { params: ps },
            1 => Constraint::One { params: ps },
            2 => Constraint::AllOrNone { params: ps },
            3 => Constraint::ConditionalParameterRequired {
                p1: ps[0].clone(),
                p1_present: rng.gen(),
                p2: ps[1].clone(),
                p2_present: rng.gen(),
            },
            4 => Constraint::AdditionalMandatory { param: ps[0].clone() },
            _ => Constraint::DataInfluencedParamSelection {
                antecedent: Relation::new(ps[0].clone(), RelOp::Eq, Operand::Const(json!("x"))),
                consequent: Selection::One { params: ps[1..].to_vec() },
            },
        });
    }
    bare_operation("r", inputs, constraints)
}
