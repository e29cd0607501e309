//! Data scenarios: gathering the data constraints that apply to a parameter
//! scenario, and producing values that satisfy them.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::OnceLock;

use chrono::{DateTime, NaiveDate};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use regex::Regex;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::selection::ParameterScenario;
use super::values::{self, RealisticValues, ValueProvider};
use super::ScenarioError;
use crate::model::{Constraint, DataProperty, InputParameter, Operand, Operation, ParamId, ParamType, RelOp, Relation};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DataConstraint {
    Relation(Relation),
    Property { param: ParamId, property: DataProperty, values: Vec<Value> },
}

impl DataConstraint {
    pub fn params(&self) -> Vec<&str> {
        match self {
            DataConstraint::Relation(r) => r.params(),
            DataConstraint::Property { param, .. } => vec![param.as_str()],
        }
    }
}

impl fmt::Display for DataConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DataConstraint::Relation(r) => write!(f, "{r}"),
            DataConstraint::Property { param, property, values } => {
                let vs: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                write!(f, "{param} {property:?} [{}]", vs.join(", "))
            }
        }
    }
}

/// Data constraints of `op` that bind on `scenario`.
pub fn gather_data_constraints(scenario: &ParameterScenario, op: &Operation) -> Vec<DataConstraint> {
    let sel = &scenario.selected;
    let all_selected = |ps: Vec<&str>| ps.iter().all(|p| sel.contains(*p));
    let mut out: Vec<DataConstraint> = Vec::new();
    let mut push = |c: DataConstraint| {
        if !out.contains(&c) {
            out.push(c);
        }
    };
    for c in &op.local_constraints {
        match c {
            Constraint::DataArithmetic(r) if all_selected(r.params()) => push(DataConstraint::Relation(r.clone())),
            Constraint::DataNonArithmetic { param, property, values } if sel.contains(param) => {
                push(DataConstraint::Property { param: param.clone(), property: *property, values: values.clone() })
            }
            Constraint::ParameterInfluencedDataValues { antecedent, consequent }
                if antecedent.holds(sel) && all_selected(consequent.params()) =>
            {
                push(DataConstraint::Relation(consequent.clone()))
            }
            Constraint::DataInfluencedParamSelection { antecedent, consequent } if all_selected(antecedent.params()) => {
                if consequent.holds(sel) {
                    push(DataConstraint::Relation(antecedent.clone()))
                } else {
                    push(DataConstraint::Relation(antecedent.negated()))
                }
            }
            _ => {}
        }
    }
    out
}

fn parse_datetime(s: &str) -> Option<i64> {
    DateTime::parse_from_rfc3339(s).ok().map(|d| d.timestamp())
}

fn parse_date(s: &str) -> Option<i64> {
    let epoch = NaiveDate::from_ymd_opt(1970, 1, 1)?;
    NaiveDate::parse_from_str(s, "%Y-%m-%d").ok().map(|d| (d - epoch).num_days())
}

fn as_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) => s.trim().parse::<f64>().ok(),
        _ => None,
    }
}

/// Ordering between two values: numeric, then date-time, then date.
pub fn compare(a: &Value, b: &Value) -> Option<Ordering> {
    if let (Some(x), Some(y)) = (as_f64(a), as_f64(b)) {
        return x.partial_cmp(&y);
    }
    let (Value::String(x), Value::String(y)) = (a, b) else { return None };
    let dt = |s: &str| parse_datetime(s).or_else(|| parse_date(s).map(|d| d * 86_400));
    Some(dt(x)?.cmp(&dt(y)?))
}

pub fn values_equal(a: &Value, b: &Value) -> bool {
    if a == b {
        return true;
    }
    match (a, b) {
        (Value::String(x), Value::String(y)) => x.eq_ignore_ascii_case(y),
        _ => compare(a, b) == Some(Ordering::Equal) || a.as_str().is_some_and(|s| s == b) || b.as_str().is_some_and(|s| s == a),
    }
}

fn format_re(format: &str) -> Option<&'static Regex> {
    static R: OnceLock<BTreeMap<&'static str, Regex>> = OnceLock::new();
    let table = R.get_or_init(|| {
        [
            ("email", r"^[^@\s]+@[^@\s]+\.[A-Za-z]{2,}$"),
            ("uuid", r"^[0-9a-fA-F]{8}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{4}-[0-9a-fA-F]{12}$"),
            ("ipv4", r"^(\d{1,3}\.){3}\d{1,3}$"),
            ("ipv6", r"^[0-9a-fA-F:]+$"),
            ("uri", r"^[a-zA-Z][a-zA-Z0-9+.-]*://\S+$"),
            ("hostname", r"^[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*$"),
            ("phone", r"^\+?[0-9][0-9 ()-]{5,}$"),
            ("integer", r"^-?\d+$"),
            ("number", r"^-?\d+(\.\d+)?$"),
            ("boolean", r"^(true|false)$"),
        ]
        .into_iter()
        .map(|(k, r)| (k, Regex::new(r).unwrap()))
        .collect()
    });
    table.get(format)
}

fn matches_format(v: &Value, format: &str) -> bool {
    let text = match v {
        Value::String(s) => s.clone(),
        Value::Number(_) | Value::Bool(_) => v.to_string(),
        _ => return false,
    };
    match format {
        "date-time" => parse_datetime(&text).is_some(),
        "date" => parse_date(&text).is_some(),
        other => format_re(other).is_none_or(|r| r.is_match(&text)),
    }
}

fn relation_holds(op: RelOp, lhs: &Value, rhs: &Value) -> bool {
    match op {
        RelOp::Eq => values_equal(lhs, rhs),
        RelOp::Ne => !values_equal(lhs, rhs),
        _ => compare(lhs, rhs).is_some_and(|o| op.holds(o)),
    }
}

/// Whether `assignment` satisfies `c`. Constraints over unassigned
/// parameters hold vacuously.
pub fn evaluate(c: &DataConstraint, assignment: &BTreeMap<ParamId, Value>) -> bool {
    match c {
        DataConstraint::Relation(r) => {
            let Some(lhs) = assignment.get(&r.lhs) else { return true };
            match &r.rhs {
                Operand::Param(p) => assignment.get(p).is_none_or(|rhs| relation_holds(r.op, lhs, rhs)),
                Operand::Const(v) => relation_holds(r.op, lhs, v),
                Operand::List(vs) => match r.op {
                    RelOp::Eq => vs.iter().any(|v| values_equal(lhs, v)),
                    RelOp::Ne => !vs.iter().any(|v| values_equal(lhs, v)),
                    op => vs.iter().all(|v| relation_holds(op, lhs, v)),
                },
            }
        }
        DataConstraint::Property { param, property, values } => {
            let Some(v) = assignment.get(param) else { return true };
            match property {
                DataProperty::Categorical => values.is_empty() || values.iter().any(|x| values_equal(v, x)),
                DataProperty::Unique => !values.iter().any(|x| values_equal(v, x)),
                DataProperty::Format => values.iter().filter_map(Value::as_str).all(|f| matches_format(v, f)),
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Solver,
    RealisticProvider,
    SpecExample,
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataScenario {
    pub target_op: String,
    pub assignment: BTreeMap<ParamId, Value>,
    pub provenance: BTreeMap<ParamId, Provenance>,
}

/// Ordered value domains the solver can search numerically.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Domain {
    Int,
    Num,
    /// Integer carried as a string parameter.
    IntText,
    DateTime,
    Date,
    Text,
    Bool,
    Other,
}

impl Domain {
    fn of(p: &InputParameter, constraints: &[&DataConstraint]) -> Domain {
        let format = p.pc.format.as_deref();
        match &p.ptype {
            ParamType::Integer => Domain::Int,
            ParamType::Number => Domain::Num,
            ParamType::Boolean => Domain::Bool,
            ParamType::String if format == Some("date-time") => Domain::DateTime,
            ParamType::String if format == Some("date") => Domain::Date,
            ParamType::String => {
                let words = crate::analyzer::text::split_identifier(p.leaf_name());
                let dated = |ws: &[&str]| words.iter().any(|w| ws.contains(&w.as_str()));
                let ordered = constraints.iter().any(|c| matches!(c, DataConstraint::Relation(r) if r.op.is_ordering()));
                if dated(&["timestamp", "datetime", "time"]) {
                    Domain::DateTime
                } else if dated(&["date"]) {
                    Domain::Date
                } else if ordered && p.examples.iter().all(|e| as_f64(e).is_some()) {
                    Domain::IntText
                } else {
                    Domain::Text
                }
            }
            _ => Domain::Other,
        }
    }

    fn ordered(self) -> bool {
        matches!(self, Domain::Int | Domain::Num | Domain::IntText | Domain::DateTime | Domain::Date)
    }

    /// Unit used to step off a strict bound.
    fn step(self) -> f64 {
        match self {
            Domain::DateTime => 86_400.0,
            _ => 1.0,
        }
    }

    fn key(self, v: &Value) -> Option<f64> {
        match self {
            Domain::DateTime => match v {
                Value::String(s) => parse_datetime(s).or_else(|| parse_date(s).map(|d| d * 86_400)).map(|x| x as f64),
                _ => as_f64(v),
            },
            Domain::Date => v.as_str().and_then(parse_date).map(|x| x as f64),
            _ => as_f64(v),
        }
    }

    fn render(self, k: f64) -> Value {
        match self {
            Domain::Int => json!(k.round() as i64),
            Domain::Num => json!(k),
            Domain::IntText => Value::String((k.round() as i64).to_string()),
            Domain::DateTime => Value::String(values::format_datetime(k as i64)),
            Domain::Date => Value::String(values::format_date(k as i64)),
            _ => json!(k),
        }
    }
}

/// Inclusive key interval for an ordered parameter.
#[derive(Debug, Clone, Copy)]
struct Interval {
    lo: f64,
    hi: f64,
}

fn relation_bound(op: RelOp, k: f64, step: f64, iv: &mut Interval) {
    match op {
        RelOp::Gt => iv.lo = iv.lo.max(k + step),
        RelOp::Ge => iv.lo = iv.lo.max(k),
        RelOp::Lt => iv.hi = iv.hi.min(k - step),
        RelOp::Le => iv.hi = iv.hi.min(k),
        RelOp::Eq => {
            iv.lo = iv.lo.max(k);
            iv.hi = iv.hi.min(k);
        }
        RelOp::Ne => {}
    }
}

struct Solver<'a> {
    params: Vec<&'a InputParameter>,
    domains: BTreeMap<&'a str, Domain>,
    constraints: &'a [DataConstraint],
    with_document_bounds: bool,
}

impl<'a> Solver<'a> {
    fn domain(&self, id: &str) -> Domain {
        self.domains.get(id).copied().unwrap_or(Domain::Other)
    }

    /// Bounds from constants and the document, tightened across
    /// parameter-to-parameter orderings until stable.
    fn intervals(&self) -> Option<BTreeMap<&'a str, Interval>> {
        let mut ivs: BTreeMap<&str, Interval> = BTreeMap::new();
        for p in &self.params {
            let d = self.domain(&p.id);
            if !d.ordered() {
                continue;
            }
            let mut iv = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };
            if self.with_document_bounds && matches!(d, Domain::Int | Domain::Num | Domain::IntText) {
                if let Some(m) = p.pc.minimum {
                    relation_bound(if p.pc.exclusive_minimum { RelOp::Gt } else { RelOp::Ge }, m, d.step(), &mut iv);
                }
                if let Some(m) = p.pc.maximum {
                    relation_bound(if p.pc.exclusive_maximum { RelOp::Lt } else { RelOp::Le }, m, d.step(), &mut iv);
                }
            }
            ivs.insert(p.id.as_str(), iv);
        }
        for c in self.constraints {
            if let DataConstraint::Relation(r) = c {
                let d = self.domain(&r.lhs);
                if let (Operand::Const(v), Some(iv)) = (&r.rhs, ivs.get_mut(r.lhs.as_str())) {
                    if let Some(k) = d.key(v) {
                        relation_bound(r.op, k, d.step(), iv);
                    }
                }
            }
        }
        for _ in 0..=self.params.len() * 2 {
            let mut changed = false;
            for c in self.constraints {
                let DataConstraint::Relation(Relation { lhs, op, rhs: Operand::Param(rhs) }) = c else { continue };
                let (Some(a), Some(b)) = (ivs.get(lhs.as_str()).copied(), ivs.get(rhs.as_str()).copied()) else { continue };
                let step = self.domain(lhs).step().max(self.domain(rhs).step());
                let (mut na, mut nb) = (a, b);
                match op {
                    RelOp::Gt => {
                        na.lo = na.lo.max(b.lo + step);
                        nb.hi = nb.hi.min(a.hi - step);
                    }
                    RelOp::Ge => {
                        na.lo = na.lo.max(b.lo);
                        nb.hi = nb.hi.min(a.hi);
                    }
                    RelOp::Lt => {
                        na.hi = na.hi.min(b.hi - step);
                        nb.lo = nb.lo.max(a.lo + step);
                    }
                    RelOp::Le => {
                        na.hi = na.hi.min(b.hi);
                        nb.lo = nb.lo.max(a.lo);
                    }
                    RelOp::Eq => {
                        na.lo = a.lo.max(b.lo);
                        na.hi = a.hi.min(b.hi);
                        nb = na;
                    }
                    RelOp::Ne => {}
                }
                if na.lo > na.hi || nb.lo > nb.hi {
                    return None;
                }
                if (na.lo, na.hi, nb.lo, nb.hi) != (a.lo, a.hi, b.lo, b.hi) {
                    changed = true;
                    ivs.insert(lhs.as_str(), na);
                    ivs.insert(rhs.as_str(), nb);
                }
            }
            if !changed {
                return ivs.values().all(|iv| iv.lo <= iv.hi).then_some(ivs);
            }
        }
        // bounds still moving: an ordering cycle with no solution
        None
    }

    fn candidates(
        &self,
        p: &InputParameter,
        current: &Value,
        iv: Option<Interval>,
        assigned: &BTreeMap<ParamId, Value>,
        rng: &mut ChaCha8Rng,
    ) -> Vec<Value> {
        let d = self.domain(&p.id);
        let mut out = vec![current.clone()];
        let mine: Vec<&DataConstraint> = self.constraints.iter().filter(|c| c.params().contains(&p.id.as_str())).collect();
        for c in &mine {
            match c {
                DataConstraint::Relation(r) if r.op == RelOp::Eq => match &r.rhs {
                    Operand::Const(v) if r.lhs == p.id => out.push(coerce(d, v)),
                    Operand::List(vs) if r.lhs == p.id => out.extend(rotate(vs, rng).iter().map(|v| coerce(d, v))),
                    Operand::Param(q) => {
                        let other = if r.lhs == p.id { q } else { &r.lhs };
                        out.extend(assigned.get(other).cloned());
                    }
                    _ => {}
                },
                DataConstraint::Property { property: DataProperty::Categorical, values, .. } => {
                    out.extend(rotate(values, rng).iter().map(|v| coerce(d, v)))
                }
                DataConstraint::Property { property: DataProperty::Unique, .. } => out.push(fresh(p, current, rng)),
                DataConstraint::Property { property: DataProperty::Format, values, .. } => {
                    out.extend(values.iter().filter_map(Value::as_str).filter_map(|f| values::by_format(f, rng)))
                }
                _ => {}
            }
        }
        if let Some(iv) = iv {
            let step = d.step();
            let cur = d.key(current);
            let mut keys = Vec::new();
            if iv.lo.is_finite() && iv.hi.is_finite() {
                keys.extend([iv.lo, iv.hi, ((iv.lo + iv.hi) / 2.0 / step).floor() * step]);
            } else if iv.lo.is_finite() {
                keys.extend([iv.lo + step, iv.lo, iv.lo + 10.0 * step]);
            } else if iv.hi.is_finite() {
                keys.extend([iv.hi - step, iv.hi, iv.hi - 10.0 * step]);
            }
            // stay close to already assigned neighbours
            for c in &mine {
                if let DataConstraint::Relation(Relation { lhs, rhs: Operand::Param(q), .. }) = c {
                    let other = if lhs == &p.id { q } else { lhs };
                    if let Some(k) = assigned.get(other).and_then(|v| d.key(v)) {
                        keys.extend([k + step, k - step, k]);
                    }
                }
            }
            if let Some(k) = cur {
                keys.extend([k + step, k - step]);
            }
            keys.extend([0.0, 1.0, -1.0].map(|x| x * step));
            let ok = |k: f64| k >= iv.lo && k <= iv.hi;
            out.extend(keys.into_iter().filter(|k| k.is_finite() && ok(*k)).map(|k| d.render(k)));
        }
        match d {
            Domain::Bool => out.extend([json!(true), json!(false)]),
            Domain::Text => out.push(fresh(p, current, rng)),
            _ => {}
        }
        out
    }

    fn consistent(&self, id: &str, assigned: &BTreeMap<ParamId, Value>) -> bool {
        self.constraints
            .iter()
            .filter(|c| c.params().contains(&id))
            .all(|c| c.params().iter().any(|q| !assigned.contains_key(*q)) || evaluate(c, assigned))
    }

    /// Backtracking over candidate values, parameters in interval order.
    #[allow(clippy::too_many_arguments)]
    fn assign(
        &self,
        order: &[&'a InputParameter],
        at: usize,
        initial: &BTreeMap<ParamId, Value>,
        ivs: &BTreeMap<&str, Interval>,
        assigned: &mut BTreeMap<ParamId, Value>,
        rng: &mut ChaCha8Rng,
        budget: &mut usize,
    ) -> bool {
        let Some(p) = order.get(at) else { return true };
        let current = initial.get(&p.id).cloned().unwrap_or(Value::Null);
        let mut seen: Vec<Value> = Vec::new();
        for v in self.candidates(p, &current, ivs.get(p.id.as_str()).copied(), assigned, rng) {
            if seen.contains(&v) {
                continue;
            }
            if *budget == 0 {
                return false;
            }
            *budget -= 1;
            seen.push(v.clone());
            assigned.insert(p.id.clone(), v);
            if self.consistent(&p.id, assigned) && self.assign(order, at + 1, initial, ivs, assigned, rng, budget) {
                return true;
            }
            assigned.remove(&p.id);
        }
        false
    }

    fn solve(&self, initial: &BTreeMap<ParamId, Value>, rng: &mut ChaCha8Rng) -> Option<BTreeMap<ParamId, Value>> {
        let ivs = self.intervals()?;
        let mut order = self.params.clone();
        // tightly bounded parameters first
        order.sort_by(|a, b| {
            let w = |p: &InputParameter| ivs.get(p.id.as_str()).map_or(f64::INFINITY, |iv| iv.hi - iv.lo);
            w(a).total_cmp(&w(b))
        });
        let mut assigned = BTreeMap::new();
        let mut budget = 20_000;
        self.assign(&order, 0, initial, &ivs, &mut assigned, rng, &mut budget).then_some(assigned)
    }
}

fn rotate(vs: &[Value], rng: &mut ChaCha8Rng) -> Vec<Value> {
    if vs.is_empty() {
        return Vec::new();
    }
    let start = rng.gen_range(0..vs.len());
    vs[start..].iter().chain(&vs[..start]).cloned().collect()
}

/// A value of the parameter's domain expressed from `v`.
fn coerce(d: Domain, v: &Value) -> Value {
    match (d, v) {
        (Domain::Int, Value::String(s)) => s.trim().parse::<i64>().map(Value::from).unwrap_or_else(|_| v.clone()),
        (Domain::Num, Value::String(s)) => s.trim().parse::<f64>().map(|f| json!(f)).unwrap_or_else(|_| v.clone()),
        (Domain::Text | Domain::IntText | Domain::DateTime | Domain::Date, Value::Number(_) | Value::Bool(_)) => {
            Value::String(v.to_string())
        }
        (Domain::Bool, Value::String(s)) => match s.to_ascii_lowercase().as_str() {
            "true" => json!(true),
            "false" => json!(false),
            _ => v.clone(),
        },
        _ => v.clone(),
    }
}

/// A value unlikely to have been used before.
fn fresh(p: &InputParameter, current: &Value, rng: &mut ChaCha8Rng) -> Value {
    let tag: u32 = rng.gen_range(100_000..999_999);
    match &p.ptype {
        ParamType::Integer => json!(tag),
        ParamType::Number => json!(tag as f64),
        _ => match current.as_str() {
            Some(s) if s.contains('@') => {
                let (user, domain) = s.split_once('@').unwrap();
                Value::String(format!("{user}.{tag}@{domain}"))
            }
            Some(s) if !s.is_empty() => Value::String(format!("{s}{tag}")),
            _ => Value::String(format!("v{tag}")),
        },
    }
}

/// Stable 64-bit FNV-1a, for seeding.
fn fnv(parts: &[&str]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for b in part.bytes().chain([0xff]) {
            h ^= u64::from(b);
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
    }
    h
}

/// Produces data scenarios. Value sources, by priority: document examples
/// compatible with the constraints, the provider, random values; anything
/// failing validation is replaced through the solver.
pub struct DataGenerator {
    pub seed: u64,
    provider: Box<dyn ValueProvider>,
}

impl Default for DataGenerator {
    fn default() -> Self {
        DataGenerator::new(0)
    }
}

impl DataGenerator {
    pub fn new(seed: u64) -> Self {
        DataGenerator { seed, provider: Box::new(RealisticValues) }
    }

    pub fn with_provider(seed: u64, provider: Box<dyn ValueProvider>) -> Self {
        DataGenerator { seed, provider }
    }

    pub fn provider_name(&self) -> &str {
        self.provider.name()
    }

    /// `k` data scenarios for `scenario`. `salt` varies draws between
    /// iterations of the same run.
    pub fn generate(
        &self,
        scenario: &ParameterScenario,
        op: &Operation,
        constraints: &[DataConstraint],
        k: usize,
        salt: u64,
    ) -> Result<Vec<DataScenario>, ScenarioError> {
        let params: Vec<&InputParameter> = op.live_inputs().filter(|p| scenario.selected.contains(&p.id)).collect();
        let selected_key: Vec<&str> = scenario.selected.iter().map(String::as_str).collect();
        let seed = fnv(&[&self.seed.to_string(), &op.opname, &selected_key.join(","), &salt.to_string()]);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let texts: Vec<String> = constraints.iter().map(|c| c.to_string()).collect();
        let rows = self.provider.provide(op, &params, &texts, k.max(1), &mut rng);
        let fallback = RealisticValues;

        let mut out = Vec::with_capacity(k);
        for i in 0..k.max(1) {
            let mut assignment = BTreeMap::new();
            let mut provenance = BTreeMap::new();
            for p in &params {
                let unary: Vec<&DataConstraint> =
                    constraints.iter().filter(|c| c.params().iter().all(|q| *q == p.id)).collect();
                let fits = |v: &Value| {
                    let one = BTreeMap::from([(p.id.clone(), v.clone())]);
                    unary.iter().all(|c| evaluate(c, &one))
                };
                let example = (0..p.examples.len()).map(|j| &p.examples[(i + j) % p.examples.len()]).find(|v| fits(v));
                let (v, src) = if let Some(e) = example {
                    (e.clone(), Provenance::SpecExample)
                } else if let Some(v) = rows.get(i).and_then(|r| r.get(&p.id)) {
                    (v.clone(), Provenance::RealisticProvider)
                } else if let Some(v) = fallback.value(p, &mut rng) {
                    (v, Provenance::RealisticProvider)
                } else {
                    (values::random_value(p, &mut rng), Provenance::Random)
                };
                assignment.insert(p.id.clone(), v);
                provenance.insert(p.id.clone(), src);
            }
            if !constraints.iter().all(|c| evaluate(c, &assignment)) {
                let solved = self.repair(&params, constraints, &assignment, &mut rng).ok_or_else(|| {
                    ScenarioError::UnsatisfiableData(format!(
                        "{}: {}",
                        op.opname,
                        texts.join("; ")
                    ))
                })?;
                for (id, v) in solved {
                    if assignment.get(&id) != Some(&v) {
                        provenance.insert(id.clone(), Provenance::Solver);
                        assignment.insert(id, v);
                    }
                }
            }
            out.push(DataScenario { target_op: op.opname.clone(), assignment, provenance });
        }
        Ok(out)
    }

    fn repair(
        &self,
        params: &[&InputParameter],
        constraints: &[DataConstraint],
        initial: &BTreeMap<ParamId, Value>,
        rng: &mut ChaCha8Rng,
    ) -> Option<BTreeMap<ParamId, Value>> {
        let involved: BTreeSet<&str> = constraints.iter().flat_map(|c| c.params()).collect();
        let params: Vec<&InputParameter> = params.iter().copied().filter(|p| involved.contains(p.id.as_str())).collect();
        let refs: Vec<&DataConstraint> = constraints.iter().collect();
        let domains = params
            .iter()
            .map(|p| {
                let mine: Vec<&DataConstraint> =
                    refs.iter().copied().filter(|c| c.params().contains(&p.id.as_str())).collect();
                (p.id.as_str(), Domain::of(p, &mine))
            })
            .collect();
        let mut solver = Solver { params, domains, constraints, with_document_bounds: true };
        let solved = solver.solve(initial, rng).or_else(|| {
            solver.with_document_bounds = false;
            solver.solve(initial, rng)
        })?;
        constraints.iter().all(|c| evaluate(c, &solved)).then_some(solved)
    }
}

/// `k` data scenarios from the default generator.
pub fn generate_data(
    scenario: &ParameterScenario,
    op: &Operation,
    constraints: &[DataConstraint],
    k: usize,
    seed: u64,
) -> Result<Vec<DataScenario>, ScenarioError> {
    DataGenerator::new(seed).generate(scenario, op, constraints, k, 0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn comparisons() {
        assert_eq!(compare(&json!(2), &json!("10")), Some(Ordering::Less));
        assert_eq!(compare(&json!("2021-01-02T00:00:00Z"), &json!("2021-01-01")), Some(Ordering::Greater));
        assert_eq!(compare(&json!("a"), &json!("b")), None);
        assert!(values_equal(&json!("EN"), &json!("en")));
        assert!(values_equal(&json!(5), &json!("5")));
    }

    #[test]
    fn formats() {
        assert!(matches_format(&json!("a@b.io"), "email"));
        assert!(!matches_format(&json!("nope"), "email"));
        assert!(matches_format(&json!("2024-02-29"), "date"));
    }

    #[test]
    fn fnv_is_stable() {
        assert_eq!(fnv(&["a"]), fnv(&["a"]));
        assert_ne!(fnv(&["a", "b"]), fnv(&["ab"]));
    }
}
