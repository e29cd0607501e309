//! Coverage metrics, defect lists and report rendering.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::sync::OnceLock;

use regex::Regex;
use serde::{Deserialize, Serialize};

use crate::analyzer::{message_text, normalize_message, FailureKey, RequestSnapshot};
use crate::engine::{ExecutionReport, StatusCounts};
use crate::model::SpecModel;

pub const REPORT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationDistribution {
    pub iteration: usize,
    pub counts: StatusCounts,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DefectRecord {
    pub op_id: String,
    pub status: u16,
    pub normalized_message: String,
    pub has_stack_trace: bool,
    pub request: RequestSnapshot,
}

impl DefectRecord {
    pub fn key(&self) -> FailureKey {
        FailureKey { op_id: self.op_id.clone(), status: self.status, normalized_message: self.normalized_message.clone() }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub report_version: u32,
    /// Operations in the document as loaded (the coverage denominator).
    pub operations: usize,
    /// Percent of operations with at least one 2xx or 5xx response.
    pub oc: f64,
    /// Percent of operations with at least one 2xx response.
    pub oc_2xx: f64,
    pub iterations: Vec<IterationDistribution>,
    pub total_hits: usize,
    pub defects: Vec<DefectRecord>,
}

fn frame_line() -> &'static Regex {
    static RE: OnceLock<Regex> = OnceLock::new();
    RE.get_or_init(|| Regex::new(r"(?m)^\s*at\s+[\w$.<>/\-]+\s*\(.*\)").expect("valid regex"))
}

/// Stack-trace heuristic: two or more `at name(...)` frames, or a Python
/// traceback, or an exception name.
pub fn has_stack_trace(body: &str) -> bool {
    frame_line().find_iter(body).count() >= 2 || body.contains("Traceback") || body.contains("Exception")
}

fn percent(n: usize, d: usize) -> f64 {
    if d == 0 {
        0.0
    } else {
        100.0 * n as f64 / d as f64
    }
}

pub fn compute_metrics(reports: &[ExecutionReport], model: &SpecModel) -> Metrics {
    let mut reached: BTreeSet<&str> = BTreeSet::new();
    let mut reached_2xx: BTreeSet<&str> = BTreeSet::new();
    let mut defects: BTreeMap<FailureKey, DefectRecord> = BTreeMap::new();
    let mut iterations = Vec::new();
    for r in reports {
        let mut counts = StatusCounts::default();
        for q in &r.requests {
            counts.add(q.status);
            if (200..300).contains(&q.status) {
                reached.insert(&q.op_id);
                reached_2xx.insert(&q.op_id);
            } else if (500..600).contains(&q.status) {
                reached.insert(&q.op_id);
                let d = DefectRecord {
                    op_id: q.op_id.clone(),
                    status: q.status,
                    normalized_message: normalize_message(&message_text(&q.body)),
                    has_stack_trace: has_stack_trace(&q.body),
                    request: q.request.clone(),
                };
                defects.entry(d.key()).or_insert(d);
            }
        }
        iterations.push(IterationDistribution { iteration: r.iteration, counts });
    }
    let total = model.original_operation_count.max(model.operations.len());
    Metrics {
        report_version: REPORT_VERSION,
        operations: total,
        oc: percent(reached.len(), total),
        oc_2xx: percent(reached_2xx.len(), total),
        iterations,
        total_hits: reports.iter().map(|r| r.issued).sum(),
        defects: defects.into_values().collect(),
    }
}

impl Metrics {
    /// The ordering and hit-count invariants against the source reports.
    pub fn check(&self, reports: &[ExecutionReport]) -> Result<(), String> {
        if !(0.0 <= self.oc_2xx && self.oc_2xx <= self.oc && self.oc <= 100.0) {
            return Err(format!("coverage out of order: oc_2xx {} oc {}", self.oc_2xx, self.oc));
        }
        let issued: usize = reports.iter().map(|r| r.issued).sum();
        let recorded: usize = reports.iter().map(|r| r.requests.len()).sum();
        if self.total_hits != issued || issued != recorded {
            return Err(format!("hit counts differ: metrics {} issued {issued} recorded {recorded}", self.total_hits));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Json,
    Text,
}

pub fn emit_report(m: &Metrics, format: ReportFormat) -> String {
    match format {
        ReportFormat::Json => serde_json::to_string_pretty(m).expect("metrics serialize"),
        ReportFormat::Text => render_text(m),
    }
}

fn render_text(m: &Metrics) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "operations  {}", m.operations);
    let _ = writeln!(s, "oc          {:.1}%", m.oc);
    let _ = writeln!(s, "oc_2xx      {:.1}%", m.oc_2xx);
    let _ = writeln!(s, "total hits  {}", m.total_hits);
    let _ = writeln!(s);
    let _ = writeln!(s, "{:>9} {:>6} {:>6} {:>6} {:>6} {:>6}", "iteration", "2xx", "3xx", "4xx", "5xx", "other");
    for it in &m.iterations {
        let c = &it.counts;
        let _ = writeln!(s, "{:>9} {:>6} {:>6} {:>6} {:>6} {:>6}", it.iteration, c.s2xx, c.s3xx, c.s4xx, c.s5xx, c.other);
    }
    let _ = writeln!(s);
    let _ = writeln!(s, "defects     {}", m.defects.len());
    for d in &m.defects {
        let trace = if d.has_stack_trace { " [stack trace]" } else { "" };
        let _ = writeln!(s, "  {} {} {}{trace}", d.op_id, d.status, d.normalized_message);
    }
    s
}
