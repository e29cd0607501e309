use std::collections::BTreeSet;
use std::net::{TcpStream, ToSocketAddrs};
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};
use serde_json::Value;

use super::request::{build_request, inject_dependencies, RequestPlan, RunState};
use super::{EngineError, ExecParams, TestCase};
use crate::analyzer::{FailureKey, FailureRecord, RequestSnapshot};
use crate::model::SpecModel;

/// Response bodies kept in request records are cut at this size.
pub const MAX_BODY_BYTES: usize = 64 * 1024;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StatusCounts {
    pub s2xx: usize,
    pub s3xx: usize,
    pub s4xx: usize,
    pub s5xx: usize,
    /// Timeouts and transport errors (status 0).
    pub other: usize,
}

impl StatusCounts {
    pub fn add(&mut self, status: u16) {
        match status {
            200..=299 => self.s2xx += 1,
            300..=399 => self.s3xx += 1,
            400..=499 => self.s4xx += 1,
            500..=599 => self.s5xx += 1,
            _ => self.other += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.s2xx + self.s3xx + self.s4xx + self.s5xx + self.other
    }
}

/// One issued HTTP request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestRecord {
    pub iteration: usize,
    pub test: usize,
    pub op_id: String,
    pub method: String,
    pub url: String,
    pub status: u16,
    pub latency_ms: f64,
    /// Response body, truncated to [`MAX_BODY_BYTES`].
    pub body: String,
    pub checks_passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub injected: Vec<String>,
    pub request: RequestSnapshot,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestOutcome {
    pub test: usize,
    pub target_op: String,
    pub passed: bool,
    /// Why the test stopped early, if it did.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stopped: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ExecutionReport {
    pub iteration: usize,
    pub requests: Vec<RequestRecord>,
    pub tests: Vec<TestOutcome>,
    pub counts: StatusCounts,
    pub issued: usize,
    /// Planned requests not sent because the hit budget ran out.
    pub skipped: usize,
    /// Requests never built because of generator problems.
    pub generator_defects: Vec<String>,
    pub injection_misses: Vec<String>,
}

impl ExecutionReport {
    pub fn budget_exhausted(&self) -> bool {
        self.skipped > 0
    }
}

fn truncate(s: &str, max: usize) -> String {
    if s.len() <= max {
        return s.to_string();
    }
    let mut end = max;
    while !s.is_char_boundary(end) {
        end -= 1;
    }
    s[..end].to_string()
}

/// Sends test cases one request at a time and keeps the hit count across
/// calls, so one executor enforces one budget over a whole run.
pub struct Executor {
    params: ExecParams,
    agent: ureq::Agent,
    issued_total: usize,
}

impl Executor {
    pub fn new(params: ExecParams) -> Self {
        let agent = ureq::AgentBuilder::new()
            .timeout(Duration::from_secs_f64(params.timeout_s))
            .redirects(0)
            .build();
        Executor { params, agent, issued_total: 0 }
    }

    pub fn params(&self) -> &ExecParams {
        &self.params
    }

    pub fn issued_total(&self) -> usize {
        self.issued_total
    }

    pub fn budget_left(&self) -> Option<usize> {
        self.params.hit_budget.map(|b| b.saturating_sub(self.issued_total))
    }

    /// Open (and close) one TCP connection to the service.
    pub fn probe(&self) -> Result<(), EngineError> {
        let base = &self.params.base_url;
        let err = |m: String| EngineError::Connectivity(base.clone(), m);
        let url = url::Url::parse(base).map_err(|e| err(e.to_string()))?;
        let host = url.host_str().ok_or_else(|| err("no host".into()))?;
        let port = url.port_or_known_default().ok_or_else(|| err("no port".into()))?;
        let addrs: Vec<_> = (host, port).to_socket_addrs().map_err(|e| err(e.to_string()))?.collect();
        let timeout = Duration::from_secs_f64(self.params.timeout_s.min(5.0));
        let mut last = "no address".to_string();
        for a in addrs {
            match TcpStream::connect_timeout(&a, timeout) {
                Ok(_) => return Ok(()),
                Err(e) => last = e.to_string(),
            }
        }
        Err(err(last))
    }

    fn send(&self, plan: &RequestPlan) -> (u16, String) {
        let mut req = self.agent.request(plan.method.as_str(), &plan.url(&self.params.base_url));
        for (k, v) in &self.params.headers {
            req = req.set(k, v);
        }
        for (k, v) in &plan.headers {
            req = req.set(k, v);
        }
        let result = match &plan.body {
            Some(body) => req.set("Content-Type", &body.content_type()).send_bytes(&body.to_bytes()),
            None => req.call(),
        };
        match result {
            Ok(resp) | Err(ureq::Error::Status(_, resp)) => {
                let status = resp.status();
                (status, resp.into_string().unwrap_or_default())
            }
            Err(ureq::Error::Transport(t)) => (0, format!("transport error: {t}")),
        }
    }

    /// Run `tests` in order. Returns the report and the unique failures
    /// (non-2xx/3xx responses) in first-seen order.
    pub fn execute(
        &mut self,
        tests: &[TestCase],
        model: &SpecModel,
        iteration: usize,
    ) -> Result<(ExecutionReport, Vec<FailureRecord>), EngineError> {
        self.probe()?;
        let mut report = ExecutionReport { iteration, ..Default::default() };
        let mut failures: Vec<FailureRecord> = Vec::new();
        let mut seen: BTreeSet<FailureKey> = BTreeSet::new();
        let mut state = RunState::default();

        for (ti, tc) in tests.iter().enumerate() {
            state.clear();
            let mut outcome = TestOutcome { test: ti, target_op: tc.target_op().to_string(), passed: true, stopped: None };
            for (oi, opname) in tc.seq.ops.iter().enumerate() {
                if self.budget_left() == Some(0) {
                    report.skipped += tc.seq.ops.len() - oi;
                    outcome.passed = false;
                    outcome.stopped = Some("hit budget exhausted".into());
                    break;
                }
                let (Some(op), Some(scenario), Some(data)) =
                    (model.operation(opname), tc.params.get(opname), tc.data.get(opname))
                else {
                    report.generator_defects.push(format!("test {ti}: no scenario for {opname}"));
                    outcome.passed = false;
                    outcome.stopped = Some(format!("{opname} unplanned"));
                    break;
                };
                let plan = match build_request(op, scenario, data, &state) {
                    Ok(p) => p,
                    Err(e) => {
                        report.generator_defects.push(format!("test {ti}: {e}"));
                        outcome.passed = false;
                        outcome.stopped = Some(e.to_string());
                        break;
                    }
                };
                let started = Instant::now();
                let (status, body) = self.send(&plan);
                let latency_ms = started.elapsed().as_secs_f64() * 1000.0;
                self.issued_total += 1;
                report.issued += 1;
                report.counts.add(status);

                let parsed: Value = serde_json::from_str(&body).unwrap_or(Value::Null);
                let checks_passed = tc.checks.iter().filter(|c| &c.op_id == opname).all(|c| c.passes(status, &parsed));
                report.requests.push(RequestRecord {
                    iteration,
                    test: ti,
                    op_id: opname.clone(),
                    method: plan.method.as_str().to_string(),
                    url: plan.url(&self.params.base_url),
                    status,
                    latency_ms,
                    body: truncate(&body, MAX_BODY_BYTES),
                    checks_passed,
                    injected: plan.injected.clone(),
                    request: plan.snapshot.clone(),
                });

                let ok = (200..=399).contains(&status);
                if !ok {
                    let f = FailureRecord::new(opname.clone(), status, body, plan.snapshot.clone());
                    if seen.insert(f.key()) {
                        failures.push(f);
                    }
                }
                if !checks_passed {
                    outcome.passed = false;
                }
                let is_last = oi + 1 == tc.seq.ops.len();
                if !is_last {
                    if !ok {
                        outcome.passed = false;
                        outcome.stopped = Some(format!("prerequisite {opname} failed with {status}"));
                        break;
                    }
                    for miss in inject_dependencies(opname, &parsed, &plan.snapshot, &tc.deps, &mut state) {
                        log::info!("test {ti}: {miss}; consumer falls back to generated data");
                        report.injection_misses.push(miss.to_string());
                    }
                }
            }
            report.tests.push(outcome);
        }
        Ok((report, failures))
    }
}

/// Execute with a fresh executor (and a fresh budget).
pub fn execute_tests(
    tests: &[TestCase],
    model: &SpecModel,
    params: &ExecParams,
) -> Result<(ExecutionReport, Vec<FailureRecord>), EngineError> {
    Executor::new(params.clone()).execute(tests, model, 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn truncation_respects_char_boundaries() {
        let s = "é".repeat(10);
        assert_eq!(truncate(&s, 5), "éé");
        assert_eq!(truncate("abc", 5), "abc");
    }

    #[test]
    fn counts_by_class() {
        let mut c = StatusCounts::default();
        for s in [200, 201, 302, 404, 500, 0] {
            c.add(s);
        }
        assert_eq!((c.s2xx, c.s3xx, c.s4xx, c.s5xx, c.other, c.total()), (2, 1, 1, 1, 1, 6));
    }
}
