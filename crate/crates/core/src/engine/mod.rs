//! Test cases, request construction and execution against a live service.

mod execute;
mod request;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

pub use execute::{execute_tests, ExecutionReport, Executor, RequestRecord, StatusCounts, TestOutcome, MAX_BODY_BYTES};
pub use request::{build_request, inject_dependencies, lookup, value_text, RequestBody, RequestPlan, RunState};

use crate::model::{ProducerConsumer, SpecModel};
use crate::scenario::{DataScenario, ParameterScenario, SequenceScenario};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("service at {0} is unreachable: {1}")]
    Connectivity(String, String),
    #[error("{0}: no value for path parameter `{1}`")]
    MissingPathValue(String, String),
    #[error("`{0}` not found in producer response")]
    PathNotInResponse(String),
    #[error("invalid execution parameters: {0}")]
    InvalidParams(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum CheckKind {
    StatusInRange { low: u16, high: u16 },
    FieldPresent { path: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResponseCheck {
    pub op_id: String,
    #[serde(flatten)]
    pub kind: CheckKind,
}

impl ResponseCheck {
    pub fn success(op_id: &str) -> Self {
        ResponseCheck { op_id: op_id.to_string(), kind: CheckKind::StatusInRange { low: 200, high: 399 } }
    }

    pub fn passes(&self, status: u16, body: &serde_json::Value) -> bool {
        match &self.kind {
            CheckKind::StatusInRange { low, high } => (*low..=*high).contains(&status),
            CheckKind::FieldPresent { path } => lookup(body, path).is_some(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestCase {
    pub seq: SequenceScenario,
    pub params: BTreeMap<String, ParameterScenario>,
    pub data: BTreeMap<String, DataScenario>,
    pub checks: Vec<ResponseCheck>,
    pub deps: Vec<ProducerConsumer>,
}

impl TestCase {
    pub fn target_op(&self) -> &str {
        &self.seq.target_op
    }
}

/// Scenarios for one operation in its two roles.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct OperationScenarios {
    /// Each parameter scenario with its data scenarios, used when the
    /// operation is the target of a sequence.
    pub target: Vec<(ParameterScenario, Vec<DataScenario>)>,
    /// The single scenario used when the operation is a prerequisite.
    pub prerequisite: Option<(ParameterScenario, Vec<DataScenario>)>,
}

/// Per target: sequence x parameter scenarios x data scenarios. Targets
/// lacking scenarios (their own or a prerequisite's) yield no tests and a
/// warning.
pub fn generate_tests(
    model: &SpecModel,
    sequences: &[SequenceScenario],
    scenarios: &BTreeMap<String, OperationScenarios>,
) -> (Vec<TestCase>, Vec<String>) {
    let mut tests = Vec::new();
    let mut warnings = Vec::new();
    for seq in sequences {
        if model.operation(&seq.target_op).is_none() {
            warnings.push(format!("{}: not in the model, no tests", seq.target_op));
            continue;
        }
        let targets = scenarios.get(&seq.target_op).map(|s| s.target.as_slice()).unwrap_or_default();
        if targets.iter().all(|(_, d)| d.is_empty()) {
            warnings.push(format!("{}: no feasible scenario, no tests", seq.target_op));
            continue;
        }
        let mut prereqs = Vec::new();
        for op in seq.prerequisites() {
            match scenarios.get(op).and_then(|s| s.prerequisite.as_ref()).filter(|(_, d)| !d.is_empty()) {
                Some(p) => prereqs.push((op, p)),
                None => warnings.push(format!("{}: prerequisite {op} has no feasible scenario, no tests", seq.target_op)),
            }
        }
        if prereqs.len() != seq.prerequisites().len() {
            continue;
        }
        let mut n = 0usize;
        for (scenario, data) in targets {
            for d in data {
                let mut params = BTreeMap::new();
                let mut datas = BTreeMap::new();
                for (op, (ps, pd)) in &prereqs {
                    params.insert(op.to_string(), ps.clone());
                    datas.insert(op.to_string(), pd[n % pd.len()].clone());
                }
                params.insert(seq.target_op.clone(), scenario.clone());
                datas.insert(seq.target_op.clone(), d.clone());
                tests.push(TestCase {
                    seq: seq.clone(),
                    params,
                    data: datas,
                    checks: seq.ops.iter().map(|o| ResponseCheck::success(o)).collect(),
                    deps: seq.deps.clone(),
                });
                n += 1;
            }
        }
    }
    (tests, warnings)
}

/// The execution parameters file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecParams {
    pub base_url: String,
    #[serde(default)]
    pub headers: BTreeMap<String, String>,
    #[serde(default = "default_timeout")]
    pub timeout_s: f64,
    #[serde(default)]
    pub hit_budget: Option<usize>,
    #[serde(default = "default_iterations")]
    pub max_iterations: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k_data_scenarios: usize,
}

fn default_timeout() -> f64 {
    10.0
}

fn default_iterations() -> usize {
    10
}

fn default_k() -> usize {
    1
}

impl ExecParams {
    pub fn new(base_url: impl Into<String>) -> Self {
        ExecParams {
            base_url: base_url.into(),
            headers: BTreeMap::new(),
            timeout_s: default_timeout(),
            hit_budget: None,
            max_iterations: default_iterations(),
            seed: 0,
            k_data_scenarios: default_k(),
        }
    }

    pub fn from_json(text: &str) -> Result<Self, EngineError> {
        let p: ExecParams = serde_json::from_str(text).map_err(|e| EngineError::InvalidParams(e.to_string()))?;
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), EngineError> {
        if url::Url::parse(&self.base_url).map(|u| u.host().is_none()).unwrap_or(true) {
            return Err(EngineError::InvalidParams(format!("base_url `{}`", self.base_url)));
        }
        if self.max_iterations == 0 {
            return Err(EngineError::InvalidParams("max_iterations must be at least 1".into()));
        }
        if self.timeout_s.is_nan() || self.timeout_s <= 0.0 {
            return Err(EngineError::InvalidParams("timeout_s must be positive".into()));
        }
        if self.k_data_scenarios == 0 {
            return Err(EngineError::InvalidParams("k_data_scenarios must be at least 1".into()));
        }
        Ok(())
    }
}
