//! HTTP adapter for an external text-generation service.

use std::time::Duration;

use serde_json::{json, Value};

use super::backend::{AnalyzerBackend, BackendError};
use crate::model::{Constraint, ConstraintCategory, InputParameter, Operation, ParamId, ProducerConsumer, SpecModel};

pub const URL_ENV: &str = "APIREFINE_INFERENCE_URL";
pub const KEY_ENV: &str = "APIREFINE_INFERENCE_API_KEY";

#[derive(Debug, Clone, PartialEq)]
pub struct InferenceConfig {
    pub url: String,
    pub api_key: Option<String>,
    pub timeout: Duration,
    /// Extra attempts after the first failure.
    pub retries: u32,
}

impl InferenceConfig {
    pub fn new(url: impl Into<String>) -> Self {
        InferenceConfig {
            url: url.into(),
            api_key: std::env::var(KEY_ENV).ok().filter(|k| !k.is_empty()),
            timeout: Duration::from_secs(20),
            retries: 2,
        }
    }

    /// Configuration from the environment, if an endpoint is set.
    pub fn from_env() -> Option<Self> {
        std::env::var(URL_ENV).ok().filter(|u| !u.is_empty()).map(Self::new)
    }
}

pub struct InferenceService {
    config: InferenceConfig,
    agent: ureq::Agent,
}

fn op_context(op: &Operation) -> Value {
    json!({
        "operation": op.opname,
        "method": op.method.as_str(),
        "path": op.path,
        "parameters": op.live_inputs().map(|p| json!({"id": p.id, "name": p.name, "location": p.loc.id_segment()})).collect::<Vec<_>>(),
    })
}

impl InferenceService {
    pub fn new(config: InferenceConfig) -> Self {
        let agent = ureq::AgentBuilder::new().timeout(config.timeout).redirects(0).build();
        InferenceService { config, agent }
    }

    pub fn config(&self) -> &InferenceConfig {
        &self.config
    }

    /// POST one task and return the parsed reply.
    pub fn call(&self, task: &str, message: &str, status: u16, context: Value) -> Result<Value, BackendError> {
        let body = json!({ "task": task, "message": message, "status": status, "context": context });
        let mut last = String::new();
        for attempt in 0..=self.config.retries {
            let mut req = self.agent.post(&self.config.url).set("Content-Type", "application/json");
            if let Some(key) = &self.config.api_key {
                req = req.set("Authorization", &format!("Bearer {key}"));
            }
            match req.send_json(body.clone()) {
                Ok(resp) => {
                    return resp.into_json::<Value>().map_err(|e| BackendError::Malformed(e.to_string()));
                }
                Err(ureq::Error::Status(code, _)) if code < 500 => {
                    return Err(BackendError::NoAnswer(format!("status {code}")));
                }
                Err(e) => {
                    last = e.to_string();
                    log::debug!("inference attempt {attempt} failed: {last}");
                }
            }
        }
        Err(BackendError::Unavailable(last))
    }

    /// Realistic values for `parameters`; one object per requested row.
    pub fn generate_values(
        &self,
        parameters: Value,
        constraints: &[String],
        count: usize,
    ) -> Result<Vec<serde_json::Map<String, Value>>, BackendError> {
        let reply = self.call(
            "generate_values",
            "",
            0,
            json!({ "parameters": parameters, "constraints": constraints, "count": count }),
        )?;
        let rows = reply.get("values").and_then(Value::as_array).ok_or_else(|| BackendError::Malformed("missing `values`".into()))?;
        Ok(rows.iter().filter_map(|r| r.as_object().cloned()).collect())
    }
}

fn field<'a>(reply: &'a Value, key: &str) -> Result<&'a Value, BackendError> {
    reply.get(key).filter(|v| !v.is_null()).ok_or_else(|| BackendError::Malformed(format!("missing `{key}`")))
}

impl AnalyzerBackend for InferenceService {
    fn name(&self) -> &str {
        "inference-service"
    }

    fn classify(&self, message: &str, status: u16, op: &Operation) -> Result<ConstraintCategory, BackendError> {
        let reply = self.call("classify", message, status, op_context(op))?;
        let v = field(&reply, "category")?;
        let parsed = match v {
            Value::String(s) => ConstraintCategory::from_name(s)
                .or_else(|| s.parse::<usize>().ok().and_then(ConstraintCategory::from_number)),
            Value::Number(n) => n.as_u64().and_then(|n| ConstraintCategory::from_number(n as usize)),
            _ => None,
        };
        parsed.ok_or_else(|| BackendError::Malformed(format!("unknown category {v}")))
    }

    fn extract_entities(&self, message: &str, candidates: &[&InputParameter]) -> Result<Vec<ParamId>, BackendError> {
        let context = json!({
            "candidates": candidates.iter().map(|p| json!({"id": p.id, "name": p.name})).collect::<Vec<_>>(),
        });
        let reply = self.call("extract_entities", message, 0, context)?;
        let names = field(&reply, "entities")?.as_array().ok_or_else(|| BackendError::Malformed("`entities` not a list".into()))?;
        let mut out = Vec::new();
        for n in names.iter().filter_map(Value::as_str) {
            if let Some(p) = candidates.iter().find(|p| p.id == n || p.name == n || p.leaf_name() == n) {
                if !out.contains(&p.id) {
                    out.push(p.id.clone());
                }
            }
        }
        if out.is_empty() {
            return Err(BackendError::NoAnswer("no candidate named".into()));
        }
        Ok(out)
    }

    fn extract_relation(&self, message: &str, targets: &[ParamId], op: &Operation) -> Result<Constraint, BackendError> {
        let mut context = op_context(op);
        context["targets"] = json!(targets);
        let reply = self.call("extract_relation", message, 0, context)?;
        serde_json::from_value(field(&reply, "relation")?.clone()).map_err(|e| BackendError::Malformed(e.to_string()))
    }

    fn producer_consumer(&self, message: &str, consumer: &Operation, model: &SpecModel) -> Result<ProducerConsumer, BackendError> {
        let mut context = op_context(consumer);
        context["producers"] = model
            .operations
            .iter()
            .filter(|o| o.opname != consumer.opname)
            .map(|o| json!({"operation": o.opname, "method": o.method.as_str(), "path": o.path,
                "outputs": o.outputs.iter().map(|x| x.id.clone()).collect::<Vec<_>>()}))
            .collect();
        let reply = self.call("producer_consumer", message, 404, context)?;
        serde_json::from_value(field(&reply, "pair")?.clone()).map_err(|e| BackendError::Malformed(e.to_string()))
    }
}
