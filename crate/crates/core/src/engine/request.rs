//! Request assembly and runtime dependency injection.

use std::collections::BTreeMap;

use percent_encoding::{utf8_percent_encode, AsciiSet, NON_ALPHANUMERIC};
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::EngineError;
use crate::analyzer::RequestSnapshot;
use crate::model::{InputParameter, Location, Method, Operation, ParamId, ProducerConsumer};
use crate::scenario::{DataScenario, ParameterScenario};

/// Characters left unescaped inside a path segment.
const SEGMENT: &AsciiSet = &NON_ALPHANUMERIC.remove(b'-').remove(b'_').remove(b'.').remove(b'~');

/// Values bound for consumer parameters within one test case.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RunState {
    /// Consumer parameter id to injected value.
    pub bindings: BTreeMap<ParamId, Value>,
    /// Producer path to the latest value observed for it.
    pub observed: BTreeMap<String, Value>,
}

impl RunState {
    pub fn clear(&mut self) {
        self.bindings.clear();
        self.observed.clear();
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RequestBody {
    Json(Value),
    Form(Vec<(String, String)>),
    Multipart { boundary: String, parts: Vec<(String, String)> },
}

impl RequestBody {
    pub fn content_type(&self) -> String {
        match self {
            RequestBody::Json(_) => "application/json".into(),
            RequestBody::Form(_) => "application/x-www-form-urlencoded".into(),
            RequestBody::Multipart { boundary, .. } => format!("multipart/form-data; boundary={boundary}"),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        match self {
            RequestBody::Json(v) => serde_json::to_vec(v).unwrap_or_default(),
            RequestBody::Form(pairs) => {
                url::form_urlencoded::Serializer::new(String::new()).extend_pairs(pairs).finish().into_bytes()
            }
            RequestBody::Multipart { boundary, parts } => {
                let mut out = String::new();
                for (k, v) in parts {
                    out.push_str(&format!("--{boundary}\r\nContent-Disposition: form-data; name=\"{k}\"\r\n\r\n{v}\r\n"));
                }
                out.push_str(&format!("--{boundary}--\r\n"));
                out.into_bytes()
            }
        }
    }
}

/// A fully resolved HTTP request.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequestPlan {
    pub op_id: String,
    pub method: Method,
    /// Path with placeholders substituted, plus the query string.
    pub path_and_query: String,
    pub headers: Vec<(String, String)>,
    pub body: Option<RequestBody>,
    /// Parameters whose value came from the run state.
    pub injected: Vec<ParamId>,
    pub snapshot: RequestSnapshot,
}

impl RequestPlan {
    pub fn url(&self, base_url: &str) -> String {
        format!("{}{}", base_url.trim_end_matches('/'), self.path_and_query)
    }
}

/// Text form of a scalar for paths, queries, headers and forms.
pub fn value_text(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => String::new(),
        Value::Array(items) => items.iter().map(value_text).collect::<Vec<_>>().join(","),
        other => other.to_string(),
    }
}

/// Place `value` at the dotted `path` inside `root`.
fn insert_dotted(root: &mut Map<String, Value>, path: &str, value: Value) {
    let mut segs = path.split('.').peekable();
    let mut cur = root;
    while let Some(seg) = segs.next() {
        if segs.peek().is_none() {
            cur.insert(seg.to_string(), value);
            return;
        }
        let slot = cur.entry(seg.to_string()).or_insert_with(|| Value::Object(Map::new()));
        if !slot.is_object() {
            *slot = Value::Object(Map::new());
        }
        cur = slot.as_object_mut().expect("object just ensured");
    }
}

/// Assemble the request for one operation of a test case.
pub fn build_request(
    op: &Operation,
    scenario: &ParameterScenario,
    data: &DataScenario,
    state: &RunState,
) -> Result<RequestPlan, EngineError> {
    let mut values: Vec<(&InputParameter, Value)> = Vec::new();
    let mut injected = Vec::new();
    for p in op.live_inputs() {
        if let Some(v) = state.bindings.get(&p.id) {
            injected.push(p.id.clone());
            values.push((p, v.clone()));
        } else if scenario.selected.contains(&p.id) {
            if let Some(v) = data.assignment.get(&p.id) {
                values.push((p, v.clone()));
            }
        }
    }

    let mut path = op.path.clone();
    for placeholder in op.path_placeholders() {
        let v = values
            .iter()
            .find(|(p, _)| p.loc == Location::Path && p.name == placeholder)
            .map(|(_, v)| value_text(v))
            .filter(|s| !s.is_empty())
            .ok_or_else(|| EngineError::MissingPathValue(op.opname.clone(), placeholder.clone()))?;
        path = path.replace(&format!("{{{placeholder}}}"), &utf8_percent_encode(&v, SEGMENT).to_string());
    }

    let mut query = url::form_urlencoded::Serializer::new(String::new());
    let mut has_query = false;
    let mut headers = Vec::new();
    let mut json_body: Option<Value> = None;
    let mut form: Vec<(String, String)> = Vec::new();
    for (p, v) in &values {
        match p.loc {
            Location::Path => {}
            Location::Query => {
                has_query = true;
                match v {
                    Value::Array(items) => {
                        for item in items {
                            query.append_pair(&p.name, &value_text(item));
                        }
                    }
                    _ => {
                        query.append_pair(&p.name, &value_text(v));
                    }
                }
            }
            Location::Header => headers.push((p.name.clone(), value_text(v))),
            Location::Body if p.body_root => json_body = Some(v.clone()),
            Location::Body => {
                let root = json_body.get_or_insert_with(|| Value::Object(Map::new()));
                if let Value::Object(m) = root {
                    insert_dotted(m, &p.name, v.clone());
                }
            }
            Location::FormData => match v {
                Value::Array(items) => form.extend(items.iter().map(|i| (p.name.clone(), value_text(i)))),
                _ => form.push((p.name.clone(), value_text(v))),
            },
        }
    }
    if has_query {
        path.push('?');
        path.push_str(&query.finish());
    }

    let media = op.request_media_type.as_deref().unwrap_or("");
    let body = if !form.is_empty() {
        if media.contains("multipart") {
            Some(RequestBody::Multipart { boundary: format!("----apirefine{:x}", fnv_text(&op.opname)), parts: form })
        } else {
            Some(RequestBody::Form(form))
        }
    } else {
        json_body.map(RequestBody::Json)
    };

    let snapshot = RequestSnapshot {
        selected: values.iter().map(|(p, _)| p.id.clone()).collect(),
        data: values.iter().map(|(p, v)| (p.id.clone(), v.clone())).collect(),
    };
    Ok(RequestPlan { op_id: op.opname.clone(), method: op.method, path_and_query: path, headers, body, injected, snapshot })
}

fn fnv_text(s: &str) -> u64 {
    s.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| (h ^ u64::from(b)).wrapping_mul(0x0100_0000_01b3))
}

/// Value at a dotted path; arrays along the way contribute their first element.
pub fn lookup<'a>(body: &'a Value, path: &str) -> Option<&'a Value> {
    let mut cur = body;
    for seg in path.split('.').filter(|s| !s.is_empty()) {
        while let Value::Array(items) = cur {
            cur = items.first()?;
        }
        cur = cur.get(seg)?;
    }
    while let Value::Array(items) = cur {
        cur = items.first()?;
    }
    (!cur.is_null()).then_some(cur)
}

/// Field path inside the producer response for an output id such as
/// `placeOrder.200.id`; `None` when `producer_param` names an input.
fn response_path(pc: &ProducerConsumer) -> Option<&str> {
    let rest = pc.producer_param.strip_prefix(&pc.producer_op)?.strip_prefix('.')?;
    let (code, path) = rest.split_once('.')?;
    let is_code = code == "default" || code.chars().all(|c| c.is_ascii_digit() || c == 'X' || c == 'x');
    is_code.then_some(path)
}

/// Bind consumer parameters from a producer's response (or, for input-valued
/// producers, from the request it sent). Returns the unfulfilled deps.
pub fn inject_dependencies(
    producer: &str,
    response: &Value,
    sent: &RequestSnapshot,
    deps: &[ProducerConsumer],
    state: &mut RunState,
) -> Vec<EngineError> {
    let mut misses = Vec::new();
    for pc in deps.iter().filter(|d| d.producer_op == producer) {
        let found = match response_path(pc) {
            Some(path) => lookup(response, path).cloned(),
            None => sent.data.get(&pc.producer_param).cloned(),
        };
        match found {
            Some(v) => {
                state.observed.insert(pc.producer_param.clone(), v.clone());
                state.bindings.insert(pc.consumer_param.clone(), v);
            }
            None => misses.push(EngineError::PathNotInResponse(pc.producer_param.clone())),
        }
    }
    misses
}
