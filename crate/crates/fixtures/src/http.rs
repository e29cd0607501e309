//! Minimal request model and router for the scripted services.

use std::collections::BTreeMap;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

/// A parsed incoming request.
#[derive(Debug, Clone, Default)]
pub struct Req {
    pub method: String,
    pub path: String,
    pub query: Vec<(String, String)>,
    /// Lowercased header names.
    pub headers: BTreeMap<String, String>,
    pub body: Value,
    pub form: Vec<(String, String)>,
    /// Values bound to `{placeholders}` of the matched route.
    pub args: BTreeMap<String, String>,
}

impl Req {
    pub fn parse(method: &str, url: &str, headers: BTreeMap<String, String>, body: &str) -> Self {
        let (path, query) = url.split_once('?').unwrap_or((url, ""));
        let query = url::form_urlencoded::parse(query.as_bytes()).into_owned().collect();
        let content_type = headers.get("content-type").cloned().unwrap_or_default();
        let mut req = Req { method: method.to_ascii_uppercase(), path: path.to_string(), query, headers, ..Default::default() };
        if content_type.contains("x-www-form-urlencoded") {
            req.form = url::form_urlencoded::parse(body.as_bytes()).into_owned().collect();
        } else if content_type.contains("multipart/form-data") {
            req.form = multipart_fields(body);
        } else if !body.trim().is_empty() {
            req.body = serde_json::from_str(body).unwrap_or(Value::String(body.to_string()));
        }
        req
    }

    /// A parameter from the query, the form, or the top level of a JSON body.
    pub fn param(&self, name: &str) -> Option<Value> {
        if let Some((_, v)) = self.query.iter().find(|(k, _)| k == name) {
            return Some(Value::String(v.clone()));
        }
        if let Some((_, v)) = self.form.iter().find(|(k, _)| k == name) {
            return Some(Value::String(v.clone()));
        }
        self.body.get(name).filter(|v| !v.is_null()).cloned()
    }

    pub fn has(&self, name: &str) -> bool {
        self.param(name).is_some()
    }

    /// Parameter as text (JSON strings unquoted).
    pub fn text(&self, name: &str) -> Option<String> {
        self.param(name).map(|v| match v {
            Value::String(s) => s,
            other => other.to_string(),
        })
    }

    pub fn number(&self, name: &str) -> Option<f64> {
        self.param(name).and_then(|v| match v {
            Value::Number(n) => n.as_f64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        })
    }

    pub fn arg(&self, name: &str) -> Option<&str> {
        self.args.get(name).map(String::as_str)
    }

    pub fn header(&self, name: &str) -> Option<&str> {
        self.headers.get(&name.to_ascii_lowercase()).map(String::as_str)
    }
}

fn multipart_fields(body: &str) -> Vec<(String, String)> {
    let mut out = Vec::new();
    for part in body.split("\r\n--") {
        let Some((head, value)) = part.split_once("\r\n\r\n") else { continue };
        let Some(start) = head.find("name=\"") else { continue };
        let rest = &head[start + 6..];
        let Some(end) = rest.find('"') else { continue };
        out.push((rest[..end].to_string(), value.trim_end_matches("\r\n").to_string()));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reply {
    pub status: u16,
    pub body: String,
}

impl Reply {
    pub fn json(status: u16, v: Value) -> Self {
        Reply { status, body: v.to_string() }
    }

    pub fn ok(v: Value) -> Self {
        Self::json(200, v)
    }

    /// An error with `{"message": ...}`.
    pub fn error(status: u16, message: impl Into<String>) -> Self {
        Self::json(status, serde_json::json!({ "message": message.into() }))
    }

    pub fn blank(status: u16) -> Self {
        Reply { status, body: String::new() }
    }
}

/// Per-service mutable state: resource stores with increasing ids.
pub struct State {
    stores: BTreeMap<String, BTreeMap<i64, Value>>,
    next: BTreeMap<String, i64>,
    pub rng: ChaCha8Rng,
    pub counter: u64,
}

impl Default for State {
    fn default() -> Self {
        State { stores: BTreeMap::new(), next: BTreeMap::new(), rng: ChaCha8Rng::seed_from_u64(7), counter: 0 }
    }
}

impl State {
    /// Store `item` under a fresh id (1, 2, ...) and return it with `id` set.
    pub fn create(&mut self, store: &str, item: Value) -> Value {
        let id = {
            let n = self.next.entry(store.to_string()).or_insert(0);
            *n += 1;
            *n
        };
        let mut obj = match item {
            Value::Object(m) => m,
            _ => Map::new(),
        };
        obj.insert("id".into(), Value::from(id));
        let v = Value::Object(obj);
        self.stores.entry(store.to_string()).or_default().insert(id, v.clone());
        v
    }

    pub fn get(&self, store: &str, id: &str) -> Option<&Value> {
        let id: i64 = id.trim().parse().ok()?;
        self.stores.get(store)?.get(&id)
    }

    pub fn remove(&mut self, store: &str, id: &str) -> Option<Value> {
        let id: i64 = id.trim().parse().ok()?;
        self.stores.get_mut(store)?.remove(&id)
    }

    pub fn all(&self, store: &str) -> Vec<Value> {
        self.stores.get(store).map(|s| s.values().cloned().collect()).unwrap_or_default()
    }
}

pub type Handler = Box<dyn Fn(&mut State, &Req) -> Reply + Send + Sync>;

struct Route {
    method: String,
    segments: Vec<String>,
    handler: Handler,
}

/// The scripted handler table: (method, path template) to behavior.
#[derive(Default)]
pub struct Router {
    routes: Vec<Route>,
}

impl Router {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn route(
        mut self,
        method: &str,
        template: &str,
        handler: impl Fn(&mut State, &Req) -> Reply + Send + Sync + 'static,
    ) -> Self {
        self.routes.push(Route {
            method: method.to_ascii_uppercase(),
            segments: template.split('/').filter(|s| !s.is_empty()).map(str::to_string).collect(),
            handler: Box::new(handler),
        });
        self
    }

    pub fn len(&self) -> usize {
        self.routes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.routes.is_empty()
    }

    pub fn dispatch(&self, state: &mut State, mut req: Req) -> Reply {
        let segs: Vec<String> = req
            .path
            .split('/')
            .filter(|s| !s.is_empty())
            .map(percent_decode)
            .collect();
        let mut path_matched = false;
        for r in &self.routes {
            if r.segments.len() != segs.len() {
                continue;
            }
            let mut args = BTreeMap::new();
            let fits = r.segments.iter().zip(&segs).all(|(t, s)| {
                if let Some(name) = t.strip_prefix('{').and_then(|t| t.strip_suffix('}')) {
                    args.insert(name.to_string(), s.clone());
                    true
                } else {
                    t == s
                }
            });
            if !fits {
                continue;
            }
            path_matched = true;
            if r.method == req.method {
                req.args = args;
                return (r.handler)(state, &req);
            }
        }
        if path_matched {
            Reply::error(405, format!("Method Not Allowed Request method `{}' not supported", req.method))
        } else {
            Reply::error(404, format!("No route for {}", req.path))
        }
    }
}

fn percent_decode(s: &str) -> String {
    url::form_urlencoded::parse(format!("x={s}").as_bytes())
        .next()
        .map(|(_, v)| v.into_owned())
        .unwrap_or_else(|| s.to_string())
}
