//! In-process mock REST services with scripted constraint behavior, used to
//! exercise the refinement loop end to end without network access.

pub mod catalog;
pub mod http;
pub mod oracle;

use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};
use std::thread::JoinHandle;

use apirefine::model::{load_spec, Constraint, ConstraintCategory, DocumentFormat, SpecModel};

pub use catalog::{catalog, fixture};
pub use http::{Reply, Req, Router, State};

/// A mock service: its OpenAPI document, handler table, and the constraints
/// a correct run should learn from it.
pub struct FixtureSpec {
    pub name: &'static str,
    pub summary: &'static str,
    /// OpenAPI 3 document (YAML).
    pub document: String,
    pub router: Router,
    pub ground_truth: Vec<Constraint>,
    /// Error messages the service can emit, with the category each belongs to.
    pub messages: Vec<(u16, String, ConstraintCategory)>,
}

impl FixtureSpec {
    pub fn model(&self) -> SpecModel {
        load_spec(&self.document, DocumentFormat::Yaml).expect("fixture documents load")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum FixtureError {
    #[error("cannot bind port {0}: {1}")]
    Bind(u16, String),
    #[error("unknown fixture `{0}`")]
    Unknown(String),
}

/// A running fixture. Stops when dropped.
pub struct FixtureHandle {
    base_url: String,
    server: Arc<tiny_http::Server>,
    state: Arc<Mutex<State>>,
    hits: Arc<Mutex<usize>>,
    thread: Option<JoinHandle<()>>,
}

impl FixtureHandle {
    pub fn base_url(&self) -> &str {
        &self.base_url
    }

    pub fn port(&self) -> u16 {
        self.server.server_addr().to_ip().map(|a| a.port()).unwrap_or(0)
    }

    /// Requests served so far.
    pub fn hits(&self) -> usize {
        *self.hits.lock().unwrap()
    }

    /// Empty every store, as after a restart.
    pub fn reset(&self) {
        *self.state.lock().unwrap() = State::default();
        *self.hits.lock().unwrap() = 0;
    }

    /// Block until the server stops (for the command line).
    pub fn wait(mut self) {
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

impl Drop for FixtureHandle {
    fn drop(&mut self) {
        self.server.unblock();
        if let Some(t) = self.thread.take() {
            let _ = t.join();
        }
    }
}

/// Serve `spec` on 127.0.0.1:`port` (0 picks a free port). Requests are
/// handled one at a time.
pub fn serve_fixture(spec: FixtureSpec, port: u16) -> Result<FixtureHandle, FixtureError> {
    let server = tiny_http::Server::http(("127.0.0.1", port)).map_err(|e| FixtureError::Bind(port, e.to_string()))?;
    let server = Arc::new(server);
    let addr = server.server_addr().to_ip().ok_or_else(|| FixtureError::Bind(port, "not an IP socket".into()))?;
    let state = Arc::new(Mutex::new(State::default()));
    let hits = Arc::new(Mutex::new(0usize));
    let router = spec.router;
    let thread = {
        let (server, state, hits) = (server.clone(), state.clone(), hits.clone());
        std::thread::spawn(move || {
            for mut request in server.incoming_requests() {
                let mut body = String::new();
                let _ = request.as_reader().read_to_string(&mut body);
                let headers: BTreeMap<String, String> = request
                    .headers()
                    .iter()
                    .map(|h| (h.field.as_str().as_str().to_ascii_lowercase(), h.value.as_str().to_string()))
                    .collect();
                let req = Req::parse(request.method().as_str(), request.url(), headers, &body);
                let reply = {
                    *hits.lock().unwrap() += 1;
                    let mut st = state.lock().unwrap();
                    router.dispatch(&mut st, req)
                };
                let mut resp = tiny_http::Response::from_string(reply.body).with_status_code(reply.status);
                if let Ok(h) = "Content-Type: application/json".parse::<tiny_http::Header>() {
                    resp = resp.with_header(h);
                }
                let _ = request.respond(resp);
            }
        })
    };
    Ok(FixtureHandle { base_url: format!("http://{addr}"), server, state, hits, thread: Some(thread) })
}

/// Outcome of comparing learned constraints with a fixture's ground truth.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct MatchReport {
    pub equivalent: Vec<Constraint>,
    pub missing: Vec<Constraint>,
    pub extra: Vec<Constraint>,
}

impl MatchReport {
    pub fn complete(&self) -> bool {
        self.missing.is_empty()
    }
}

/// Structural comparison modulo argument order.
pub fn ground_truth_check(learned: &[Constraint], truth: &[Constraint]) -> MatchReport {
    let mut r = MatchReport::default();
    for t in truth {
        if learned.iter().any(|l| l.equivalent(t)) {
            r.equivalent.push(t.clone());
        } else {
            r.missing.push(t.clone());
        }
    }
    r.extra = learned.iter().filter(|l| !truth.iter().any(|t| t.equivalent(l))).cloned().collect();
    r
}

/// Every learned constraint of a model, global ones first.
pub fn learned_constraints(model: &SpecModel) -> Vec<Constraint> {
    model.all_constraints().cloned().collect()
}
