use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Arc;

use apirefine::analyzer::{Action, Analyzer, FailureRecord, RequestSnapshot};
use apirefine::engine::ExecParams;
use apirefine::model::{load_spec, make_param_id, Constraint, DocumentFormat, Location, SpecModel};
use apirefine::pipeline::{analyze_failures, run_pipeline, PipelineConfig, StopReason};

const PETSTORE: &str = include_str!("data/petstore.json");

const PAIR: &str = r#"
openapi: 3.0.0
info: {title: pair, version: "1"}
paths:
  /a:
    get:
      operationId: getA
      parameters:
        - {name: x, in: query, required: true, schema: {type: string}}
        - {name: y, in: query, required: true, schema: {type: string}}
      responses:
        "200": {description: ok}
  /b:
    get:
      operationId: getB
      responses:
        "200": {description: ok}
  /c:
    get:
      operationId: getC
      responses:
        "200": {description: ok}
"#;

fn petstore() -> SpecModel {
    load_spec(PETSTORE, DocumentFormat::Json).unwrap()
}

fn failure(op: &str, status: u16, message: &str) -> FailureRecord {
    let body = if message.is_empty() { String::new() } else { serde_json::json!({ "message": message }).to_string() };
    FailureRecord::new(op, status, body, RequestSnapshot::default())
}

/// Answers every request with `reply`, counting hits.
fn serve(reply: impl Fn(&str) -> (u16, String) + Send + 'static) -> (String, Arc<AtomicUsize>) {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let base = format!("http://{}", server.server_addr().to_ip().unwrap());
    let hits = Arc::new(AtomicUsize::new(0));
    let counter = hits.clone();
    std::thread::spawn(move || {
        for req in server.incoming_requests() {
            counter.fetch_add(1, Ordering::SeqCst);
            let (status, body) = reply(req.url());
            let _ = req.respond(tiny_http::Response::from_string(body).with_status_code(status));
        }
    });
    (base, hits)
}

#[test]
fn missing_orders_teach_two_pairs() {
    let mut model = petstore();
    let failures = [failure("getOrderById", 404, "Order Not Found"), failure("deleteOrder", 404, "Order Not Found")];
    let a = analyze_failures(&mut model, &failures, &Analyzer::rule_based());
    let consumers: Vec<&str> = a.verdicts.iter().map(|v| v.op_id.as_str()).collect();
    assert_eq!(consumers, vec!["deleteOrder", "getOrderById"]);
    assert_eq!(a.added.len(), 2);
    let deps = model.extract_dependencies();
    assert!(deps.iter().all(|d| d.producer_op == "placeOrder" && d.producer_param == "placeOrder.200.id"));
    assert_eq!(deps.len(), 2);
}

#[test]
fn the_same_lesson_is_added_once() {
    let mut model = petstore();
    let mut second = failure("getOrderById", 404, "Order Not Found");
    second.request_snapshot.data.insert("getorderbyid.path.orderId".into(), 5.into());
    let a = analyze_failures(&mut model, &[failure("getOrderById", 404, "Order Not Found"), second], &Analyzer::rule_based());
    assert_eq!(a.verdicts.len(), 2);
    assert_eq!(a.added.len(), 1);
    assert_eq!(model.extract_dependencies().len(), 1);
}

#[test]
fn no_failures_leave_the_model_alone() {
    let mut model = petstore();
    let before = model.clone();
    let a = analyze_failures(&mut model, &[], &Analyzer::rule_based());
    assert!(a.verdicts.is_empty() && a.added.is_empty());
    assert_eq!(model, before);
}

#[test]
fn unknown_parameters_become_tombstones() {
    let mut model = petstore();
    let status = make_param_id("findPetsByStatus", Location::Query, "status");
    let f = failure("findPetsByStatus", 400, "Received unknown parameter: status");
    let a = analyze_failures(&mut model, std::slice::from_ref(&f), &Analyzer::rule_based());
    assert_eq!(a.verdicts[0].action, Action::RemoveParameter);
    let op = model.operation("findPetsByStatus").unwrap();
    let p = op.input(&status).unwrap();
    assert!(!p.is_live());
    assert_eq!(op.live_inputs().count(), 0);
    // a second report about the same parameter cannot remove it again
    let a = analyze_failures(&mut model, &[f], &Analyzer::rule_based());
    assert!(a.verdicts.iter().all(|v| v.action != Action::AddConstraint));
    assert!(model.operation("findPetsByStatus").unwrap().input(&status).is_some());
}

#[test]
fn action_only_verdicts() {
    let mut model = petstore();
    let failures = [
        failure("getInventory", 401, "API key not valid. Please pass a valid API key."),
        failure("logoutUser", 405, "Method Not Allowed Request method `GET' not supported"),
        failure("placeOrder", 400, ""),
        failure("addPet", 500, "Internal Server Error"),
    ];
    let a = analyze_failures(&mut model, &failures, &Analyzer::rule_based());
    assert!(model.operation("getInventory").unwrap().needs_user_input);
    assert!(model.operation("logoutUser").is_none());
    assert_eq!(model.removed_operations, vec!["logoutUser".to_string()]);
    assert!(a.regenerate.contains("placeOrder"));
    assert!(a.added.is_empty());
    let defect = a.verdicts.iter().find(|v| v.op_id == "addPet").unwrap();
    assert_eq!(defect.action, Action::ReportDefect);
}

#[test]
fn unreachable_service_aborts_before_any_request() {
    let listener = std::net::TcpListener::bind("127.0.0.1:0").unwrap();
    let port = listener.local_addr().unwrap().port();
    drop(listener);
    let out = run_pipeline(petstore(), &PipelineConfig::new(ExecParams::new(format!("http://127.0.0.1:{port}"))));
    assert!(matches!(out.stop, StopReason::Aborted(_)), "{:?}", out.stop);
    assert!(out.iterations.is_empty());
    assert_eq!(out.total_hits(), 0);
}

#[test]
fn contradictory_constraints_are_quarantined() {
    let (base, _) = serve(|_| (200, "{}".into()));
    let mut model = load_spec(PAIR, DocumentFormat::Yaml).unwrap();
    let id = |n| make_param_id("getA", Location::Query, n);
    let bad = Constraint::One { params: vec![id("x"), id("y")] };
    model.add_constraint(bad.clone()).unwrap();
    let out = run_pipeline(model, &PipelineConfig::new(ExecParams::new(base)));
    assert_eq!(out.stop, StopReason::Converged);
    assert_eq!(out.iterations[0].quarantined, vec![bad.clone()]);
    assert!(out.model.quarantined.contains(&bad));
    assert!(out.iterations[0].warnings.iter().any(|w| w.contains("quarantined")));
    assert_eq!(out.iterations[0].counts.s2xx, 3);
}

#[test]
fn a_spent_budget_stops_the_run() {
    let (base, hits) = serve(|_| (200, "{}".into()));
    let mut p = ExecParams::new(base);
    p.hit_budget = Some(2);
    let out = run_pipeline(load_spec(PAIR, DocumentFormat::Yaml).unwrap(), &PipelineConfig::new(p));
    assert_eq!(out.stop, StopReason::BudgetExhausted);
    assert_eq!(out.total_hits(), 2);
    assert_eq!(hits.load(Ordering::SeqCst), 2);
    assert_eq!(out.iterations[0].skipped, 1);
}

#[test]
fn recurring_failures_converge_on_the_second_run() {
    let (base, _) = serve(|url| if url.starts_with("/b") { (400, "{\"message\":\"nope\"}".into()) } else { (200, "{}".into()) });
    let out = run_pipeline(load_spec(PAIR, DocumentFormat::Yaml).unwrap(), &PipelineConfig::new(ExecParams::new(base)));
    assert_eq!(out.stop, StopReason::Converged);
    assert_eq!(out.iterations.len(), 2);
    assert_eq!(out.iterations[0].new_failures.len(), 1);
    assert!(out.iterations[1].new_failures.is_empty());
    assert_eq!(out.iterations[1].cumulative_failures, 1);
    assert_eq!(out.failures.len(), 1);
}

#[test]
fn iteration_cap_is_respected() {
    let n = Arc::new(AtomicUsize::new(0));
    let c = n.clone();
    let words = ["alpha", "bravo", "charlie", "delta", "echo", "foxtrot", "golf", "hotel"];
    let (base, _) = serve(move |_| {
        let i = c.fetch_add(1, Ordering::SeqCst);
        (400, format!("{{\"message\":\"strange {} {}\"}}", words[i % 8], words[(i / 8) % 8]))
    });
    let mut p = ExecParams::new(base);
    p.max_iterations = 3;
    let out = run_pipeline(load_spec(PAIR, DocumentFormat::Yaml).unwrap(), &PipelineConfig::new(p));
    assert_eq!(out.stop, StopReason::MaxIterations);
    assert_eq!(out.iterations.len(), 3);
}
