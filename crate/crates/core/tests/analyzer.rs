use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use apirefine::analyzer::{
    classify_failure, handle_blank_response, normalize_message, producer, Action, Analyzer, AnalyzerError,
    FailureRecord, InferenceConfig, InferenceService, RequestSnapshot,
};
use apirefine::model::{load_spec, Constraint, ConstraintCategory, DocumentFormat, ProducerConsumer};
use proptest::prelude::*;
use serde_json::{json, Value};

const PETSTORE: &str = include_str!("data/petstore.json");
const CORPUS: &str = include_str!("../corpus/classification.jsonl");

fn failure(op: &str, status: u16, body: &str) -> FailureRecord {
    FailureRecord::new(op, status, body, RequestSnapshot::default())
}

#[test]
fn corpus_is_classified_without_error() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let op = model.operation("placeOrder").unwrap();
    let mut per_category: BTreeMap<String, usize> = BTreeMap::new();
    let mut wrong = Vec::new();
    for line in CORPUS.lines().filter(|l| !l.trim().is_empty()) {
        let row: Value = serde_json::from_str(line).unwrap();
        let message = row["message"].as_str().unwrap();
        let status = row["status"].as_u64().unwrap() as u16;
        let expected = row["expected_category"].as_str().unwrap();
        *per_category.entry(expected.to_string()).or_default() += 1;
        let got = classify_failure(&failure("placeOrder", status, message), op);
        if got.name() != expected {
            wrong.push(format!("{message:?}: got {got}, want {expected}"));
        }
    }
    assert!(wrong.is_empty(), "{wrong:#?}");
    assert_eq!(per_category.len(), 14);
    assert!(per_category.values().all(|n| *n >= 3), "{per_category:?}");
}

#[test]
fn order_not_found_yields_the_placeorder_pair() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let v = Analyzer::rule_based().analyze(&failure("deleteOrder", 404, r#"{"code":1,"type":"error","message":"Order Not Found"}"#), &model);
    assert_eq!(v.category, Some(ConstraintCategory::ProducerConsumer));
    assert_eq!(v.action, Action::AddConstraint);
    assert_eq!(
        v.constraint,
        Some(Constraint::ProducerConsumer(ProducerConsumer {
            producer_op: "placeOrder".into(),
            producer_param: "placeOrder.200.id".into(),
            consumer_op: "deleteOrder".into(),
            consumer_param: "deleteorder.path.orderId".into(),
        }))
    );
    assert!(v.is_consistent());
}

#[test]
fn pet_not_found_points_at_add_pet() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let v = Analyzer::rule_based().analyze(&failure("placeOrder", 404, "Pet not found"), &model);
    let Some(Constraint::ProducerConsumer(pc)) = v.constraint else { panic!("{v:?}") };
    assert_eq!(pc.producer_op, "addPet");
    assert_eq!(pc.producer_param, "addPet.200.id");
    assert_eq!(pc.consumer_param, "placeorder.body.petId");
}

#[test]
fn no_post_operations_means_no_producer() {
    let doc = json!({
        "openapi": "3.0.0", "info": {"title": "w", "version": "1"},
        "paths": {"/widgets/{widgetId}": {"get": {"operationId": "getWidget",
            "parameters": [{"name": "widgetId", "in": "path", "required": true, "schema": {"type": "integer"}}],
            "responses": {"200": {"description": "ok"}}}}}
    });
    let model = load_spec(&doc.to_string(), DocumentFormat::Json).unwrap();
    let op = model.operation("getWidget").unwrap();
    assert!(matches!(
        producer::infer_producer_consumer("Widget not found", op, &model),
        Err(AnalyzerError::NoProducerFound(_))
    ));
    let v = Analyzer::rule_based().analyze(&failure("getWidget", 404, "Widget not found"), &model);
    assert_eq!(v.category, Some(ConstraintCategory::Unhandled));
    assert_eq!(v.action, Action::ReportDefect);
}

#[test]
fn blank_responses() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let get = model.operation("getPetById").unwrap();
    let v = handle_blank_response(&failure("getPetById", 404, ""), get, &model);
    assert_eq!(v.category, Some(ConstraintCategory::ProducerConsumer));
    let Some(Constraint::ProducerConsumer(pc)) = &v.constraint else { panic!() };
    assert_eq!(pc.producer_op, "addPet");
    assert_eq!(pc.consumer_param, "getpetbyid.path.petId");

    let v = handle_blank_response(&failure("getPetById", 400, "  "), get, &model);
    assert_eq!((v.category, v.action, v.constraint), (None, Action::RegenerateData, None));

    let inventory = model.operation("getInventory").unwrap();
    let v = handle_blank_response(&failure("getInventory", 422, ""), inventory, &model);
    assert_eq!(v.action, Action::RegenerateData);
    assert!(v.is_consistent());
}

#[test]
fn action_only_categories() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let a = Analyzer::rule_based();
    let v = a.analyze(&failure("addPet", 401, "API key not valid. Please pass a valid API key."), &model);
    assert_eq!(v.action, Action::RequestUserInput);
    let v = a.analyze(&failure("updatePetWithForm", 405, "Method Not Allowed Request method `POST' not supported"), &model);
    assert_eq!(v.action, Action::RemoveOperation);
    let v = a.analyze(&failure("uploadFile", 400, "Received unknown parameter: additionalMetadata"), &model);
    assert_eq!((v.action, v.parameter.as_deref()), (Action::RemoveParameter, Some("uploadfile.formdata.additionalMetadata")));
    let v = a.analyze(&failure("addPet", 500, "Internal Server Error"), &model);
    assert_eq!(v.action, Action::ReportDefect);
    let v = a.analyze(&failure("addPet", 0, ""), &model);
    assert_eq!(v.action, Action::Ignore);
    assert!(v.is_consistent());
}

#[test]
fn mandatory_and_groups_resolve_against_the_operation() {
    let doc = json!({
        "openapi": "3.0.0", "info": {"title": "g", "version": "1"},
        "paths": {"/weather": {"get": {"operationId": "weather",
            "parameters": [
                {"name": "city", "in": "query", "schema": {"type": "string"}},
                {"name": "zipcode", "in": "query", "schema": {"type": "string"}},
                {"name": "points", "in": "query", "schema": {"type": "integer"}},
                {"name": "score", "in": "query", "schema": {"type": "integer"}}
            ],
            "responses": {"200": {"description": "ok"}}}}}
    });
    let model = load_spec(&doc.to_string(), DocumentFormat::Json).unwrap();
    let a = Analyzer::rule_based();
    let v = a.analyze(&failure("weather", 400, "Either city or zipcode is required, not both."), &model);
    assert!(v.constraint.unwrap().equivalent(&Constraint::One {
        params: vec!["weather.query.zipcode".into(), "weather.query.city".into()]
    }));
    let v = a.analyze(&failure("weather", 400, "\"points\" is a required parameter."), &model);
    assert_eq!(v.constraint, Some(Constraint::AdditionalMandatory { param: "weather.query.points".into() }));
}

#[test]
fn rule_based_verdicts_are_deterministic() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let a = Analyzer::rule_based();
    for line in CORPUS.lines() {
        let row: Value = serde_json::from_str(line).unwrap();
        let f = failure("placeOrder", row["status"].as_u64().unwrap() as u16, row["message"].as_str().unwrap());
        let first = a.analyze(&f, &model);
        assert_eq!(first, a.analyze(&f, &model));
        assert!(first.is_consistent(), "{first:?}");
    }
}

proptest! {
    #[test]
    fn classification_is_total(message in "\\PC{0,120}", status in 400u16..600) {
        let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
        let v = Analyzer::rule_based().analyze(&failure("placeOrder", status, &message), &model);
        prop_assert!(v.is_consistent());
    }

    #[test]
    fn normalization_is_idempotent(message in "[ -~‘’“”]{0,80}") {
        let once = normalize_message(&message);
        prop_assert_eq!(normalize_message(&once), once);
    }
}

/// One-shot JSON responder that records request bodies.
fn mock_inference(reply: Value) -> (String, Arc<Mutex<Vec<Value>>>) {
    let server = tiny_http::Server::http("127.0.0.1:0").unwrap();
    let url = format!("http://{}/infer", server.server_addr().to_ip().unwrap());
    let seen = Arc::new(Mutex::new(Vec::new()));
    let log = seen.clone();
    std::thread::spawn(move || {
        for mut req in server.incoming_requests() {
            let mut body = String::new();
            req.as_reader().read_to_string(&mut body).unwrap();
            log.lock().unwrap().push(serde_json::from_str(&body).unwrap_or(Value::Null));
            let resp = tiny_http::Response::from_string(reply.to_string())
                .with_header("Content-Type: application/json".parse::<tiny_http::Header>().unwrap());
            let _ = req.respond(resp);
        }
    });
    (url, seen)
}

#[test]
fn inference_service_is_asked_only_when_rules_give_up() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let (url, seen) = mock_inference(json!({"category": "AdditionalMandatory", "entities": ["quantity"]}));
    let a = Analyzer::with_fallback(Box::new(InferenceService::new(InferenceConfig::new(url))));

    let v = a.analyze(&failure("placeOrder", 400, "Order Not Found"), &model);
    assert_eq!(v.category, Some(ConstraintCategory::ProducerConsumer));
    assert!(seen.lock().unwrap().is_empty());

    let v = a.analyze(&failure("placeOrder", 400, "Bitte Menge angeben"), &model);
    assert_eq!(v.constraint, Some(Constraint::AdditionalMandatory { param: "placeorder.body.quantity".into() }));
    let calls = seen.lock().unwrap();
    assert_eq!(calls[0]["task"], "classify");
    assert_eq!(calls[0]["status"], 400);
    assert_eq!(calls[1]["task"], "extract_entities");
}

#[test]
fn unreachable_inference_service_degrades_to_rules() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let port = std::net::TcpListener::bind("127.0.0.1:0").unwrap().local_addr().unwrap().port();
    let mut cfg = InferenceConfig::new(format!("http://127.0.0.1:{port}/x"));
    cfg.retries = 0;
    cfg.timeout = std::time::Duration::from_millis(500);
    let a = Analyzer::with_fallback(Box::new(InferenceService::new(cfg)));
    let v = a.analyze(&failure("placeOrder", 400, "Bitte Menge angeben"), &model);
    assert_eq!(v.category, Some(ConstraintCategory::Unhandled));
    assert_eq!(v.action, Action::ReportDefect);
}
