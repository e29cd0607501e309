use std::collections::BTreeMap;

use apirefine::model::{
    export_spec, load_spec, Constraint, DocumentFormat, Location, Method, ModelError, ParamType,
    ProducerConsumer, DEFAULT_UNROLL_DEPTH,
};
use serde_json::json;

const PETSTORE: &str = include_str!("data/petstore.json");
const LANGTOOL: &str = include_str!("data/langtool.yaml");

fn method_counts(model: &apirefine::SpecModel) -> BTreeMap<Method, usize> {
    let mut counts = BTreeMap::new();
    for op in &model.operations {
        *counts.entry(op.method).or_insert(0) += 1;
    }
    counts
}

#[test]
fn petstore_has_twenty_operations_in_the_expected_method_split() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    assert_eq!(model.operations.len(), 20);
    let counts = method_counts(&model);
    assert_eq!(counts[&Method::Get], 8);
    assert_eq!(counts[&Method::Post], 7);
    assert_eq!(counts[&Method::Put], 2);
    assert_eq!(counts[&Method::Delete], 3);
    assert!(model.global_constraints.is_empty());
    assert_eq!(model.original_operation_count, 20);
}

#[test]
fn langtool_has_one_get_and_one_post() {
    let model = load_spec(LANGTOOL, DocumentFormat::Yaml).unwrap();
    let counts = method_counts(&model);
    assert_eq!(model.operations.len(), 2);
    assert_eq!(counts[&Method::Get], 1);
    assert_eq!(counts[&Method::Post], 1);
    let check = model.operation("check").unwrap();
    let language = check.input("check.formdata.language").unwrap();
    assert!(language.is_required);
    assert_eq!(language.examples, vec![json!("en-US")]);
    assert!(!check.input("check.formdata.text").unwrap().is_required);
    assert_eq!(check.request_media_type.as_deref(), Some("application/x-www-form-urlencoded"));
}

#[test]
fn petstore_details_are_normalized() {
    let model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let delete = model.operation("deleteOrder").unwrap();
    let order_id = delete.input("deleteorder.path.orderId").unwrap();
    assert!(order_id.is_required);
    assert_eq!(order_id.ptype, ParamType::Integer);
    assert_eq!(order_id.pc.minimum, Some(1.0));

    let place = model.operation("placeOrder").unwrap();
    assert!(place.outputs.iter().any(|o| o.id == "placeOrder.200.id"));
    let body: Vec<&str> = place.inputs.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(body, vec!["id", "petId", "quantity", "shipDate", "status", "complete"]);
    assert!(place.inputs.iter().all(|p| p.loc == Location::Body));

    let add = model.operation("addPet").unwrap();
    let names: Vec<&str> = add.inputs.iter().map(|p| p.name.as_str()).collect();
    assert!(names.contains(&"category.name"));
    let name = add.inputs.iter().find(|p| p.name == "name").unwrap();
    assert!(name.is_required);
    assert_eq!(name.examples, vec![json!("doggie")]);
    // optional parent, required-free child
    assert!(!add.inputs.iter().find(|p| p.name == "category.id").unwrap().is_required);

    assert!(model.operation("findPetsByStatus").unwrap().produces_collection);
    assert!(!model.operation("getPetById").unwrap().produces_collection);
}

#[test]
fn empty_paths_give_an_empty_model() {
    let doc = r#"{"openapi":"3.0.0","info":{"title":"x","version":"1"},"paths":{}}"#;
    let model = load_spec(doc, DocumentFormat::Json).unwrap();
    assert_eq!(model.operations.len(), 0);
    assert_eq!(model.constraint_count(), 0);
}

#[test]
fn malformed_documents_are_parse_errors() {
    assert!(matches!(load_spec("{not json", DocumentFormat::Json), Err(ModelError::Parse(_))));
    assert!(matches!(load_spec(r#"{"info":{}}"#, DocumentFormat::Json), Err(ModelError::Parse(_))));
}

#[test]
fn two_schema_cycle_unrolls_to_the_configured_depth() {
    let doc = json!({
        "openapi": "3.0.0",
        "info": {"title": "cycle", "version": "1"},
        "paths": {"/a": {"post": {
            "operationId": "createA",
            "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/A"}}}},
            "responses": {"201": {"description": "ok"}}
        }}},
        "components": {"schemas": {
            "A": {"type": "object", "required": ["name"], "properties": {"name": {"type": "string"}, "b": {"$ref": "#/components/schemas/B"}}},
            "B": {"type": "object", "properties": {"label": {"type": "string"}, "a": {"$ref": "#/components/schemas/A"}}}
        }}
    });
    let model = load_spec(&doc.to_string(), DocumentFormat::Json).unwrap();
    let op = model.operation("createA").unwrap();
    // hand expansion at depth 3: A.name, b.label, b.a.name, b.a.b.label, b.a.b.a.name, b.a.b.a.b.label, cut at b.a.b.a.b.a
    let names: Vec<&str> = op.inputs.iter().map(|p| p.name.as_str()).collect();
    assert_eq!(
        names,
        vec!["name", "b.label", "b.a.name", "b.a.b.label", "b.a.b.a.name", "b.a.b.a.b.label", "b.a.b.a.b.a"]
    );
    let cut: Vec<_> = op.inputs.iter().filter(|p| p.recursive).collect();
    assert_eq!(cut.len(), 1);
    // root A plus two expanded `a` fields; the third `a` is where expansion stops
    assert_eq!(cut[0].name.split('.').filter(|s| *s == "a").count(), DEFAULT_UNROLL_DEPTH);
    assert_eq!(cut[0].ptype, ParamType::Schema("A".into()));
}

#[test]
fn swagger_body_and_openapi_request_body_normalize_to_the_same_shape() {
    let v2 = json!({
        "swagger": "2.0", "info": {"title": "t", "version": "1"},
        "paths": {"/users": {"post": {"operationId": "createUser",
            "parameters": [{"in": "body", "name": "body", "required": true, "schema": {"$ref": "#/definitions/User"}}],
            "responses": {"201": {"description": "ok", "schema": {"$ref": "#/definitions/User"}}}}}},
        "definitions": {"User": {"type": "object", "required": ["name"], "properties": {"id": {"type": "integer"}, "name": {"type": "string"}}}}
    });
    let v3 = json!({
        "openapi": "3.0.3", "info": {"title": "t", "version": "1"},
        "paths": {"/users": {"post": {"operationId": "createUser",
            "requestBody": {"required": true, "content": {"application/json": {"schema": {"$ref": "#/components/schemas/User"}}}},
            "responses": {"201": {"description": "ok", "content": {"application/json": {"schema": {"$ref": "#/components/schemas/User"}}}}}}}},
        "components": {"schemas": {"User": {"type": "object", "required": ["name"], "properties": {"id": {"type": "integer"}, "name": {"type": "string"}}}}}
    });
    let a = load_spec(&v2.to_string(), DocumentFormat::Json).unwrap();
    let b = load_spec(&v3.to_string(), DocumentFormat::Json).unwrap();
    assert_eq!(a.operations[0].inputs, b.operations[0].inputs);
    assert_eq!(a.operations[0].outputs, b.operations[0].outputs);
    assert_eq!(a.operations[0].inputs[1].id, "createuser.body.name");
}

#[test]
fn unsupported_constructs_warn_without_aborting() {
    let doc = json!({
        "openapi": "3.1.0", "info": {"title": "t", "version": "1"},
        "webhooks": {"newPet": {}},
        "paths": {
            "/subscribe": {"post": {"operationId": "subscribe", "callbacks": {"cb": {}}, "responses": {"200": {"description": "ok"}}}},
            "/things/{thingId}": {"get": {"responses": {"200": {"description": "ok"}}}, "head": {"responses": {"200": {"description": "ok"}}}}
        }
    });
    let model = load_spec(&doc.to_string(), DocumentFormat::Json).unwrap();
    assert_eq!(model.operations.len(), 2);
    assert!(model.warnings.iter().any(|w| w.contains("webhooks")));
    assert!(model.warnings.iter().any(|w| w.contains("callbacks")));
    // synthesized opname and path parameter
    let get = model.operation("get_things_thingId").unwrap();
    let p = get.input("get_things_thingid.path.thingId").unwrap();
    assert!(p.is_required);
}

#[test]
fn export_embeds_learned_constraints_and_reloads() {
    let mut model = load_spec(PETSTORE, DocumentFormat::Json).unwrap();
    let pc = Constraint::ProducerConsumer(ProducerConsumer {
        producer_op: "placeOrder".into(),
        producer_param: "placeOrder.200.id".into(),
        consumer_op: "deleteOrder".into(),
        consumer_param: "deleteorder.path.orderId".into(),
    });
    model.add_constraint(pc.clone()).unwrap();
    model.remove_parameter("deletepet.header.api_key").unwrap();
    model.remove_operation("logoutUser").unwrap();

    let exported = export_spec(&model);
    assert_eq!(exported["x-learned-constraints"][0]["kind"], "ProducerConsumer");
    let reloaded = load_spec(&exported.to_string(), DocumentFormat::Json).unwrap();
    assert_eq!(reloaded.global_constraints, vec![pc]);
    assert_eq!(reloaded.operations.len(), 19);
    assert_eq!(reloaded.original_operation_count, 20);
    assert!(reloaded.operation("deletePet").unwrap().input("deletepet.header.api_key").unwrap().removed);
    assert_eq!(export_spec(&reloaded), exported);
}
