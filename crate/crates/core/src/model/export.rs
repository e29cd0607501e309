use serde_json::Value;

use super::{Constraint, ModelError, SpecModel};

pub const LEARNED_CONSTRAINTS_KEY: &str = "x-learned-constraints";
pub const REMOVED_OPERATIONS_KEY: &str = "x-removed-operations";
pub const REMOVED_PARAMETERS_KEY: &str = "x-removed-parameters";

/// The source document with learned knowledge embedded under vendor
/// extension keys. Loading the result reproduces the refined model.
pub fn export_spec(model: &SpecModel) -> Value {
    let mut doc = match &model.source {
        Value::Object(_) => model.source.clone(),
        _ => serde_json::json!({ "openapi": "3.0.0", "info": { "title": "exported", "version": "0" }, "paths": {} }),
    };
    let learned: Vec<Value> = model
        .all_constraints()
        .map(|c| serde_json::to_value(c).expect("constraints serialize"))
        .collect();
    let removed_params: Vec<Value> = model
        .operations
        .iter()
        .flat_map(|o| o.inputs.iter().filter(|p| p.removed).map(|p| Value::String(p.id.clone())))
        .collect();
    let obj = doc.as_object_mut().expect("object document");
    obj.insert(LEARNED_CONSTRAINTS_KEY.into(), Value::Array(learned));
    obj.insert(
        REMOVED_OPERATIONS_KEY.into(),
        Value::Array(model.removed_operations.iter().cloned().map(Value::String).collect()),
    );
    obj.insert(REMOVED_PARAMETERS_KEY.into(), Value::Array(removed_params));
    doc
}

pub(super) fn apply_extensions(model: &mut SpecModel, doc: &Value) -> Result<(), ModelError> {
    let strings = |key: &str| -> Vec<String> {
        doc.get(key)
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
            .unwrap_or_default()
    };
    for opname in strings(REMOVED_OPERATIONS_KEY) {
        if model.remove_operation(&opname).is_err() {
            model.warnings.push(format!("{REMOVED_OPERATIONS_KEY}: unknown operation `{opname}`"));
        }
    }
    for param in strings(REMOVED_PARAMETERS_KEY) {
        if model.remove_parameter(&param).is_err() {
            model.warnings.push(format!("{REMOVED_PARAMETERS_KEY}: unknown parameter `{param}`"));
        }
    }
    if let Some(items) = doc.get(LEARNED_CONSTRAINTS_KEY).and_then(Value::as_array) {
        for item in items {
            let c: Constraint = serde_json::from_value(item.clone())
                .map_err(|e| ModelError::Parse(format!("{LEARNED_CONSTRAINTS_KEY}: {e}")))?;
            if let Err(e) = model.add_constraint(c) {
                model.warnings.push(format!("{LEARNED_CONSTRAINTS_KEY}: {e}"));
            }
        }
    }
    Ok(())
}
