//! Extended specification model: operations, schemas and learned constraints.
//!
//! The model is built from an OpenAPI document by [`load_spec`] and refined
//! between iterations through [`SpecModel::add_constraint`],
//! [`SpecModel::remove_operation`] and [`SpecModel::remove_parameter`].

mod constraint;
mod export;
mod load;
mod types;

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use constraint::{
    Constraint, ConstraintCategory, DataProperty, Operand, ProducerConsumer, RelOp, Relation,
    Selection,
};
pub use export::{export_spec, LEARNED_CONSTRAINTS_KEY, REMOVED_OPERATIONS_KEY, REMOVED_PARAMETERS_KEY};
pub use load::{load_spec, load_spec_file, unroll_schema, DocumentFormat, DEFAULT_UNROLL_DEPTH};
pub use types::{
    make_param_id, path_placeholders, FieldType, InputParameter, Location, Method, Operation,
    OutputParameter, ParamId, ParamType, Schema, SchemaField, ValueConstraints,
};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("failed to parse document: {0}")]
    Parse(String),
    #[error("unresolved entity `{0}`")]
    UnresolvedEntity(String),
    #[error("unknown operation `{0}`")]
    UnknownOperation(String),
    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpecModel {
    pub operations: Vec<Operation>,
    pub schemas: Vec<Schema>,
    pub global_constraints: Vec<Constraint>,
    /// Constraints dropped because they contradicted earlier knowledge.
    #[serde(default)]
    pub quarantined: Vec<Constraint>,
    /// Names of operations removed during refinement.
    #[serde(default)]
    pub removed_operations: Vec<String>,
    /// Operation count of the freshly loaded document (metric denominator).
    pub original_operation_count: usize,
    /// Non-fatal load problems (unsupported constructs, repaired paths).
    #[serde(default)]
    pub warnings: Vec<String>,
    /// The parsed source document, kept for export.
    #[serde(default)]
    pub source: serde_json::Value,
}

impl SpecModel {
    pub fn empty() -> Self {
        Self {
            operations: Vec::new(),
            schemas: Vec::new(),
            global_constraints: Vec::new(),
            quarantined: Vec::new(),
            removed_operations: Vec::new(),
            original_operation_count: 0,
            warnings: Vec::new(),
            source: serde_json::Value::Null,
        }
    }

    pub fn operation(&self, opname: &str) -> Option<&Operation> {
        self.operations.iter().find(|o| o.opname == opname)
    }

    pub fn operation_mut(&mut self, opname: &str) -> Option<&mut Operation> {
        self.operations.iter_mut().find(|o| o.opname == opname)
    }

    pub fn schema(&self, sname: &str) -> Option<&Schema> {
        self.schemas.iter().find(|s| s.sname == sname)
    }

    /// The operation owning an input parameter id, and the parameter.
    pub fn find_input(&self, param_id: &str) -> Option<(&Operation, &InputParameter)> {
        self.operations
            .iter()
            .find_map(|op| op.input(param_id).map(|p| (op, p)))
    }

    fn live_input_owner(&self, param_id: &str) -> Result<&Operation, ModelError> {
        match self.find_input(param_id) {
            Some((op, p)) if p.is_live() => Ok(op),
            _ => Err(ModelError::UnresolvedEntity(param_id.to_string())),
        }
    }

    /// All constraints, global first, then per-operation in model order.
    pub fn all_constraints(&self) -> impl Iterator<Item = &Constraint> {
        self.global_constraints
            .iter()
            .chain(self.operations.iter().flat_map(|o| o.local_constraints.iter()))
    }

    pub fn constraint_count(&self) -> usize {
        self.all_constraints().count()
    }

    pub fn contains_constraint(&self, c: &Constraint) -> bool {
        self.all_constraints().any(|k| k.equivalent(c))
    }

    /// Check that every entity mentioned by `c` resolves; returns the owning
    /// operation name for local constraints (`None` for global ones).
    pub fn resolve(&self, c: &Constraint) -> Result<Option<String>, ModelError> {
        if let Constraint::ProducerConsumer(pc) = c {
            let producer = self
                .operation(&pc.producer_op)
                .ok_or_else(|| ModelError::UnresolvedEntity(pc.producer_op.clone()))?;
            let consumer = self
                .operation(&pc.consumer_op)
                .ok_or_else(|| ModelError::UnresolvedEntity(pc.consumer_op.clone()))?;
            if !consumer.live_inputs().any(|p| p.id == pc.consumer_param) {
                return Err(ModelError::UnresolvedEntity(pc.consumer_param.clone()));
            }
            let output_ok = producer.outputs.iter().any(|o| o.id == pc.producer_param);
            let input_ok = producer.live_inputs().any(|p| p.id == pc.producer_param);
            if !output_ok && !input_ok {
                return Err(ModelError::UnresolvedEntity(pc.producer_param.clone()));
            }
            return Ok(None);
        }
        let ids = c.param_ids();
        let first = ids.first().ok_or_else(|| ModelError::UnresolvedEntity(c.to_string()))?;
        let owner = self.live_input_owner(first)?;
        for id in &ids[1..] {
            if owner.input(id).filter(|p| p.is_live()).is_none() {
                return Err(ModelError::UnresolvedEntity(id.to_string()));
            }
        }
        Ok(Some(owner.opname.clone()))
    }

    /// Insert a constraint; returns `Ok(false)` when an equivalent one exists.
    pub fn add_constraint(&mut self, c: Constraint) -> Result<bool, ModelError> {
        let owner = self.resolve(&c)?;
        if self.contains_constraint(&c) {
            return Ok(false);
        }
        match owner {
            None => self.global_constraints.push(c),
            Some(opname) => self
                .operation_mut(&opname)
                .expect("resolved owner exists")
                .local_constraints
                .push(c),
        }
        Ok(true)
    }

    /// Delete an operation and every constraint that references it.
    pub fn remove_operation(&mut self, opname: &str) -> Result<Operation, ModelError> {
        let idx = self
            .operations
            .iter()
            .position(|o| o.opname == opname)
            .ok_or_else(|| ModelError::UnknownOperation(opname.to_string()))?;
        let op = self.operations.remove(idx);
        self.global_constraints.retain(|c| match c {
            Constraint::ProducerConsumer(pc) => pc.producer_op != opname && pc.consumer_op != opname,
            _ => true,
        });
        self.removed_operations.push(opname.to_string());
        Ok(op)
    }

    /// Tombstone a parameter and rewrite or drop the constraints mentioning it.
    pub fn remove_parameter(&mut self, param_id: &str) -> Result<(), ModelError> {
        let op = self
            .operations
            .iter_mut()
            .find(|o| o.input(param_id).is_some_and(|p| p.is_live()))
            .ok_or_else(|| ModelError::UnknownParameter(param_id.to_string()))?;
        op.input_mut(param_id).expect("found above").removed = true;
        op.local_constraints = op
            .local_constraints
            .iter()
            .filter_map(|c| c.without_param(param_id))
            .collect();
        self.global_constraints.retain(|c| match c {
            Constraint::ProducerConsumer(pc) => {
                pc.consumer_param != param_id && pc.producer_param != param_id
            }
            _ => true,
        });
        Ok(())
    }

    /// Producer-consumer constraints currently known, in insertion order.
    pub fn extract_dependencies(&self) -> Vec<ProducerConsumer> {
        self.global_constraints
            .iter()
            .filter_map(|c| match c {
                Constraint::ProducerConsumer(pc) => Some(pc.clone()),
                _ => None,
            })
            .collect()
    }

    /// Move the most recently added local constraint of `opname` matching
    /// `pred` into quarantine.
    pub fn quarantine_latest(
        &mut self,
        opname: &str,
        pred: impl Fn(&Constraint) -> bool,
    ) -> Option<Constraint> {
        let op = self.operation_mut(opname)?;
        let idx = op.local_constraints.iter().rposition(pred)?;
        let c = op.local_constraints.remove(idx);
        self.quarantined.push(c.clone());
        Some(c)
    }

    /// Move a specific global constraint into quarantine.
    pub fn quarantine_global(&mut self, c: &Constraint) -> bool {
        match self.global_constraints.iter().position(|k| k == c) {
            Some(i) => {
                let c = self.global_constraints.remove(i);
                self.quarantined.push(c);
                true
            }
            None => false,
        }
    }

    /// Every constraint references live entities only.
    pub fn check_integrity(&self) -> Result<(), ModelError> {
        let names: BTreeSet<&str> = self.operations.iter().map(|o| o.opname.as_str()).collect();
        if names.len() != self.operations.len() {
            return Err(ModelError::UnresolvedEntity("duplicate operation name".into()));
        }
        for c in self.all_constraints() {
            self.resolve(c)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn param(op: &str, loc: Location, name: &str, required: bool) -> InputParameter {
        InputParameter {
            id: make_param_id(op, loc, name),
            name: name.into(),
            ptype: ParamType::String,
            is_required: required,
            loc,
            pc: ValueConstraints::default(),
            examples: vec![],
            locally_required: required,
            recursive: false,
            body_root: false,
            removed: false,
        }
    }

    fn op(name: &str, method: Method, path: &str, inputs: Vec<InputParameter>) -> Operation {
        Operation {
            opname: name.into(),
            path: path.into(),
            tag: vec![],
            method,
            inputs,
            outputs: vec![],
            local_constraints: vec![],
            request_media_type: None,
            produces_collection: false,
            needs_user_input: false,
        }
    }

    fn petstore_pair() -> SpecModel {
        let mut place = op("placeOrder", Method::Post, "/store/order", vec![]);
        place.outputs.push(OutputParameter {
            id: "placeOrder.200.id".into(),
            name: "id".into(),
            ptype: ParamType::Integer,
            is_required: false,
            responsecode: "200".into(),
        });
        let delete = op(
            "deleteOrder",
            Method::Delete,
            "/store/order/{orderId}",
            vec![param("deleteOrder", Location::Path, "orderId", true)],
        );
        let check = op(
            "check",
            Method::Post,
            "/check",
            vec![
                param("check", Location::FormData, "text", false),
                param("check", Location::FormData, "data", false),
                param("check", Location::FormData, "language", true),
            ],
        );
        let mut m = SpecModel::empty();
        m.operations = vec![place, delete, check];
        m.original_operation_count = 3;
        m
    }

    fn order_pc() -> Constraint {
        Constraint::ProducerConsumer(ProducerConsumer {
            producer_op: "placeOrder".into(),
            producer_param: "placeOrder.200.id".into(),
            consumer_op: "deleteOrder".into(),
            consumer_param: "deleteorder.path.orderId".into(),
        })
    }

    #[test]
    fn one_constraint_lands_on_owning_operation_once() {
        let mut m = petstore_pair();
        let one = Constraint::One { params: vec!["check.formdata.text".into(), "check.formdata.data".into()] };
        assert_eq!(m.add_constraint(one.clone()), Ok(true));
        assert!(m.operation("check").unwrap().local_constraints.contains(&one));
        let swapped = Constraint::One { params: vec!["check.formdata.data".into(), "check.formdata.text".into()] };
        assert_eq!(m.add_constraint(swapped), Ok(false));
        assert_eq!(m.constraint_count(), 1);
    }

    #[test]
    fn producer_consumer_is_global() {
        let mut m = petstore_pair();
        m.add_constraint(order_pc()).unwrap();
        assert_eq!(m.global_constraints, vec![order_pc()]);
        assert_eq!(m.extract_dependencies().len(), 1);
    }

    #[test]
    fn unresolved_ids_are_rejected() {
        let mut m = petstore_pair();
        let bad = Constraint::AdditionalMandatory { param: "check.query.nope".into() };
        assert!(matches!(m.add_constraint(bad), Err(ModelError::UnresolvedEntity(_))));
        let cross = Constraint::One {
            params: vec!["check.formdata.text".into(), "deleteorder.path.orderId".into()],
        };
        assert!(m.add_constraint(cross).is_err());
    }

    #[test]
    fn removing_producer_drops_dependency() {
        let mut m = petstore_pair();
        m.add_constraint(order_pc()).unwrap();
        m.remove_operation("placeOrder").unwrap();
        assert_eq!(m.operations.len(), 2);
        assert!(m.global_constraints.is_empty());
        assert_eq!(m.original_operation_count, 3);
        assert!(matches!(m.remove_operation("nope"), Err(ModelError::UnknownOperation(_))));
        m.check_integrity().unwrap();
    }

    #[test]
    fn remove_parameter_tombstones_and_rewrites() {
        let mut m = petstore_pair();
        let check = m.operation_mut("check").unwrap();
        check.inputs.push(param("check", Location::FormData, "url", false));
        let ids = ["check.formdata.text", "check.formdata.data", "check.formdata.url"];
        m.add_constraint(Constraint::One { params: ids.iter().map(|s| s.to_string()).collect() })
            .unwrap();
        m.remove_parameter("check.formdata.url").unwrap();
        let check = m.operation("check").unwrap();
        assert!(check.input("check.formdata.url").unwrap().removed);
        assert!(check.local_constraints[0]
            .equivalent(&Constraint::One { params: vec![ids[0].into(), ids[1].into()] }));
        m.remove_parameter("check.formdata.text").unwrap();
        assert!(m.operation("check").unwrap().local_constraints.is_empty());
        assert!(matches!(
            m.remove_parameter("check.formdata.text"),
            Err(ModelError::UnknownParameter(_))
        ));
        m.check_integrity().unwrap();
    }

    #[test]
    fn dependencies_keep_insertion_order() {
        let mut m = petstore_pair();
        let get = op(
            "getOrderById",
            Method::Get,
            "/store/order/{orderId}",
            vec![param("getOrderById", Location::Path, "orderId", true)],
        );
        m.operations.push(get);
        assert!(m.extract_dependencies().is_empty());
        m.add_constraint(order_pc()).unwrap();
        let second = Constraint::ProducerConsumer(ProducerConsumer {
            producer_op: "placeOrder".into(),
            producer_param: "placeOrder.200.id".into(),
            consumer_op: "getOrderById".into(),
            consumer_param: "getorderbyid.path.orderId".into(),
        });
        m.add_constraint(second).unwrap();
        let deps = m.extract_dependencies();
        assert_eq!(deps.len(), 2);
        assert_eq!(deps[0].consumer_op, "deleteOrder");
        assert_eq!(deps[1].consumer_op, "getOrderById");
    }
}
