//! Failure analysis: classify unique failure responses and turn them into
//! actions on the specification model.

mod backend;
pub mod entities;
mod inference;
pub mod nested;
pub mod normalize;
pub mod producer;
pub mod relation;
pub mod rules;
pub mod text;

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use backend::{AnalyzerBackend, BackendError, RuleBased};
pub use entities::{identify_target_parameters, SIMILARITY_THRESHOLD};
pub use inference::{InferenceConfig, InferenceService};
pub use nested::split_nested_constraint;
pub use normalize::{message_text, normalize_message};
pub use relation::extract_relational_constraint;

use crate::model::{Constraint, ConstraintCategory, InputParameter, Operation, ParamId, SpecModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AnalyzerError {
    #[error("no target parameter found in `{0}`")]
    NoTargetFound(String),
    #[error("no producer operation found for {0}")]
    NoProducerFound(String),
    #[error("ambiguous relation in `{0}`")]
    AmbiguousRelation(String),
    #[error("no conditional marker in `{0}`")]
    NoConditionalMarker(String),
    #[error("analysis backend unavailable: {0}")]
    BackendUnavailable(String),
}

/// Parameters and values of the request that produced a failure.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct RequestSnapshot {
    pub selected: Vec<ParamId>,
    pub data: BTreeMap<ParamId, Value>,
}

/// Uniqueness key of a failure.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct FailureKey {
    pub op_id: String,
    pub status: u16,
    pub normalized_message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub op_id: String,
    /// HTTP status, or 0 for a timed-out request.
    pub status: u16,
    /// Raw response body.
    pub message: String,
    pub normalized_message: String,
    pub request_snapshot: RequestSnapshot,
}

impl FailureRecord {
    pub fn new(op_id: impl Into<String>, status: u16, body: impl Into<String>, snapshot: RequestSnapshot) -> Self {
        let message = body.into();
        let normalized_message = normalize_message(&message_text(&message));
        FailureRecord { op_id: op_id.into(), status, message, normalized_message, request_snapshot: snapshot }
    }

    pub fn key(&self) -> FailureKey {
        FailureKey {
            op_id: self.op_id.clone(),
            status: self.status,
            normalized_message: self.normalized_message.clone(),
        }
    }

    /// Readable message text extracted from the body.
    pub fn text(&self) -> String {
        message_text(&self.message)
    }

    pub fn is_blank(&self) -> bool {
        self.text().trim().is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Action {
    AddConstraint,
    RemoveOperation,
    RemoveParameter,
    RequestUserInput,
    ReportDefect,
    /// Draw fresh data for the operation next iteration.
    RegenerateData,
    Ignore,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzerVerdict {
    pub op_id: String,
    /// `None` only for verdicts that need no classification (blank 4xx, timeouts).
    pub category: Option<ConstraintCategory>,
    pub constraint: Option<Constraint>,
    pub action: Action,
    /// Target of RemoveParameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub parameter: Option<ParamId>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl AnalyzerVerdict {
    fn new(op_id: &str, category: Option<ConstraintCategory>, action: Action) -> Self {
        AnalyzerVerdict { op_id: op_id.to_string(), category, constraint: None, action, parameter: None, note: None }
    }

    fn add(op_id: &str, category: ConstraintCategory, c: Constraint) -> Self {
        AnalyzerVerdict { constraint: Some(c), ..Self::new(op_id, Some(category), Action::AddConstraint) }
    }

    /// Unhandled with the reason the original category could not be completed.
    pub fn unhandled(op_id: &str, note: impl Into<String>) -> Self {
        AnalyzerVerdict { note: Some(note.into()), ..Self::new(op_id, Some(ConstraintCategory::Unhandled), Action::ReportDefect) }
    }

    /// The category/action pairing rules hold.
    pub fn is_consistent(&self) -> bool {
        use ConstraintCategory::*;
        match self.category {
            Some(c) if c.forms_constraint() => self.constraint.is_some() && self.action == Action::AddConstraint,
            Some(Unhandled) => self.action == Action::ReportDefect,
            Some(ConfigurationAuthentication) => self.action == Action::RequestUserInput,
            Some(UnsupportedOperation) => self.action == Action::RemoveOperation,
            Some(ParameterUnknown) => self.action == Action::RemoveParameter && self.parameter.is_some(),
            Some(_) => false,
            None => matches!(self.action, Action::RegenerateData | Action::Ignore),
        }
    }
}

/// Rule-based category of a failure (the first link of the backend chain).
pub fn classify_failure(f: &FailureRecord, _op: &Operation) -> ConstraintCategory {
    rules::classify(&f.text(), f.status)
}

/// Blank-body verdict: 404 on an operation with an identifier input is a
/// producer-consumer failure, any other 4xx a data issue.
pub fn handle_blank_response(f: &FailureRecord, op: &Operation, model: &SpecModel) -> AnalyzerVerdict {
    if f.status >= 500 {
        return AnalyzerVerdict::unhandled(&f.op_id, "blank server error");
    }
    if f.status == 404 && op.live_inputs().any(|p| p.is_identifier_like()) {
        return match producer::infer_from_identifiers(op, model) {
            Ok(pc) => checked(model, AnalyzerVerdict::add(&f.op_id, ConstraintCategory::ProducerConsumer, Constraint::ProducerConsumer(pc))),
            Err(e) => AnalyzerVerdict::unhandled(&f.op_id, e.to_string()),
        };
    }
    AnalyzerVerdict::new(&f.op_id, None, Action::RegenerateData)
}

fn checked(model: &SpecModel, v: AnalyzerVerdict) -> AnalyzerVerdict {
    if let Some(c) = &v.constraint {
        if let Err(e) = model.resolve(c) {
            return AnalyzerVerdict::unhandled(&v.op_id, format!("unresolvable constraint {c}: {e}"));
        }
    }
    v
}

/// Backend chain: rule-based first, optional fallback when rules give up.
pub struct Analyzer {
    rules: RuleBased,
    fallback: Option<Box<dyn AnalyzerBackend>>,
}

impl Default for Analyzer {
    fn default() -> Self {
        Self::rule_based()
    }
}

impl Analyzer {
    pub fn rule_based() -> Self {
        Analyzer { rules: RuleBased, fallback: None }
    }

    pub fn with_fallback(fallback: Box<dyn AnalyzerBackend>) -> Self {
        Analyzer { rules: RuleBased, fallback: Some(fallback) }
    }

    pub fn has_fallback(&self) -> bool {
        self.fallback.is_some()
    }

    fn chain<T>(
        &self,
        primary: Result<T, BackendError>,
        ask: impl Fn(&dyn AnalyzerBackend) -> Result<T, BackendError>,
    ) -> Result<T, BackendError> {
        match (primary, &self.fallback) {
            (Ok(v), _) => Ok(v),
            (Err(e), None) => Err(e),
            (Err(e), Some(b)) => match ask(b.as_ref()) {
                Ok(v) => Ok(v),
                Err(BackendError::Unavailable(msg)) => {
                    log::warn!("{} unavailable: {msg}", b.name());
                    Err(e)
                }
                Err(e2) => Err(e2),
            },
        }
    }

    pub fn classify(&self, message: &str, status: u16, op: &Operation) -> ConstraintCategory {
        let first = self.rules.classify(message, status, op).unwrap_or(ConstraintCategory::Unhandled);
        if first != ConstraintCategory::Unhandled || message.trim().is_empty() {
            return first;
        }
        match &self.fallback {
            None => first,
            Some(b) => match b.classify(message, status, op) {
                Ok(c) => c,
                Err(e) => {
                    log::warn!("{} classify failed: {e}", b.name());
                    first
                }
            },
        }
    }

    fn targets(&self, message: &str, candidates: &[&InputParameter]) -> Result<Vec<ParamId>, AnalyzerError> {
        self.chain(self.rules.extract_entities(message, candidates), |b| {
            let ids = b.extract_entities(message, candidates)?;
            let valid: Vec<ParamId> = ids.into_iter().filter(|i| candidates.iter().any(|c| &c.id == i)).collect();
            if valid.is_empty() {
                Err(BackendError::NoAnswer("no known parameter".into()))
            } else {
                Ok(valid)
            }
        })
        .map_err(|e| AnalyzerError::NoTargetFound(e.to_string()))
    }

    /// Verdict for one failure against the current model.
    pub fn analyze(&self, f: &FailureRecord, model: &SpecModel) -> AnalyzerVerdict {
        use ConstraintCategory::*;
        let op_id = f.op_id.as_str();
        if f.status == 0 {
            return AnalyzerVerdict { note: Some("timeout".into()), ..AnalyzerVerdict::new(op_id, None, Action::Ignore) };
        }
        let Some(op) = model.operation(op_id) else {
            return AnalyzerVerdict { note: Some("operation no longer in model".into()), ..AnalyzerVerdict::new(op_id, None, Action::Ignore) };
        };
        let message = f.text();
        if message.trim().is_empty() {
            return handle_blank_response(f, op, model);
        }
        let category = self.classify(&message, f.status, op);
        let live: Vec<&InputParameter> = op.live_inputs().collect();
        let verdict = match category {
            ConfigurationAuthentication => AnalyzerVerdict::new(op_id, Some(category), Action::RequestUserInput),
            UnsupportedOperation => AnalyzerVerdict::new(op_id, Some(category), Action::RemoveOperation),
            Unhandled => AnalyzerVerdict::new(op_id, Some(category), Action::ReportDefect),
            ParameterUnknown => match self.targets(&message, &live) {
                Ok(t) => AnalyzerVerdict { parameter: Some(t[0].clone()), ..AnalyzerVerdict::new(op_id, Some(category), Action::RemoveParameter) },
                Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
            },
            ProducerConsumer => {
                let pc = self.chain(
                    producer::infer_producer_consumer(&message, op, model).map_err(|e| BackendError::NoAnswer(e.to_string())),
                    |b| b.producer_consumer(&message, op, model),
                );
                match pc {
                    Ok(pc) => AnalyzerVerdict::add(op_id, category, Constraint::ProducerConsumer(pc)),
                    Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
                }
            }
            AdditionalMandatory => match self.targets(&message, &live) {
                Ok(t) => AnalyzerVerdict::add(op_id, category, Constraint::AdditionalMandatory { param: t[0].clone() }),
                Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
            },
            Or | One | AllOrNone => match self.targets(&message, &live) {
                Ok(t) if t.len() >= 2 => {
                    let c = match category {
                        Or => Constraint::Or { params: t },
                        One => Constraint::One { params: t },
                        _ => Constraint::AllOrNone { params: t },
                    };
                    AnalyzerVerdict::add(op_id, category, c)
                }
                Ok(_) => AnalyzerVerdict::unhandled(op_id, "group constraint needs two parameters"),
                Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
            },
            ConditionalParameterRequired | DataInfluencedParamSelection | ParameterInfluencedDataValues => {
                let c = self.chain(
                    split_nested_constraint(&message, op).map_err(|e| BackendError::NoAnswer(e.to_string())),
                    |b| b.extract_relation(&message, &[], op),
                );
                match c {
                    Ok(c) => AnalyzerVerdict::add(op_id, c.category(), c),
                    Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
                }
            }
            DataArithmetic | DataNonArithmetic => {
                let c = self.targets(&message, &live).map_err(|e| BackendError::NoAnswer(e.to_string())).and_then(|t| {
                    self.chain(
                        extract_relational_constraint(&message, &t, op).map_err(|e| BackendError::NoAnswer(e.to_string())),
                        |b| b.extract_relation(&message, &t, op),
                    )
                });
                match c {
                    Ok(c) if matches!(c, Constraint::DataArithmetic(_) | Constraint::DataNonArithmetic { .. }) => AnalyzerVerdict::add(op_id, c.category(), c),
                    Ok(c) => AnalyzerVerdict::unhandled(op_id, format!("not a data constraint: {c}")),
                    Err(e) => AnalyzerVerdict::unhandled(op_id, e.to_string()),
                }
            }
        };
        checked(model, verdict)
    }
}
