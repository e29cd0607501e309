use crate::model::{Constraint, ConstraintCategory, InputParameter, Operation, ParamId, ProducerConsumer, SpecModel};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BackendError {
    /// The backend could not be reached; callers keep the previous answer.
    #[error("unavailable: {0}")]
    Unavailable(String),
    #[error("no answer: {0}")]
    NoAnswer(String),
    #[error("malformed reply: {0}")]
    Malformed(String),
}

/// Answers classification and entity-extraction queries about one failure.
pub trait AnalyzerBackend: Send + Sync {
    fn name(&self) -> &str;

    fn classify(&self, message: &str, status: u16, op: &Operation) -> Result<ConstraintCategory, BackendError>;

    fn extract_entities(&self, message: &str, candidates: &[&InputParameter]) -> Result<Vec<ParamId>, BackendError>;

    /// Data or nested constraint over `targets` (empty when unknown).
    fn extract_relation(&self, message: &str, targets: &[ParamId], op: &Operation) -> Result<Constraint, BackendError>;

    fn producer_consumer(&self, message: &str, consumer: &Operation, model: &SpecModel) -> Result<ProducerConsumer, BackendError>;
}

/// Deterministic offline backend.
#[derive(Debug, Clone, Copy, Default)]
pub struct RuleBased;

fn no_answer(e: super::AnalyzerError) -> BackendError {
    BackendError::NoAnswer(e.to_string())
}

impl AnalyzerBackend for RuleBased {
    fn name(&self) -> &str {
        "rule-based"
    }

    fn classify(&self, message: &str, status: u16, _op: &Operation) -> Result<ConstraintCategory, BackendError> {
        Ok(super::rules::classify(message, status))
    }

    fn extract_entities(&self, message: &str, candidates: &[&InputParameter]) -> Result<Vec<ParamId>, BackendError> {
        super::identify_target_parameters(message, candidates).map_err(no_answer)
    }

    fn extract_relation(&self, message: &str, targets: &[ParamId], op: &Operation) -> Result<Constraint, BackendError> {
        if super::nested::split_conditional(message).is_some() {
            if let Ok(c) = super::split_nested_constraint(message, op) {
                return Ok(c);
            }
        }
        super::extract_relational_constraint(message, targets, op).map_err(no_answer)
    }

    fn producer_consumer(&self, message: &str, consumer: &Operation, model: &SpecModel) -> Result<ProducerConsumer, BackendError> {
        super::producer::infer_producer_consumer(message, consumer, model).map_err(no_answer)
    }
}
