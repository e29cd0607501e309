//! The three scenario spaces of a test case: operation sequences,
//! parameter selections and data values.

pub mod data;
pub mod selection;
pub mod sequence;
pub mod values;

pub use data::{
    evaluate, gather_data_constraints, generate_data, DataConstraint, DataGenerator, DataScenario, Provenance,
};
pub use selection::{
    encode_selection_constraints, solve_parameter_scenarios, solve_parameter_scenarios_with, Atom, Clause,
    ParameterScenario, ScenarioKind, SelectionProblem, SolveOptions,
};
pub use sequence::{generate_sequences, SequenceScenario, Sequences};
pub use values::{InferenceValues, RealisticValues, ValueProvider};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ScenarioError {
    /// No selection satisfies the learned constraints together with the
    /// mandatory parameters.
    #[error("no parameter selection satisfies the constraints of {0}")]
    InfeasibleMandatory(String),
    #[error("contradictory data constraints: {0}")]
    UnsatisfiableData(String),
}
