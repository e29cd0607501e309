//! Iterative black-box REST API test refinement.
//!
//! Tests are generated from an OpenAPI document, executed, and every unique
//! 4xx/5xx response is classified into one of fourteen categories. The
//! resulting constraints are folded back into an extended specification
//! model and the cycle repeats until a run produces no new failure.

pub mod analyzer;
pub mod engine;
pub mod metrics;
pub mod model;
pub mod pipeline;
pub mod scenario;

pub use model::{
    load_spec, Constraint, ConstraintCategory, InputParameter, Location, Method, ModelError,
    Operation, ParamId, SpecModel,
};
