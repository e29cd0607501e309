//! The refinement loop: generate, execute, analyze, refine, until a run
//! yields no failure that was not seen before.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::analyzer::{Action, Analyzer, AnalyzerVerdict, FailureKey, FailureRecord, InferenceConfig, InferenceService};
use crate::engine::{generate_tests, ExecParams, ExecutionReport, Executor, OperationScenarios, StatusCounts};
use crate::model::{Constraint, SpecModel};
use crate::scenario::{
    encode_selection_constraints, gather_data_constraints, generate_sequences, solve_parameter_scenarios, DataGenerator,
    InferenceValues, ScenarioError,
};

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub exec: ExecParams,
    /// Fallback analysis and value generation service.
    pub inference: Option<InferenceConfig>,
}

impl PipelineConfig {
    pub fn new(exec: ExecParams) -> Self {
        PipelineConfig { exec, inference: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IterationReport {
    pub index: usize,
    pub counts: StatusCounts,
    pub issued: usize,
    pub skipped: usize,
    pub tests: usize,
    pub new_constraints: Vec<Constraint>,
    pub new_failures: Vec<FailureKey>,
    pub cumulative_failures: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub quarantined: Vec<Constraint>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub warnings: Vec<String>,
}

impl IterationReport {
    fn proportion(&self, n: usize) -> f64 {
        if self.issued == 0 {
            0.0
        } else {
            n as f64 / self.issued as f64
        }
    }

    pub fn share_2xx(&self) -> f64 {
        self.proportion(self.counts.s2xx)
    }

    pub fn share_4xx(&self) -> f64 {
        self.proportion(self.counts.s4xx)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum StopReason {
    /// The last run produced no failure outside the cumulative set.
    Converged,
    MaxIterations,
    BudgetExhausted,
    Aborted(String),
}

/// What one call to [`analyze_failures`] did to the model.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Analysis {
    pub verdicts: Vec<AnalyzerVerdict>,
    pub added: Vec<Constraint>,
    /// Operations whose data should be drawn afresh.
    pub regenerate: BTreeSet<String>,
    pub warnings: Vec<String>,
}

/// Classify each failure and apply the resulting action, in (op, status,
/// message) order.
pub fn analyze_failures(model: &mut SpecModel, failures: &[FailureRecord], analyzer: &Analyzer) -> Analysis {
    let mut ordered: Vec<&FailureRecord> = failures.iter().collect();
    ordered.sort_by(|a, b| (a.key(), &a.message).cmp(&(b.key(), &b.message)));
    let mut out = Analysis::default();
    for f in ordered {
        let v = analyzer.analyze(f, model);
        let applied = match v.action {
            Action::AddConstraint => match v.constraint.clone() {
                Some(c) => model.add_constraint(c.clone()).map(|fresh| {
                    if fresh {
                        out.added.push(c);
                    }
                }),
                None => Ok(()),
            },
            Action::RemoveOperation => model.remove_operation(&v.op_id).map(|_| ()),
            Action::RemoveParameter => match &v.parameter {
                Some(p) => model.remove_parameter(p),
                None => Ok(()),
            },
            Action::RequestUserInput => {
                if let Some(op) = model.operation_mut(&v.op_id) {
                    op.needs_user_input = true;
                }
                Ok(())
            }
            Action::RegenerateData => {
                out.regenerate.insert(v.op_id.clone());
                Ok(())
            }
            Action::ReportDefect | Action::Ignore => Ok(()),
        };
        if let Err(e) = applied {
            out.warnings.push(format!("{}: {:?} not applied: {e}", v.op_id, v.action));
        }
        out.verdicts.push(v);
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutcome {
    pub model: SpecModel,
    pub iterations: Vec<IterationReport>,
    pub reports: Vec<ExecutionReport>,
    /// Cumulative unique failures in first-seen order.
    pub failures: Vec<FailureRecord>,
    pub verdicts: Vec<AnalyzerVerdict>,
    pub stop: StopReason,
}

impl PipelineOutcome {
    pub fn total_hits(&self) -> usize {
        self.reports.iter().map(|r| r.issued).sum()
    }
}

/// Scenarios for one operation, quarantining the newest learned constraint
/// whenever the current set is contradictory.
fn plan_operation(
    model: &mut SpecModel,
    opname: &str,
    generator: &DataGenerator,
    k: usize,
    salt: u64,
    quarantined: &mut Vec<Constraint>,
    warnings: &mut Vec<String>,
) -> OperationScenarios {
    'retry: loop {
        let Some(op) = model.operation(opname).cloned() else { return OperationScenarios::default() };
        let problem = encode_selection_constraints(&op);
        let solved = solve_parameter_scenarios(&problem, false)
            .and_then(|t| solve_parameter_scenarios(&problem, true).map(|p| (t, p)));
        let (target, prereq) = match solved {
            Ok(x) => x,
            Err(e) => match model.quarantine_latest(opname, Constraint::is_selection) {
                Some(c) => {
                    warnings.push(format!("{e}; quarantined {c}"));
                    quarantined.push(c);
                    continue 'retry;
                }
                None => {
                    warnings.push(e.to_string());
                    return OperationScenarios::default();
                }
            },
        };
        let mut out = OperationScenarios::default();
        let prereq = prereq.into_iter().next();
        for (s, is_prereq) in target.into_iter().map(|s| (s, false)).chain(prereq.map(|s| (s, true))) {
            let constraints = gather_data_constraints(&s, &op);
            match generator.generate(&s, &op, &constraints, k, salt) {
                Ok(d) if is_prereq => out.prerequisite = Some((s, d)),
                Ok(d) => out.target.push((s, d)),
                Err(e @ ScenarioError::UnsatisfiableData(_)) | Err(e @ ScenarioError::InfeasibleMandatory(_)) => {
                    match model.quarantine_latest(opname, Constraint::is_data) {
                        Some(c) => {
                            warnings.push(format!("{e}; quarantined {c}"));
                            quarantined.push(c);
                            continue 'retry;
                        }
                        None => warnings.push(e.to_string()),
                    }
                }
            }
        }
        return out;
    }
}

fn analyzer_for(config: &PipelineConfig) -> Analyzer {
    match &config.inference {
        Some(c) => Analyzer::with_fallback(Box::new(InferenceService::new(c.clone()))),
        None => Analyzer::rule_based(),
    }
}

fn generator_for(config: &PipelineConfig) -> DataGenerator {
    match &config.inference {
        Some(c) => DataGenerator::with_provider(
            config.exec.seed,
            Box::new(InferenceValues::new(InferenceService::new(c.clone()))),
        ),
        None => DataGenerator::new(config.exec.seed),
    }
}

/// Run the loop on `model` until convergence, the iteration cap or the hit
/// budget stops it. A connectivity failure ends the run with the reports
/// gathered so far.
pub fn run_pipeline(model: SpecModel, config: &PipelineConfig) -> PipelineOutcome {
    let analyzer = analyzer_for(config);
    let generator = generator_for(config);
    let mut executor = Executor::new(config.exec.clone());
    let mut model = model;
    let mut cumulative: Vec<FailureRecord> = Vec::new();
    let mut known: BTreeSet<FailureKey> = BTreeSet::new();
    let mut iterations = Vec::new();
    let mut reports = Vec::new();
    let mut verdicts = Vec::new();
    let mut salts: BTreeMap<String, u64> = BTreeMap::new();
    let k = config.exec.k_data_scenarios.max(1);
    let max_iterations = config.exec.max_iterations.max(1);

    let mut stop = StopReason::MaxIterations;
    for index in 1..=max_iterations {
        if executor.budget_left() == Some(0) {
            stop = StopReason::BudgetExhausted;
            break;
        }
        let mut warnings = Vec::new();
        let mut quarantined = Vec::new();

        let deps = model.extract_dependencies();
        let sequences = generate_sequences(&deps, &model);
        warnings.extend(sequences.warnings.iter().cloned());
        let mut planned: BTreeMap<String, OperationScenarios> = BTreeMap::new();
        let names: Vec<String> =
            model.operations.iter().filter(|o| !o.needs_user_input).map(|o| o.opname.clone()).collect();
        for name in names {
            let salt = salts.get(&name).copied().unwrap_or(0);
            let s = plan_operation(&mut model, &name, &generator, k, salt, &mut quarantined, &mut warnings);
            planned.insert(name, s);
        }
        let (tests, w) = generate_tests(&model, &sequences.scenarios, &planned);
        warnings.extend(w);

        let (report, run_failures) = match executor.execute(&tests, &model, index) {
            Ok(x) => x,
            Err(e) => {
                stop = StopReason::Aborted(e.to_string());
                break;
            }
        };

        let fresh: Vec<FailureRecord> = run_failures.into_iter().filter(|f| !known.contains(&f.key())).collect();
        let converged = fresh.is_empty();
        for f in &fresh {
            known.insert(f.key());
            cumulative.push(f.clone());
        }
        let analysis = if converged { Analysis::default() } else { analyze_failures(&mut model, &fresh, &analyzer) };
        for op in &analysis.regenerate {
            *salts.entry(op.clone()).or_insert(0) += 1;
        }
        warnings.extend(analysis.warnings.iter().cloned());
        for w in &warnings {
            log::warn!("iteration {index}: {w}");
        }
        iterations.push(IterationReport {
            index,
            counts: report.counts,
            issued: report.issued,
            skipped: report.skipped,
            tests: tests.len(),
            new_constraints: analysis.added.clone(),
            new_failures: fresh.iter().map(FailureRecord::key).collect(),
            cumulative_failures: known.len(),
            quarantined,
            warnings,
        });
        verdicts.extend(analysis.verdicts);
        // skipped requests leave the run incomplete, so no convergence claim
        let skipped = report.budget_exhausted();
        reports.push(report);

        if skipped {
            stop = StopReason::BudgetExhausted;
            break;
        }
        if converged {
            stop = StopReason::Converged;
            break;
        }
        if executor.budget_left() == Some(0) {
            stop = StopReason::BudgetExhausted;
            break;
        }
    }
    PipelineOutcome { model, iterations, reports, failures: cumulative, verdicts, stop }
}
